//! Synthetic promolecular densities: sums of radial kernels centred on atom
//! sites, sampled on a grid, plus displacement ensembles of such models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridError, ScalarGrid};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("site {0}: amplitude and decay must be positive and finite")]
    BadSite(usize),
    #[error("ensemble has {directions} directions for {sites} sites")]
    DirectionCount { directions: usize, sites: usize },
    #[error("ensemble needs at least one step")]
    NoSteps,
    #[error("noise amplitude {0} must lie in [0, 1)")]
    BadNoise(f64),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Radial profile as a function of `t = r / decay`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `exp(-t^2)`
    #[default]
    Gaussian,
    /// `exp(-t)`
    Exponential,
}

impl Kernel {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-t * t).exp(),
            Kernel::Exponential => (-t).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    /// Å.
    pub pos: [f64; 3],
    pub amp: f64,
    /// Å.
    pub decay: f64,
    /// Overrides the model kernel for this site.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Kernel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteModel {
    #[serde(default)]
    pub kernel: Kernel,
    pub sites: Vec<Site>,
}

impl SiteModel {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (i, s) in self.sites.iter().enumerate() {
            let ok = s.amp > 0.0 && s.decay > 0.0 && s.amp.is_finite() && s.decay.is_finite()
                && s.pos.iter().all(|x| x.is_finite());
            if !ok {
                return Err(SynthError::BadSite(i));
            }
        }
        Ok(())
    }

    /// Density at `p`, positive.
    pub fn density_at(&self, p: [f64; 3]) -> f64 {
        self.sites
            .iter()
            .map(|s| {
                let r = ((p[0] - s.pos[0]).powi(2) + (p[1] - s.pos[1]).powi(2) + (p[2] - s.pos[2]).powi(2)).sqrt();
                s.amp * s.kernel.unwrap_or(self.kernel).eval(r / s.decay)
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: [usize; 3],
    /// Å.
    pub spacing: [f64; 3],
    /// Å.
    pub origin: [f64; 3],
}

/// Samples the density of `model` (not its opposite) on `spec`.
pub fn rasterize(model: &SiteModel, spec: &GridSpec) -> Result<ScalarGrid, SynthError> {
    model.validate()?;
    let [nx, ny, nz] = spec.dims;
    let mut values = vec![0.0; nx * ny * nz];
    if nx * ny > 0 {
        values.par_chunks_mut(nx * ny).enumerate().for_each(|(z, slab)| {
            for y in 0..ny {
                for x in 0..nx {
                    let p = [
                        spec.origin[0] + x as f64 * spec.spacing[0],
                        spec.origin[1] + y as f64 * spec.spacing[1],
                        spec.origin[2] + z as f64 * spec.spacing[2],
                    ];
                    slab[x + nx * y] = model.density_at(p);
                }
            }
        });
    }
    Ok(ScalarGrid::new(spec.dims, spec.spacing, spec.origin, values)?)
}

/// Multiplies each value by `1 + amplitude * u`, `u` uniform in `[-1, 1)`.
pub fn add_noise(grid: &ScalarGrid, amplitude: f64, seed: u64) -> Result<ScalarGrid, SynthError> {
    if !(0.0..1.0).contains(&amplitude) {
        return Err(SynthError::BadNoise(amplitude));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = grid
        .values()
        .iter()
        .map(|v| v * (1.0 + amplitude * rng.gen_range(-1.0..1.0)))
        .collect();
    Ok(ScalarGrid::new(grid.dims(), grid.spacing(), grid.origin(), values)?)
}

/// Members are `base` with site `i` moved to
/// `pos_i + scale * (k - (steps - 1) / 2) * directions[i]`, `k = 0..steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementEnsemble {
    pub directions: Vec<[f64; 3]>,
    pub steps: usize,
    pub scale: f64,
}

impl DisplacementEnsemble {
    pub fn validate(&self, base: &SiteModel) -> Result<(), SynthError> {
        if self.steps == 0 {
            return Err(SynthError::NoSteps);
        }
        if self.directions.len() != base.sites.len() {
            return Err(SynthError::DirectionCount {
                directions: self.directions.len(),
                sites: base.sites.len(),
            });
        }
        Ok(())
    }

    pub fn offset(&self, k: usize) -> f64 {
        self.scale * (k as f64 - (self.steps as f64 - 1.0) / 2.0)
    }

    pub fn member(&self, base: &SiteModel, k: usize) -> SiteModel {
        let c = self.offset(k);
        let mut m = base.clone();
        for (s, d) in m.sites.iter_mut().zip(&self.directions) {
            for a in 0..3 {
                s.pos[a] += c * d[a];
            }
        }
        m
    }
}

/// A complete synthetic data set as stored in fixture files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    #[serde(default)]
    pub kernel: Kernel,
    pub sites: Vec<Site>,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<DisplacementEnsemble>,
    #[serde(default)]
    pub seed: u64,
    /// Relative multiplicative noise; 0 disables it.
    #[serde(default)]
    pub noise: f64,
}

impl FixtureSpec {
    pub fn model(&self) -> SiteModel {
        SiteModel {
            kernel: self.kernel,
            sites: self.sites.clone(),
        }
    }

    pub fn member_count(&self) -> usize {
        self.ensemble.as_ref().map_or(1, |e| e.steps)
    }

    /// Density of member `k`; noise is seeded with `seed + k`.
    pub fn member(&self, k: usize) -> Result<ScalarGrid, SynthError> {
        let base = self.model();
        let model = match &self.ensemble {
            Some(e) => {
                e.validate(&base)?;
                e.member(&base, k)
            }
            None => base,
        };
        let grid = rasterize(&model, &self.grid)?;
        if self.noise > 0.0 {
            add_noise(&grid, self.noise, self.seed.wrapping_add(k as u64))
        } else {
            Ok(grid)
        }
    }

    pub fn members(&self) -> Result<Vec<ScalarGrid>, SynthError> {
        (0..self.member_count()).map(|k| self.member(k)).collect()
    }
}
