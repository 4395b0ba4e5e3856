//! Chemical reading of an extremum graph of the opposite density: oxygen and
//! hydrogen atoms, covalent bonds, hydrogen bonds and misconnected arcs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extgraph::ExtremumGraph;
use crate::io::Atom;

/// Below this bond-critical-point density, together with the length and
/// angle limits, a hydrogen bond is reported as close to breaking.
pub const BREAKING_DENSITY: f64 = 1.5e-2;
pub const BREAKING_LENGTH: f64 = 2.3;
pub const BREAKING_ANGLE: f64 = 14.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BondError {
    #[error("oxygen cut {oxygen_cut} must lie below covalent cut {covalent_cut}")]
    BadThresholds { oxygen_cut: f64, covalent_cut: f64 },
    #[error("arc {0} is not a hydrogen bond")]
    NotAHydrogenBond(usize),
    #[error("arc {0} does not exist")]
    NoSuchArc(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub oxygen_cut: f64,
    pub covalent_cut: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            oxygen_cut: -4.0,
            covalent_cut: -0.1,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<(), BondError> {
        if self.oxygen_cut < self.covalent_cut {
            Ok(())
        } else {
            Err(BondError::BadThresholds {
                oxygen_cut: self.oxygen_cut,
                covalent_cut: self.covalent_cut,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomClass {
    Oxygen,
    Hydrogen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BondClass {
    Covalent,
    HydrogenBond,
    Misconnected,
    /// H–H arcs and loop arcs; kept for inspection, never a bond.
    Unclassified,
}

impl BondClass {
    pub fn as_str(self) -> &'static str {
        match self {
            BondClass::Covalent => "covalent",
            BondClass::HydrogenBond => "hydrogen_bond",
            BondClass::Misconnected => "misconnected",
            BondClass::Unclassified => "unclassified",
        }
    }

    pub fn is_bond(self) -> bool {
        matches!(self, BondClass::Covalent | BondClass::HydrogenBond)
    }
}

/// Classification of one arc of the extremum graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcLabel {
    pub class: BondClass,
    /// Hydrogen node of an O–H arc.
    pub hydrogen: Option<usize>,
    /// Oxygen covalently holding the hydrogen (hydrogen bonds only).
    pub donor: Option<usize>,
    /// Oxygen receiving the hydrogen bond.
    pub acceptor: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondGraph {
    pub graph: ExtremumGraph,
    pub config: ClassifyConfig,
    pub atoms: Vec<AtomClass>,
    /// One label per arc of `graph`, same indexing.
    pub labels: Vec<ArcLabel>,
    pub warnings: Vec<String>,
}

impl BondGraph {
    pub fn count(&self, class: BondClass) -> usize {
        self.labels.iter().filter(|l| l.class == class).count()
    }

    /// Arc indices of covalent bonds, hydrogen bonds and misconnected arcs.
    pub fn bonds(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.class != BondClass::Unclassified)
            .map(|(i, _)| i)
    }

    pub fn hydrogen_bonds(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.class == BondClass::HydrogenBond)
            .map(|(i, _)| i)
    }

    fn distance(&self, a: usize, b: usize) -> f64 {
        dist(&self.graph.nodes[a].position, &self.graph.nodes[b].position)
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Labels nodes and arcs by thresholding opposite-density values.
pub fn classify(eg: &ExtremumGraph, cfg: &ClassifyConfig) -> Result<BondGraph, BondError> {
    cfg.validate()?;
    let atoms: Vec<AtomClass> = eg
        .nodes
        .iter()
        .map(|n| {
            if n.value < cfg.oxygen_cut {
                AtomClass::Oxygen
            } else {
                AtomClass::Hydrogen
            }
        })
        .collect();

    let mut labels: Vec<ArcLabel> = eg
        .arcs
        .iter()
        .map(|arc| {
            let [a, b] = arc.endpoints;
            let unclassified = ArcLabel {
                class: BondClass::Unclassified,
                hydrogen: None,
                donor: None,
                acceptor: None,
            };
            if arc.is_loop {
                return unclassified;
            }
            match (atoms[a], atoms[b]) {
                (AtomClass::Oxygen, AtomClass::Oxygen) => ArcLabel {
                    class: BondClass::Misconnected,
                    ..unclassified
                },
                (AtomClass::Hydrogen, AtomClass::Hydrogen) => unclassified,
                (ca, _) => {
                    let (o, h) = if ca == AtomClass::Oxygen { (a, b) } else { (b, a) };
                    if arc.saddle_value < cfg.covalent_cut {
                        ArcLabel {
                            class: BondClass::Covalent,
                            hydrogen: Some(h),
                            donor: None,
                            acceptor: None,
                        }
                    } else {
                        ArcLabel {
                            class: BondClass::HydrogenBond,
                            hydrogen: Some(h),
                            donor: None,
                            acceptor: Some(o),
                        }
                    }
                }
            }
        })
        .collect();

    let mut bg = BondGraph {
        graph: eg.clone(),
        config: *cfg,
        atoms,
        labels: Vec::new(),
        warnings: Vec::new(),
    };

    // covalent partners of each hydrogen
    let mut partners: Vec<Vec<usize>> = vec![Vec::new(); eg.nodes.len()];
    for (i, l) in labels.iter().enumerate() {
        if l.class == BondClass::Covalent {
            let h = l.hydrogen.unwrap();
            let [a, b] = eg.arcs[i].endpoints;
            partners[h].push(if a == h { b } else { a });
        }
    }
    for (i, l) in labels.iter_mut().enumerate() {
        if l.class != BondClass::HydrogenBond {
            continue;
        }
        let h = l.hydrogen.unwrap();
        let mut candidates = partners[h].clone();
        candidates.sort_by(|&x, &y| bg.distance(h, x).total_cmp(&bg.distance(h, y)).then(x.cmp(&y)));
        candidates.dedup();
        match candidates.first() {
            None => {
                let msg = format!("hydrogen bond arc {i}: hydrogen node {h} has no covalent bond, donor unresolved");
                log::warn!("{msg}");
                bg.warnings.push(msg);
            }
            Some(&donor) => {
                if candidates.len() > 1 {
                    let msg = format!(
                        "hydrogen node {h} has {} covalent partners, using the nearest ({donor}) as donor of arc {i}",
                        candidates.len()
                    );
                    log::warn!("{msg}");
                    bg.warnings.push(msg);
                }
                l.donor = Some(donor);
            }
        }
    }
    bg.labels = labels;
    Ok(bg)
}

/// Geometric indicators of a hydrogen bond Dn–H···Ac.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BondIndicators {
    /// Density at the bond critical point (`-saddle_value`).
    pub bcp_density: f64,
    /// Ac–H distance, Å.
    pub length: f64,
    /// Angle at Ac between Ac→Dn and Ac→H, degrees. `None` without a donor.
    pub angle: Option<f64>,
    pub near_breaking: bool,
}

pub fn indicators(bg: &BondGraph, arc: usize) -> Result<BondIndicators, BondError> {
    let label = bg.labels.get(arc).ok_or(BondError::NoSuchArc(arc))?;
    if label.class != BondClass::HydrogenBond {
        return Err(BondError::NotAHydrogenBond(arc));
    }
    let h = bg.graph.nodes[label.hydrogen.unwrap()].position;
    let ac = bg.graph.nodes[label.acceptor.unwrap()].position;
    let bcp_density = -bg.graph.arcs[arc].saddle_value;
    let length = dist(&ac, &h);
    let angle = label.donor.and_then(|d| {
        let dn = bg.graph.nodes[d].position;
        angle_at(&ac, &dn, &h)
    });
    let near_breaking =
        bcp_density < BREAKING_DENSITY && length > BREAKING_LENGTH && angle.is_some_and(|a| a > BREAKING_ANGLE);
    Ok(BondIndicators {
        bcp_density,
        length,
        angle,
        near_breaking,
    })
}

/// Angle at `apex` between rays to `a` and `b`, degrees.
fn angle_at(apex: &[f64; 3], a: &[f64; 3], b: &[f64; 3]) -> Option<f64> {
    let u = [a[0] - apex[0], a[1] - apex[1], a[2] - apex[2]];
    let v = [b[0] - apex[0], b[1] - apex[1], b[2] - apex[2]];
    let nu = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let nv = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return None;
    }
    let c = ((u[0] * v[0] + u[1] * v[1] + u[2] * v[2]) / (nu * nv)).clamp(-1.0, 1.0);
    Some(c.acos().to_degrees())
}

/// A node whose topological class disagrees with the nearest atom of the
/// input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomDisagreement {
    pub node: usize,
    pub class: AtomClass,
    pub atomic_number: u32,
    pub distance: f64,
}

/// Compares node classes with the atom list of a cube file. The field wins;
/// disagreements are only reported.
pub fn cross_check_atoms(bg: &BondGraph, atoms: &[Atom]) -> Vec<AtomDisagreement> {
    if atoms.is_empty() {
        return Vec::new();
    }
    bg.graph
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, n)| {
            let (atom, d) = atoms
                .iter()
                .map(|a| (a, dist(&a.position, &n.position)))
                .min_by(|x, y| x.1.total_cmp(&y.1))?;
            let expected = match atom.atomic_number {
                8 => Some(AtomClass::Oxygen),
                1 => Some(AtomClass::Hydrogen),
                _ => None,
            };
            match expected {
                Some(c) if c != bg.atoms[i] => Some(AtomDisagreement {
                    node: i,
                    class: bg.atoms[i],
                    atomic_number: atom.atomic_number,
                    distance: d,
                }),
                _ => None,
            }
        })
        .collect()
}
