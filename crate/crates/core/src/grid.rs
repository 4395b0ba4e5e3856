//! Regular-grid scalar fields and the injective vertex order used by every
//! combinatorial algorithm downstream.
//!
//! Values are stored row-major with `x` varying fastest. A grid whose third
//! dimension is `1` is treated as a planar (2D) field.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::triangulation::Triangulation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid dimensions {0:?} invalid: need nx, ny >= 2 and nz = 1 or nz >= 2")]
    BadDims([usize; 3]),
    #[error("grid spacing {0:?} must be strictly positive")]
    BadSpacing([f64; 3]),
    #[error("expected {expected} values for the grid dimensions, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("value at vertex {index} is not finite")]
    NonFinite { index: usize },
    #[error("grid has {0} vertices, more than the 2^32 addressable by the vertex order")]
    TooLarge(usize),
}

/// Planar grids (`nz == 1`) are triangulated with 2 triangles per square,
/// volumetric ones with 6 tetrahedra per cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimensionMode {
    Planar,
    Volumetric,
}

impl DimensionMode {
    pub fn dimension(self) -> usize {
        match self {
            DimensionMode::Planar => 2,
            DimensionMode::Volumetric => 3,
        }
    }
}

/// A scalar field sampled on the vertices of a regular, axis-aligned grid.
///
/// Lengths (`spacing`, `origin`) are in Ångström. Values are unitless as far
/// as this crate is concerned: every threshold applied later must be in the
/// same unit system as the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarGrid {
    dims: [usize; 3],
    spacing: [f64; 3],
    origin: [f64; 3],
    values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(
        dims: [usize; 3],
        spacing: [f64; 3],
        origin: [f64; 3],
        values: Vec<f64>,
    ) -> Result<Self, GridError> {
        if dims[0] < 2 || dims[1] < 2 || dims[2] == 0 {
            return Err(GridError::BadDims(dims));
        }
        if spacing.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(GridError::BadSpacing(spacing));
        }
        let expected = dims[0] * dims[1] * dims[2];
        if values.len() != expected {
            return Err(GridError::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        if expected > u32::MAX as usize {
            return Err(GridError::TooLarge(expected));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { index });
        }
        Ok(Self {
            dims,
            spacing,
            origin,
            values,
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mode(&self) -> DimensionMode {
        if self.dims[2] == 1 {
            DimensionMode::Planar
        } else {
            DimensionMode::Volumetric
        }
    }

    #[inline]
    pub fn value(&self, vertex: usize) -> f64 {
        self.values[vertex]
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    #[inline]
    pub fn coords(&self, vertex: usize) -> [usize; 3] {
        let x = vertex % self.dims[0];
        let yz = vertex / self.dims[0];
        [x, yz % self.dims[1], yz / self.dims[1]]
    }

    /// Cartesian position of a vertex, Å.
    pub fn position(&self, vertex: usize) -> [f64; 3] {
        let c = self.coords(vertex);
        [
            self.origin[0] + c[0] as f64 * self.spacing[0],
            self.origin[1] + c[1] as f64 * self.spacing[1],
            self.origin[2] + c[2] as f64 * self.spacing[2],
        ]
    }

    /// The opposite field: every value negated, geometry untouched.
    pub fn negate(&self) -> ScalarGrid {
        ScalarGrid {
            dims: self.dims,
            spacing: self.spacing,
            origin: self.origin,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    pub fn triangulation(&self) -> Triangulation {
        Triangulation::new(self.dims)
    }
}

/// Symbolic perturbation of the field: vertices ordered by `(value, index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrder {
    rank: Vec<u32>,
    by_rank: Vec<u32>,
}

impl VertexOrder {
    pub fn new(grid: &ScalarGrid) -> Self {
        let values = grid.values();
        let mut by_rank: Vec<u32> = (0..values.len() as u32).collect();
        by_rank.sort_unstable_by(|&a, &b| {
            // finite by construction; partial_cmp keeps -0.0 == 0.0
            values[a as usize]
                .partial_cmp(&values[b as usize])
                .expect("finite values")
                .then(a.cmp(&b))
        });
        let mut rank = vec![0u32; values.len()];
        for (r, &v) in by_rank.iter().enumerate() {
            rank[v as usize] = r as u32;
        }
        Self { rank, by_rank }
    }

    #[inline]
    pub fn rank(&self, vertex: usize) -> u32 {
        self.rank[vertex]
    }

    #[inline]
    pub fn vertex_at(&self, rank: u32) -> usize {
        self.by_rank[rank as usize] as usize
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    /// Vertices in increasing order.
    pub fn sorted_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_rank.iter().map(|&v| v as usize)
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }
}
