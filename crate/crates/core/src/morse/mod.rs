//! Discrete Morse theory on the implicit triangulation: gradient
//! construction, critical simplices, descending v-paths, 0-dimensional
//! persistence and gradient-level simplification.

mod gradient;
mod paths;
mod persistence;
mod simplify;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gradient::{compute_gradient, DiscreteGradient};
pub use paths::{descending_paths_from_1saddle, VPath};
pub use persistence::{min_saddle_persistence, PersistencePair};
pub use simplify::{cancel_saddle_saddle, simplify_minima, MinimaSimplification};

use crate::grid::{ScalarGrid, VertexOrder};
use crate::triangulation::SimplexId;

/// Default persistence threshold for minima removal.
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// Default value-difference threshold for saddle-saddle cancellation.
pub const DEFAULT_DELTA: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorseError {
    #[error("invalid gradient: {0}")]
    InvalidGradient(String),
    #[error("{0} is not a critical 1-simplex")]
    NotASaddle(SimplexId),
    #[error(
        "cannot keep exactly {target} minima out of {available}: persistence values {lower:?} and {upper:?} bracket the cut"
    )]
    TargetUnreachable {
        target: usize,
        available: usize,
        lower: Option<f64>,
        upper: Option<f64>,
    },
    #[error("persistence pair ({creator}, {destroyer}) cannot be cancelled in the current gradient")]
    NotCancellable { creator: SimplexId, destroyer: SimplexId },
}

/// A critical simplex with its value (at the highest-ranked vertex) and
/// barycenter in Å.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSimplex {
    pub id: SimplexId,
    pub index: usize,
    pub value: f64,
    pub position: [f64; 3],
}

impl CriticalSimplex {
    pub fn new(grid: &ScalarGrid, order: &VertexOrder, id: SimplexId) -> Self {
        let tri = grid.triangulation();
        Self {
            id,
            index: id.dim(),
            value: grid.value(tri.top_vertex(id, order)),
            position: tri.barycenter(grid, id),
        }
    }
}

/// Function value of a simplex: the value at its highest-ranked vertex.
pub fn simplex_value(grid: &ScalarGrid, order: &VertexOrder, s: SimplexId) -> f64 {
    grid.value(grid.triangulation().top_vertex(s, order))
}
