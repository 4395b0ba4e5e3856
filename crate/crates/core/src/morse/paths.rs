use serde::{Deserialize, Serialize};

use super::{DiscreteGradient, MorseError};
use crate::grid::ScalarGrid;
use crate::triangulation::SimplexId;

/// A descending vertex-edge v-path, from a saddle endpoint to a minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VPath {
    /// Visited vertices, first is the saddle endpoint, last the minimum.
    pub vertices: Vec<usize>,
    /// Edge heads traversed; `edges[i]` joins `vertices[i]` and `vertices[i + 1]`.
    pub edges: Vec<SimplexId>,
    /// Positions of `vertices`, Å.
    pub polyline: Vec<[f64; 3]>,
}

impl VPath {
    pub fn minimum(&self) -> usize {
        *self.vertices.last().expect("path has a start vertex")
    }
}

/// Follows vertex-edge vectors downward from `v` until a critical vertex.
pub(crate) fn descend(g: &DiscreteGradient, v: usize) -> (Vec<usize>, Vec<SimplexId>) {
    let tri = g.triangulation();
    let mut vertices = vec![v];
    let mut edges = Vec::new();
    let mut cur = v;
    while let Some(edge) = g.head_of(SimplexId::vertex(cur)) {
        let vs = tri.vertices(edge);
        cur = if vs[0] == cur { vs[1] } else { vs[0] };
        vertices.push(cur);
        edges.push(edge);
    }
    (vertices, edges)
}

/// The two descending v-paths of a critical edge, one per endpoint, in
/// increasing endpoint index. Both may end at the same minimum.
pub fn descending_paths_from_1saddle(
    g: &DiscreteGradient,
    grid: &ScalarGrid,
    saddle: SimplexId,
) -> Result<[VPath; 2], MorseError> {
    let tri = g.triangulation();
    if saddle.dim() != 1 || !tri.is_valid(saddle) || !g.is_critical(saddle) {
        return Err(MorseError::NotASaddle(saddle));
    }
    let ends = tri.vertices(saddle);
    let path = |v: usize| {
        let (vertices, edges) = descend(g, v);
        let polyline = vertices.iter().map(|&u| grid.position(u)).collect();
        VPath {
            vertices,
            edges,
            polyline,
        }
    };
    Ok([path(ends[0]), path(ends[1])])
}
