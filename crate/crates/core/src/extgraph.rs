//! Extremum graph: minima as nodes, unstable sets of 1-saddles as arcs.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::grid::{ScalarGrid, VertexOrder};
use crate::morse::{descending_paths_from_1saddle, simplex_value, DiscreteGradient};
use crate::triangulation::SimplexId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub position: [f64; 3],
    pub value: f64,
    #[serde(skip)]
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    /// Node indices, lower first. Equal for a loop arc.
    pub endpoints: [usize; 2],
    pub saddle_value: f64,
    pub saddle_position: [f64; 3],
    /// From `endpoints[0]` through the saddle to `endpoints[1]`.
    pub geometry: Vec<[f64; 3]>,
    #[serde(rename = "loop")]
    pub is_loop: bool,
    #[serde(skip)]
    pub saddle: Option<SimplexId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumGraph {
    pub source_id: String,
    pub nodes: Vec<Node>,
    pub arcs: Vec<Arc>,
}

fn lex(a: &[f64; 3], b: &[f64; 3]) -> Ordering {
    a[0].total_cmp(&b[0])
        .then(a[1].total_cmp(&b[1]))
        .then(a[2].total_cmp(&b[2]))
}

impl ExtremumGraph {
    /// Arcs whose endpoints are `a` and `b` in either order.
    pub fn arcs_between(&self, a: usize, b: usize) -> impl Iterator<Item = (usize, &Arc)> {
        let key = [a.min(b), a.max(b)];
        self.arcs
            .iter()
            .enumerate()
            .filter(move |(_, arc)| arc.endpoints == key)
    }

    pub fn loop_count(&self) -> usize {
        self.arcs.iter().filter(|a| a.is_loop).count()
    }
}

/// Collects one node per critical vertex and one arc per critical edge of a
/// (simplified) gradient.
///
/// Nodes are ordered by `(value, position)`; arcs by `(endpoints,
/// saddle_value, saddle_position)`, so parallel arcs appear in increasing
/// saddle value.
pub fn build_extremum_graph(
    g: &DiscreteGradient,
    grid: &ScalarGrid,
    order: &VertexOrder,
    source_id: impl Into<String>,
) -> ExtremumGraph {
    let tri = g.triangulation();
    let mut nodes: Vec<Node> = g
        .critical_of_dim(0)
        .map(|s| Node {
            position: grid.position(s.base()),
            value: grid.value(s.base()),
            vertex: s.base(),
        })
        .collect();
    nodes.sort_by(|a, b| a.value.total_cmp(&b.value).then(lex(&a.position, &b.position)));
    let mut node_of = std::collections::HashMap::with_capacity(nodes.len());
    for (i, n) in nodes.iter().enumerate() {
        node_of.insert(n.vertex, i);
    }

    let saddles: Vec<SimplexId> = g.critical_of_dim(1).collect();
    let mut arcs: Vec<Arc> = saddles
        .into_iter()
        .map(|s| {
            let [a, b] = descending_paths_from_1saddle(g, grid, s).expect("critical edge");
            let na = node_of[&a.minimum()];
            let nb = node_of[&b.minimum()];
            let saddle_position = tri.barycenter(grid, s);
            let (first, second, endpoints) = if na <= nb { (a, b, [na, nb]) } else { (b, a, [nb, na]) };
            let mut geometry: Vec<[f64; 3]> = first.polyline.into_iter().rev().collect();
            geometry.push(saddle_position);
            geometry.extend(second.polyline);
            Arc {
                endpoints,
                saddle_value: simplex_value(grid, order, s),
                saddle_position,
                geometry,
                is_loop: na == nb,
                saddle: Some(s),
            }
        })
        .collect();
    arcs.sort_by(|a, b| {
        a.endpoints
            .cmp(&b.endpoints)
            .then(a.saddle_value.total_cmp(&b.saddle_value))
            .then(lex(&a.saddle_position, &b.saddle_position))
    });
    ExtremumGraph {
        source_id: source_id.into(),
        nodes,
        arcs,
    }
}
