use serde::{Deserialize, Serialize};

use super::CriticalSimplex;
use crate::grid::{ScalarGrid, VertexOrder};
use crate::triangulation::SimplexId;

/// A minimum paired with the edge that merges its sublevel component into an
/// older one. Essential minima have no destroyer and infinite persistence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub creator: CriticalSimplex,
    pub destroyer: Option<CriticalSimplex>,
    pub persistence: f64,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.destroyer.is_none()
    }
}

struct Components {
    parent: Vec<u32>,
}

impl Components {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[v as usize] != root {
            let next = self.parent[v as usize];
            self.parent[v as usize] = root;
            v = next;
        }
        root
    }
}

/// 0-dimensional sublevel-set persistence of the lower-star filtration.
///
/// Vertices are swept by increasing rank; the edges of each lower star are
/// processed by increasing rank of their other endpoint. Components are
/// rooted at their minimum and the younger root dies at a merge. Finite
/// pairs come first in merge order, essential minima last.
pub fn min_saddle_persistence(grid: &ScalarGrid, order: &VertexOrder) -> Vec<PersistencePair> {
    let tri = grid.triangulation();
    let n = tri.vertex_count();
    // parent links always point to a vertex of lower rank, so roots are minima
    let mut comps = Components::new(n);
    let mut pairs = Vec::new();
    let mut edges = Vec::with_capacity(14);
    let mut lower: Vec<(u32, SimplexId, usize)> = Vec::with_capacity(14);
    for v in order.sorted_vertices() {
        let rv = order.rank(v);
        edges.clear();
        tri.star(v, 1, &mut edges);
        lower.clear();
        for &e in &edges {
            let vs = tri.vertices(e);
            let u = if vs[0] == v { vs[1] } else { vs[0] };
            let ru = order.rank(u);
            if ru < rv {
                lower.push((ru, e, u));
            }
        }
        lower.sort_unstable_by_key(|(r, _, _)| *r);
        for &(_, e, u) in &lower {
            let a = comps.find(v as u32);
            let b = comps.find(u as u32);
            if a == b {
                continue;
            }
            let (elder, younger) = if order.rank(a as usize) < order.rank(b as usize) {
                (a, b)
            } else {
                (b, a)
            };
            comps.parent[younger as usize] = elder;
            if younger as usize != v {
                let creator = CriticalSimplex::new(grid, order, SimplexId::vertex(younger as usize));
                let destroyer = CriticalSimplex::new(grid, order, e);
                pairs.push(PersistencePair {
                    persistence: destroyer.value - creator.value,
                    creator,
                    destroyer: Some(destroyer),
                });
            }
        }
    }
    for v in order.sorted_vertices() {
        if comps.find(v as u32) as usize == v {
            pairs.push(PersistencePair {
                creator: CriticalSimplex::new(grid, order, SimplexId::vertex(v)),
                destroyer: None,
                persistence: f64::INFINITY,
            });
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_well_has_no_finite_pair() {
        let mut values = Vec::new();
        for y in 0..5 {
            for x in 0..5 {
                values.push(((x as f64 - 2.0).powi(2) + (y as f64 - 2.0).powi(2)) - 10.0);
            }
        }
        let g = ScalarGrid::new([5, 5, 1], [1.0; 3], [0.0; 3], values).unwrap();
        let order = VertexOrder::new(&g);
        let pairs = min_saddle_persistence(&g, &order);
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].is_essential());
        assert_eq!(pairs[0].persistence, f64::INFINITY);
        assert_eq!(pairs[0].creator.id, SimplexId::vertex(12));
    }

    #[test]
    fn two_wells_one_pair() {
        // 1D profile -10 … -1 … -3 extruded over two rows
        let profile = [-10.0, -5.0, -1.0, -2.0, -3.0, -2.5];
        let mut values = profile.to_vec();
        values.extend(profile.iter().map(|v| v + 20.0));
        let g = ScalarGrid::new([6, 2, 1], [1.0; 3], [0.0; 3], values).unwrap();
        let order = VertexOrder::new(&g);
        let pairs = min_saddle_persistence(&g, &order);
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].creator.id, SimplexId::vertex(4));
        assert_eq!(pairs[0].persistence, 2.0);
        assert_eq!(pairs[0].destroyer.as_ref().unwrap().value, -1.0);
        assert!(pairs[1].is_essential());
    }
}
