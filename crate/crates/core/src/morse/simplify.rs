use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::paths::descend;
use super::{simplex_value, DiscreteGradient, MorseError, PersistencePair};
use crate::grid::{ScalarGrid, VertexOrder};
use crate::triangulation::SimplexId;

/// What the minima simplification did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaSimplification {
    /// Threshold actually applied (raised when a target count was requested).
    pub epsilon: f64,
    pub cancelled: usize,
    pub remaining_minima: usize,
}

fn rank_gap(order: &VertexOrder, tri: &crate::triangulation::Triangulation, p: &PersistencePair) -> u32 {
    let d = p.destroyer.as_ref().expect("finite pair");
    order.rank(tri.top_vertex(d.id, order)) - order.rank(p.creator.id.base())
}

/// Removes minima whose persistence is below `epsilon` by reversing the
/// vertex-edge v-path between each minimum and its destroying saddle, in
/// increasing persistence.
///
/// With `target_min_count`, `epsilon` is replaced by the smallest finite
/// pair persistence that is not cancelled, so that exactly that many minima
/// survive.
pub fn simplify_minima(
    g: &mut DiscreteGradient,
    order: &VertexOrder,
    pairs: &[PersistencePair],
    epsilon: f64,
    target_min_count: Option<usize>,
) -> Result<MinimaSimplification, MorseError> {
    let tri = *g.triangulation();
    let mut finite: Vec<&PersistencePair> = pairs.iter().filter(|p| !p.is_essential()).collect();
    // ties: smaller rank gap first keeps nested merges valid, then SimplexId
    finite.sort_by(|a, b| {
        a.persistence
            .total_cmp(&b.persistence)
            .then(rank_gap(order, &tri, a).cmp(&rank_gap(order, &tri, b)))
            .then(a.destroyer.as_ref().unwrap().id.cmp(&b.destroyer.as_ref().unwrap().id))
    });
    let available = pairs.len();

    let epsilon = match target_min_count {
        None => epsilon,
        Some(target) => {
            if target == 0 || target > available || available - target > finite.len() {
                return Err(MorseError::TargetUnreachable {
                    target,
                    available,
                    lower: None,
                    upper: None,
                });
            }
            let cut = available - target;
            let lower = cut.checked_sub(1).map(|i| finite[i].persistence);
            let upper = finite.get(cut).map(|p| p.persistence);
            match (lower, upper) {
                (Some(l), Some(u)) if l >= u => {
                    return Err(MorseError::TargetUnreachable {
                        target,
                        available,
                        lower,
                        upper,
                    })
                }
                (_, Some(u)) => u,
                (_, None) => f64::MAX,
            }
        }
    };

    let mut cancelled = 0;
    for pair in finite.iter().take_while(|p| p.persistence < epsilon) {
        let minimum = pair.creator.id.base();
        let saddle = pair.destroyer.as_ref().unwrap().id;
        cancel_minimum(g, minimum, saddle).ok_or(MorseError::NotCancellable {
            creator: pair.creator.id,
            destroyer: saddle,
        })?;
        cancelled += 1;
    }
    Ok(MinimaSimplification {
        epsilon,
        cancelled,
        remaining_minima: available - cancelled,
    })
}

/// Reverses the v-path from `saddle` down to `minimum`; `None` when the
/// saddle does not reach the minimum through exactly one of its endpoints.
fn cancel_minimum(g: &mut DiscreteGradient, minimum: usize, saddle: SimplexId) -> Option<()> {
    let tri = *g.triangulation();
    if !g.is_critical(saddle) || !g.is_critical(SimplexId::vertex(minimum)) {
        return None;
    }
    let ends = tri.vertices(saddle);
    let a = descend(g, ends[0]);
    let b = descend(g, ends[1]);
    let hits_a = *a.0.last().unwrap() == minimum;
    let hits_b = *b.0.last().unwrap() == minimum;
    let (vertices, edges) = match (hits_a, hits_b) {
        (true, false) => a,
        (false, true) => b,
        _ => return None,
    };
    g.pair(SimplexId::vertex(vertices[0]), saddle);
    for (v, e) in vertices[1..].iter().zip(edges) {
        g.pair(SimplexId::vertex(*v), e);
    }
    Some(())
}

/// Number of distinct 1-2 v-paths from a critical triangle to each critical
/// edge it reaches, saturated at 2.
fn edge_path_counts(g: &DiscreteGradient, start: SimplexId) -> HashMap<SimplexId, u8> {
    let tri = g.triangulation();
    // explore the triangles reachable through edge-triangle vectors
    let mut index: HashMap<SimplexId, usize> = HashMap::new();
    let mut nodes = vec![start];
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut hits: Vec<Vec<SimplexId>> = Vec::new();
    index.insert(start, 0);
    let mut i = 0;
    while i < nodes.len() {
        let t = nodes[i];
        let mut s = Vec::new();
        let mut h = Vec::new();
        for f in tri.facets(t) {
            if g.is_critical(f) {
                h.push(f);
            } else if let Some(next) = g.head_of(f) {
                if next == t {
                    continue;
                }
                let id = *index.entry(next).or_insert_with(|| {
                    nodes.push(next);
                    nodes.len() - 1
                });
                s.push(id);
            }
        }
        succ.push(s);
        hits.push(h);
        i += 1;
    }
    // acyclic: count paths in topological order
    let mut indeg = vec![0usize; nodes.len()];
    for s in &succ {
        for &j in s {
            indeg[j] += 1;
        }
    }
    let mut count = vec![0u8; nodes.len()];
    count[0] = 1;
    let mut queue: VecDeque<usize> = (0..nodes.len()).filter(|&j| indeg[j] == 0).collect();
    let mut out: HashMap<SimplexId, u8> = HashMap::new();
    while let Some(j) = queue.pop_front() {
        let c = count[j];
        if c > 0 {
            for &e in &hits[j] {
                let slot = out.entry(e).or_insert(0);
                *slot = (*slot + c).min(2);
            }
        }
        for &k in &succ[j] {
            count[k] = (count[k] + c).min(2);
            indeg[k] -= 1;
            if indeg[k] == 0 {
                queue.push_back(k);
            }
        }
    }
    out
}

/// Triangle-edge path from `start` to `target`, assuming it is unique.
fn edge_path(g: &DiscreteGradient, start: SimplexId, target: SimplexId) -> Option<Vec<(SimplexId, SimplexId)>> {
    // depth-first with parent links; uniqueness makes the first hit the path
    let tri = g.triangulation();
    let mut parent: HashMap<SimplexId, (SimplexId, SimplexId)> = HashMap::new();
    let mut stack = vec![start];
    let mut seen = std::collections::HashSet::new();
    seen.insert(start);
    while let Some(t) = stack.pop() {
        for f in tri.facets(t) {
            if f == target {
                let mut steps = vec![(f, t)];
                let mut cur = t;
                while cur != start {
                    let (edge, prev) = parent[&cur];
                    steps.push((edge, prev));
                    cur = prev;
                }
                steps.reverse();
                return Some(steps);
            }
            if let Some(next) = g.head_of(f) {
                if next != t && seen.insert(next) {
                    parent.insert(next, (f, t));
                    stack.push(next);
                }
            }
        }
    }
    None
}

/// Iteratively reverses the unique v-path between a critical triangle and a
/// critical edge whose values differ by less than `delta`, smallest
/// difference first. Pairs joined by several v-paths are skipped. Returns the
/// number of reversals.
pub fn cancel_saddle_saddle(g: &mut DiscreteGradient, grid: &ScalarGrid, order: &VertexOrder, delta: f64) -> usize {
    if !(delta > 0.0) {
        return 0;
    }
    let mut reversals = 0;
    loop {
        let mut edges: Vec<(f64, SimplexId)> = g
            .critical_of_dim(1)
            .map(|e| (simplex_value(grid, order, e), e))
            .collect();
        edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let triangles: Vec<(f64, SimplexId)> = g
            .critical_of_dim(2)
            .map(|t| (simplex_value(grid, order, t), t))
            .collect();

        let mut best: Option<(f64, SimplexId, SimplexId)> = None;
        for &(tv, t) in &triangles {
            // skip triangles with no critical edge in the value window
            let lo = edges.partition_point(|(v, _)| *v <= tv - delta);
            let hi = edges.partition_point(|(v, _)| *v < tv + delta);
            if lo >= hi {
                continue;
            }
            for (e, n) in edge_path_counts(g, t) {
                if n != 1 {
                    continue;
                }
                let diff = (tv - simplex_value(grid, order, e)).abs();
                if diff >= delta {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bd, bt, be)) => diff.total_cmp(&bd).then(t.cmp(&bt)).then(e.cmp(&be)).is_lt(),
                };
                if better {
                    best = Some((diff, t, e));
                }
            }
        }
        let Some((_, t, e)) = best else { break };
        let path = edge_path(g, t, e).expect("counted path exists");
        // (edge, triangle above it) along the path; shift the pairing by one
        for (edge, tri_above) in path {
            g.pair(edge, tri_above);
        }
        reversals += 1;
    }
    reversals
}
