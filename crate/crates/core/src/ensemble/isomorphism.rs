use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::NodeAssignment;
use crate::extgraph::Arc;

/// Arc correspondence induced by a node assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialIsomorphism {
    /// `arc_map[a]` is the arc of the second graph matched to arc `a`.
    pub arc_map: Vec<Option<usize>>,
    pub unmatched_i: Vec<usize>,
    pub unmatched_j: Vec<usize>,
}

impl PartialIsomorphism {
    pub fn is_total(&self) -> bool {
        self.unmatched_i.is_empty() && self.unmatched_j.is_empty()
    }

    pub fn matched_count(&self) -> usize {
        self.arc_map.iter().flatten().count()
    }
}

/// Matches arc `a` of the first graph to an arc of the second whose endpoints
/// are the images of `a`'s endpoints. Several arcs joining the same node pair
/// are paired in increasing saddle value; the surplus stays unmatched.
pub fn induce_arc_map(phi: &NodeAssignment, ai: &[Arc], aj: &[Arc]) -> PartialIsomorphism {
    let mut groups: BTreeMap<[usize; 2], (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (k, arc) in ai.iter().enumerate() {
        let [a, b] = arc.endpoints;
        if let (Some(&x), Some(&y)) = (phi.map.get(a), phi.map.get(b)) {
            groups.entry([x.min(y), x.max(y)]).or_default().0.push(k);
        }
    }
    for (k, arc) in aj.iter().enumerate() {
        let [a, b] = arc.endpoints;
        groups.entry([a.min(b), a.max(b)]).or_default().1.push(k);
    }
    let by_value = |arcs: &[Arc], list: &mut Vec<usize>| {
        list.sort_by(|&x, &y| arcs[x].saddle_value.total_cmp(&arcs[y].saddle_value).then(x.cmp(&y)));
    };
    let mut arc_map = vec![None; ai.len()];
    let mut hit_j = vec![false; aj.len()];
    for (_, (mut li, mut lj)) in groups {
        by_value(ai, &mut li);
        by_value(aj, &mut lj);
        for (&x, &y) in li.iter().zip(&lj) {
            arc_map[x] = Some(y);
            hit_j[y] = true;
        }
    }
    PartialIsomorphism {
        unmatched_i: (0..ai.len()).filter(|&k| arc_map[k].is_none()).collect(),
        unmatched_j: (0..aj.len()).filter(|&k| !hit_j[k]).collect(),
        arc_map,
    }
}
