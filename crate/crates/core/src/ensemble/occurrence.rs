use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{induce_arc_map, optimal_assignment, EnsembleError, NodeAssignment, PartialIsomorphism};
use crate::bondgraph::{indicators, BondClass, BondGraph, BondIndicators};
use crate::extgraph::ExtremumGraph;

/// Matching of the reference graph against one member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberMatch {
    pub member: usize,
    pub source_id: String,
    pub assignment: NodeAssignment,
    pub isomorphism: PartialIsomorphism,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedMember {
    pub member: usize,
    pub source_id: String,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceReport {
    pub reference: usize,
    /// Members taking part, reference included.
    pub members: usize,
    /// Per reference arc: members in which it is matched, itself included.
    pub counts: Vec<usize>,
    pub rates: Vec<f64>,
    pub stable: Vec<bool>,
    pub excluded: Vec<ExcludedMember>,
    pub matches: Vec<MemberMatch>,
}

/// Bond occurrence rate of every arc of `graphs[reference]`.
///
/// Members whose node count differs from the reference are an error, or are
/// skipped and listed in `excluded` when `permissive` is set.
pub fn occurrence_rates(
    graphs: &[ExtremumGraph],
    reference: usize,
    permissive: bool,
) -> Result<OccurrenceReport, EnsembleError> {
    if graphs.is_empty() {
        return Err(EnsembleError::Empty);
    }
    let refg = graphs.get(reference).ok_or(EnsembleError::BadReference {
        reference,
        members: graphs.len(),
    })?;
    let expected = refg.nodes.len();
    let mut excluded = Vec::new();
    let mut included = Vec::new();
    for (j, g) in graphs.iter().enumerate() {
        if g.nodes.len() == expected {
            included.push(j);
        } else if permissive {
            log::warn!(
                "member {j} ({}) has {} nodes instead of {expected}, excluded",
                g.source_id,
                g.nodes.len()
            );
            excluded.push(ExcludedMember {
                member: j,
                source_id: g.source_id.clone(),
                nodes: g.nodes.len(),
            });
        } else {
            return Err(EnsembleError::MemberSizeMismatch {
                member: j,
                reference,
                expected,
                found: g.nodes.len(),
            });
        }
    }

    let ref_pos: Vec<[f64; 3]> = refg.nodes.iter().map(|n| n.position).collect();
    let matches: Vec<MemberMatch> = included
        .par_iter()
        .map(|&j| {
            let g = &graphs[j];
            let assignment = if j == reference {
                NodeAssignment::identity(expected)
            } else {
                let pos: Vec<[f64; 3]> = g.nodes.iter().map(|n| n.position).collect();
                optimal_assignment(&ref_pos, &pos).expect("sizes checked")
            };
            let isomorphism = induce_arc_map(&assignment, &refg.arcs, &g.arcs);
            MemberMatch {
                member: j,
                source_id: g.source_id.clone(),
                assignment,
                isomorphism,
            }
        })
        .collect();

    let mut counts = vec![0usize; refg.arcs.len()];
    for m in &matches {
        for (a, hit) in m.isomorphism.arc_map.iter().enumerate() {
            if hit.is_some() {
                counts[a] += 1;
            }
        }
    }
    let n = included.len();
    let rates: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(OccurrenceReport {
        reference,
        members: n,
        stable: counts.iter().map(|&c| c == n).collect(),
        counts,
        rates,
        excluded,
        matches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub arc: usize,
    pub class: BondClass,
    pub rate: f64,
    pub stable: bool,
    pub indicators: Option<BondIndicators>,
}

/// One row per bond of the reference (covalent, hydrogen or misconnected),
/// by increasing rate then arc index.
pub fn stability_report(report: &OccurrenceReport, bg: &BondGraph) -> Vec<StabilityRow> {
    let mut rows: Vec<StabilityRow> = bg
        .bonds()
        .map(|arc| StabilityRow {
            arc,
            class: bg.labels[arc].class,
            rate: report.rates[arc],
            stable: report.stable[arc],
            indicators: indicators(bg, arc).ok(),
        })
        .collect();
    rows.sort_by(|a, b| a.rate.total_cmp(&b.rate).then(a.arc.cmp(&b.arc)));
    rows
}
