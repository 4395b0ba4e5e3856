//! Report writers. Every file carries the tool version and the full run
//! configuration; output is a pure function of its inputs.

use std::io::{self, Write};

use serde::Serialize;

use crate::bondgraph::{indicators, AtomClass, BondClass, BondGraph, BondIndicators};
use crate::ensemble::{MemberMatch, NodeAssignment, OccurrenceReport, PartialIsomorphism, StabilityRow};
use crate::morse::MinimaSimplification;
use crate::pipeline::{Analysis, RunConfig, VERSION};

pub const TOOL: &str = "bondmatcher";

pub const OCCURRENCE_COLUMNS: [&str; 8] = [
    "reference_id",
    "arc_id",
    "bond_class",
    "rate",
    "stable",
    "bcp_density",
    "length_A",
    "angle_deg",
];

pub const INDICATOR_COLUMNS: [&str; 10] = [
    "arc_id",
    "node_a",
    "node_b",
    "bond_class",
    "saddle_value",
    "bcp_density",
    "length_A",
    "angle_deg",
    "near_breaking",
    "loop",
];

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
}

impl<'a> Header<'a> {
    fn new(config: &'a RunConfig) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            config,
        }
    }
}

#[derive(Serialize)]
struct NodeOut {
    index: usize,
    position: [f64; 3],
    value: f64,
    atom: AtomClass,
}

#[derive(Serialize)]
struct ArcOut<'a> {
    index: usize,
    endpoints: [usize; 2],
    saddle_value: f64,
    saddle_position: [f64; 3],
    #[serde(rename = "loop")]
    is_loop: bool,
    class: BondClass,
    hydrogen: Option<usize>,
    donor: Option<usize>,
    acceptor: Option<usize>,
    indicators: Option<BondIndicators>,
    geometry: &'a [[f64; 3]],
}

#[derive(Serialize)]
struct BondGraphDoc<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    source_id: &'a str,
    simplification: &'a MinimaSimplification,
    saddle_reversals: usize,
    critical_counts: &'a [usize],
    node_count: usize,
    arc_count: usize,
    class_counts: ClassCounts,
    nodes: Vec<NodeOut>,
    arcs: Vec<ArcOut<'a>>,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct ClassCounts {
    covalent: usize,
    hydrogen_bond: usize,
    misconnected: usize,
    unclassified: usize,
}

fn class_counts(bg: &BondGraph) -> ClassCounts {
    ClassCounts {
        covalent: bg.count(BondClass::Covalent),
        hydrogen_bond: bg.count(BondClass::HydrogenBond),
        misconnected: bg.count(BondClass::Misconnected),
        unclassified: bg.count(BondClass::Unclassified),
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("plain data serializes");
    s.push('\n');
    s
}

/// Bond graph of one field as pretty JSON.
pub fn bond_graph_json(analysis: &Analysis, config: &RunConfig) -> String {
    let bg = &analysis.bonds;
    let g = &bg.graph;
    let nodes = g
        .nodes
        .iter()
        .zip(&bg.atoms)
        .enumerate()
        .map(|(index, (n, &atom))| NodeOut {
            index,
            position: n.position,
            value: n.value,
            atom,
        })
        .collect();
    let arcs = g
        .arcs
        .iter()
        .zip(&bg.labels)
        .enumerate()
        .map(|(index, (a, l))| ArcOut {
            index,
            endpoints: a.endpoints,
            saddle_value: a.saddle_value,
            saddle_position: a.saddle_position,
            is_loop: a.is_loop,
            class: l.class,
            hydrogen: l.hydrogen,
            donor: l.donor,
            acceptor: l.acceptor,
            indicators: indicators(bg, index).ok(),
            geometry: &a.geometry,
        })
        .collect();
    to_json(&BondGraphDoc {
        header: Header::new(config),
        source_id: &g.source_id,
        simplification: &analysis.simplification,
        saddle_reversals: analysis.saddle_reversals,
        critical_counts: &analysis.critical_counts,
        node_count: g.nodes.len(),
        arc_count: g.arcs.len(),
        class_counts: class_counts(bg),
        nodes,
        arcs,
        warnings: &bg.warnings,
    })
}

fn comment_header(w: &mut impl Write, config: &RunConfig) -> io::Result<()> {
    writeln!(w, "# {TOOL} {VERSION}")?;
    writeln!(w, "# config {}", serde_json::to_string(config).expect("plain data serializes"))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Nodes as points, arcs as polylines. Objects are named `node_<i>` and
/// `arc_<i>_<class>`.
pub fn write_obj(w: &mut impl Write, bg: &BondGraph, config: &RunConfig) -> io::Result<()> {
    comment_header(w, config)?;
    let g = &bg.graph;
    writeln!(w, "# source {}", g.source_id)?;
    let mut next = 1usize;
    for (i, n) in g.nodes.iter().enumerate() {
        writeln!(w, "o node_{i}")?;
        let [x, y, z] = n.position;
        writeln!(w, "v {x} {y} {z}")?;
        writeln!(w, "p {next}")?;
        next += 1;
    }
    for (i, (a, l)) in g.arcs.iter().zip(&bg.labels).enumerate() {
        writeln!(w, "o arc_{i}_{}", l.class.as_str())?;
        for [x, y, z] in &a.geometry {
            writeln!(w, "v {x} {y} {z}")?;
        }
        if a.geometry.len() >= 2 {
            let idx: Vec<String> = (next..next + a.geometry.len()).map(|k| k.to_string()).collect();
            writeln!(w, "l {}", idx.join(" "))?;
        }
        next += a.geometry.len();
    }
    Ok(())
}

/// One row per arc with its class and, for hydrogen bonds, the geometric
/// indicators.
pub fn write_indicator_csv(w: &mut impl Write, bg: &BondGraph, config: &RunConfig) -> io::Result<()> {
    comment_header(w, config)?;
    writeln!(w, "# source {}", bg.graph.source_id)?;
    writeln!(w, "{}", INDICATOR_COLUMNS.join(","))?;
    for (i, (a, l)) in bg.graph.arcs.iter().zip(&bg.labels).enumerate() {
        let ind = indicators(bg, i).ok();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            i,
            a.endpoints[0],
            a.endpoints[1],
            l.class.as_str(),
            a.saddle_value,
            opt(ind.map(|x| x.bcp_density)),
            opt(ind.map(|x| x.length)),
            opt(ind.and_then(|x| x.angle)),
            ind.map(|x| x.near_breaking.to_string()).unwrap_or_default(),
            a.is_loop,
        )?;
    }
    Ok(())
}

/// Per-arc occurrence rates of the reference graph.
pub fn write_occurrence_csv(
    w: &mut impl Write,
    report: &OccurrenceReport,
    reference: &BondGraph,
    config: &RunConfig,
) -> io::Result<()> {
    comment_header(w, config)?;
    writeln!(w, "# members {}", report.members)?;
    writeln!(w, "{}", OCCURRENCE_COLUMNS.join(","))?;
    let id = &reference.graph.source_id;
    for (i, l) in reference.labels.iter().enumerate() {
        let ind = indicators(reference, i).ok();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            id,
            i,
            l.class.as_str(),
            report.rates[i],
            report.stable[i],
            opt(ind.map(|x| x.bcp_density)),
            opt(ind.map(|x| x.length)),
            opt(ind.and_then(|x| x.angle)),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct OccurrenceDoc<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    reference_id: &'a str,
    sources: &'a [String],
    reference: usize,
    members: usize,
    counts: &'a [usize],
    rates: &'a [f64],
    stable: &'a [bool],
    unstable_bonds: usize,
    stability: Vec<StabilityRow>,
    excluded: &'a [crate::ensemble::ExcludedMember],
    matches: &'a [MemberMatch],
}

/// Full ensemble report: rates, the stability table and every member's
/// node assignment and arc map.
pub fn occurrence_json(
    report: &OccurrenceReport,
    reference: &BondGraph,
    sources: &[String],
    config: &RunConfig,
) -> String {
    let stability = crate::ensemble::stability_report(report, reference);
    to_json(&OccurrenceDoc {
        header: Header::new(config),
        reference_id: &reference.graph.source_id,
        sources,
        reference: report.reference,
        members: report.members,
        counts: &report.counts,
        rates: &report.rates,
        stable: &report.stable,
        unstable_bonds: unstable_bonds(report, reference),
        stability,
        excluded: &report.excluded,
        matches: &report.matches,
    })
}

/// Covalent and hydrogen bonds of the reference whose rate is below one.
pub fn unstable_bonds(report: &OccurrenceReport, reference: &BondGraph) -> usize {
    reference
        .labels
        .iter()
        .zip(&report.stable)
        .filter(|(l, &s)| !s && matches!(l.class, BondClass::Covalent | BondClass::HydrogenBond))
        .count()
}

#[derive(Serialize)]
struct MatchDoc<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    source_a: &'a str,
    source_b: &'a str,
    nodes: usize,
    arcs_a: usize,
    arcs_b: usize,
    total: bool,
    assignment: &'a NodeAssignment,
    isomorphism: &'a PartialIsomorphism,
}

/// Node assignment and induced arc map between two graphs.
pub fn match_json(
    a: &BondGraph,
    b: &BondGraph,
    assignment: &NodeAssignment,
    isomorphism: &PartialIsomorphism,
    config: &RunConfig,
) -> String {
    to_json(&MatchDoc {
        header: Header::new(config),
        source_a: &a.graph.source_id,
        source_b: &b.graph.source_id,
        nodes: a.graph.nodes.len(),
        arcs_a: a.graph.arcs.len(),
        arcs_b: b.graph.arcs.len(),
        total: isomorphism.is_total(),
        assignment,
        isomorphism,
    })
}
