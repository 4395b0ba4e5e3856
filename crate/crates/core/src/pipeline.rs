//! Single-field analysis: density in, bond graph out.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bondgraph::{classify, BondError, BondGraph, ClassifyConfig};
use crate::extgraph::{build_extremum_graph, ExtremumGraph};
use crate::grid::{ScalarGrid, VertexOrder};
use crate::morse::{
    cancel_saddle_saddle, compute_gradient, min_saddle_persistence, simplify_minima, MinimaSimplification,
    MorseError, DEFAULT_DELTA, DEFAULT_EPSILON,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every knob of a run. Serialized into each output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub oxygen_cut: f64,
    pub covalent_cut: f64,
    pub target_min_count: Option<usize>,
    pub reference_index: Option<usize>,
    pub permissive_counts: bool,
    pub threads: Option<usize>,
    pub output_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = ClassifyConfig::default();
        Self {
            epsilon: DEFAULT_EPSILON,
            delta: DEFAULT_DELTA,
            oxygen_cut: c.oxygen_cut,
            covalent_cut: c.covalent_cut,
            target_min_count: None,
            reference_index: None,
            permissive_counts: false,
            threads: None,
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn classify_config(&self) -> ClassifyConfig {
        ClassifyConfig {
            oxygen_cut: self.oxygen_cut,
            covalent_cut: self.covalent_cut,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Bond(#[from] BondError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub simplification: MinimaSimplification,
    pub saddle_reversals: usize,
    /// Critical simplices per dimension after simplification.
    pub critical_counts: Vec<usize>,
    pub bonds: BondGraph,
}

impl Analysis {
    pub fn graph(&self) -> &ExtremumGraph {
        &self.bonds.graph
    }
}

/// Runs the full chain on a density `rho` (atoms are maxima): negate, order,
/// gradient, minima and saddle-saddle simplification, extremum graph,
/// classification.
pub fn analyze(rho: &ScalarGrid, source_id: &str, cfg: &RunConfig) -> Result<Analysis, PipelineError> {
    let classify_cfg = cfg.classify_config();
    classify_cfg.validate()?;
    let field = rho.negate();
    let order = VertexOrder::new(&field);
    let mut g = compute_gradient(&field, &order);
    let pairs = min_saddle_persistence(&field, &order);
    let simplification = simplify_minima(&mut g, &order, &pairs, cfg.epsilon, cfg.target_min_count)?;
    let saddle_reversals = cancel_saddle_saddle(&mut g, &field, &order, cfg.delta);
    let graph = build_extremum_graph(&g, &field, &order, source_id);
    let bonds = classify(&graph, &classify_cfg)?;
    Ok(Analysis {
        simplification,
        saddle_reversals,
        critical_counts: g.critical_counts(),
        bonds,
    })
}
