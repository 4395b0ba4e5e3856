//! Matching extremum graphs across an ensemble and measuring how often each
//! arc of a reference graph reappears.

mod assignment;
mod isomorphism;
mod occurrence;

use thiserror::Error;

pub use assignment::{distance, optimal_assignment, solve_assignment, NodeAssignment};
pub use isomorphism::{induce_arc_map, PartialIsomorphism};
pub use occurrence::{
    occurrence_rates, stability_report, ExcludedMember, MemberMatch, OccurrenceReport, StabilityRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("node counts differ: {left} against {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("member {member} has {found} nodes, reference {reference} has {expected}")]
    MemberSizeMismatch {
        member: usize,
        reference: usize,
        expected: usize,
        found: usize,
    },
    #[error("reference index {reference} out of range for {members} members")]
    BadReference { reference: usize, members: usize },
    #[error("empty ensemble")]
    Empty,
}
