use thiserror::Error;

use crate::envy::ImprovingCycle;

/// Errors shared by the solver layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Shapes of an instance and an assignment (or two assignments) disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A job cannot run anywhere: its cost column is infinite on every machine.
    #[error("infeasible: job {job} has no finite cost on any machine")]
    Infeasible { job: usize },

    /// No bundle-to-machine bijection with finite total cost exists.
    #[error("no finite-cost matching exists")]
    NoFiniteMatching,

    /// A machine's own load is infinite, so quasi-linear utilities (and hence
    /// payments) are undefined for the given assignment.
    #[error("machine {machine} has infinite load under its own bundle")]
    InfiniteLoad { machine: usize },

    /// Payments were requested for an assignment that admits an improving
    /// bundle rotation; the cycle is returned as a witness.
    #[error("assignment is not locally efficient: rotating bundles along machines {:?} lowers total cost", witness.machines)]
    NotLocallyEfficient { witness: Box<ImprovingCycle> },

    /// Exhaustive enumeration would exceed the configured state cap.
    #[error("enumeration of {states} assignments exceeds cap {cap}")]
    TooLarge { states: u128, cap: u64 },

    /// A precondition on caller-supplied data failed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
