//! Discrete Bayesian networks with exact inference.
//!
//! A [`Network`] is built once from [`NodeSpec`]s and is immutable
//! afterwards. Posterior queries run variable elimination
//! ([`query_posteriors`]); [`brute_force_joint`] enumerates the full joint and
//! exists to cross-check the elimination path.

mod evidence;
mod factor;
mod inference;
mod network;
mod oracle;
mod report;
mod sampling;
mod state;

pub use evidence::{Evidence, Finding};
pub use inference::{
    evidence_probability, joint_posterior, query_posteriors, query_posteriors_with, EliminationOrder,
    InferenceOptions, JointPosterior,
};
pub use network::{Network, Node, NodeKind, NodeSpec};
pub use oracle::{brute_force_joint, brute_force_joint_with_cap, JointTable, DEFAULT_JOINT_CAP};
pub use report::{interval_expectation, NodePosterior, PosteriorReport};
pub use sampling::ancestral_sample;
pub use state::{default_count_intervals, Interval, StateSpace, DEFAULT_TAIL_FACTOR, RANKED_LABELS};

pub(crate) use evidence::Resolved;

use thiserror::Error;

use crate::cpd::CpdError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BnError {
    #[error("duplicate node id '{0}'")]
    DuplicateNode(String),
    #[error("node '{node}' has unknown parent '{parent}'")]
    UnknownParent { node: String, parent: String },
    #[error("cycle detected through node '{0}'")]
    CycleDetected(String),
    #[error("node '{node}': CPD shape mismatch: {detail}")]
    CpdShapeMismatch { node: String, detail: String },
    #[error("node '{node}': row {row} is not normalized (sum {sum})")]
    RowNotNormalized { node: String, row: usize, sum: f64 },
    #[error("node '{node}': {source}")]
    Cpd { node: String, source: CpdError },
    #[error("invalid state space: {0}")]
    InvalidStateSpace(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("node '{node}' has no state '{state}'")]
    UnknownState { node: String, state: String },
    #[error("invalid evidence on '{node}': {detail}")]
    InvalidEvidence { node: String, detail: String },
    #[error("evidence has zero probability")]
    ZeroProbabilityEvidence,
    #[error("joint table would have {entries} entries, cap is {cap}")]
    TooLarge { entries: u128, cap: usize },
    #[error("node '{0}' has no numeric intervals")]
    NotAnIntervalNode(String),
}

impl BnError {
    pub(crate) fn from_cpd(node: &str, err: CpdError) -> Self {
        match err {
            CpdError::ShapeMismatch(detail) => BnError::CpdShapeMismatch { node: node.to_string(), detail },
            other => BnError::Cpd { node: node.to_string(), source: other },
        }
    }

    /// Node the error refers to, when there is one.
    pub fn node(&self) -> Option<&str> {
        match self {
            BnError::DuplicateNode(n)
            | BnError::CycleDetected(n)
            | BnError::UnknownNode(n)
            | BnError::NotAnIntervalNode(n) => Some(n),
            BnError::UnknownParent { node, .. }
            | BnError::CpdShapeMismatch { node, .. }
            | BnError::RowNotNormalized { node, .. }
            | BnError::Cpd { node, .. }
            | BnError::UnknownState { node, .. }
            | BnError::InvalidEvidence { node, .. } => Some(node),
            _ => None,
        }
    }
}
