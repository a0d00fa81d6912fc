use thiserror::Error;

use crate::Vector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("the origin lies in the body (distance {distance:e})")]
    ZeroInBody { distance: f64 },

    #[error("cone distance search could not be bracketed")]
    UnboundedSearch,

    #[error("every sample evaluates to +inf{}", level.map(|l| format!(" (level {l})")).unwrap_or_default())]
    AllInfinite { level: Option<usize> },

    #[error("f is +inf at the base point")]
    InfiniteBase,

    #[error("subdifferential axiom {axiom} violated at {probe:?}: {detail}")]
    AxiomViolation {
        axiom: &'static str,
        probe: Vec<f64>,
        detail: String,
    },

    #[error("no t-prefix of the quotient trace clears lambda = {lambda}")]
    ThresholdNotFound { lambda: f64 },

    #[error("growth inequality violated at {witness:?} (gap {gap:e})")]
    Violation { witness: Vec<f64>, gap: f64 },

    #[error("start point is not in the cloud")]
    StartNotInCloud,

    #[error("apex lies in the body")]
    ApexInBody,

    #[error("apex is not in the cloud")]
    ApexNotInCloud,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("no subgradient selection reaches |p+q| <= {eps:e} (best {achieved:e})")]
    ToleranceNotMet { eps: f64, achieved: f64 },

    #[error("no interior minimizer up to n = {n_max}")]
    ClaimFailed { n_max: u64 },

    #[error("condition failed: {0}")]
    ConditionFailed(String),
}

impl Error {
    pub(crate) fn check_dim(expected: usize, v: &Vector) -> Result<()> {
        if v.len() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: v.len(),
            })
        }
    }
}
