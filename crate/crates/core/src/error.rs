use thiserror::Error;

use crate::numerics::NumericsError;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("argument outside the operation's domain: {0}")]
    Domain(String),
    #[error("instance is infeasible: {0}")]
    Infeasible(String),
    #[error("degenerate null space: {0}")]
    Degenerate(String),
    #[error("iteration did not converge after {iterations} iterations; trace {trace:?}")]
    NotConverged { iterations: usize, trace: Vec<f64> },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = SolveError> = std::result::Result<T, E>;
