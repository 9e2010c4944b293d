use alloc::string::String;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not reach tolerance (estimate {estimate}, error {error})")]
    Accuracy { estimate: f64, error: f64 },
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("divergence at iteration {iteration} (spike {spike})")]
    Divergence { iteration: usize, spike: usize },
    #[error("no transition: {0}")]
    NoTransition(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
