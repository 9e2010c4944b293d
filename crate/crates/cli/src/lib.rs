//! Experiment harness, file formats and LAPACK backend for `mdenoise-core`.

pub mod backend;
pub mod curves;
pub mod denoise;
pub mod experiment;
pub mod io;
pub mod specs;
pub mod spectrum;

use mdenoise_core::Error;

/// Input rejected before any numerics ran.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidInput(pub String);

impl std::fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid input: {}", self.0)
    }
}

impl std::error::Error for InvalidInput {}

pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_INVALID: u8 = 3;

/// 2 for numerical failures, 3 for invalid input.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<InvalidInput>() || cause.is::<std::io::Error>() || cause.is::<csv::Error>() {
            return EXIT_INVALID;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidParameter(_)
                | Error::Domain(_)
                | Error::DimensionMismatch(_)
                | Error::NoTransition(_) => EXIT_INVALID,
                Error::Accuracy { .. } | Error::Convergence(_) | Error::Divergence { .. } | Error::Internal(_) => {
                    EXIT_NUMERICAL
                }
            };
        }
    }
    EXIT_NUMERICAL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let e: anyhow::Error = Error::Divergence { iteration: 3, spike: 1 }.into();
        assert_eq!(exit_code(&e), 2);
        let e: anyhow::Error = Error::InvalidParameter("x".into()).into();
        assert_eq!(exit_code(&e.context("while parsing")), 3);
        let e: anyhow::Error = InvalidInput("bad".into()).into();
        assert_eq!(exit_code(&e), 3);
    }
}
