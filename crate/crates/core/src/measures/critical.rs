use crate::error::{invalid, Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Spectral priors with a closed-form critical signal-to-noise ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorKind {
    Rademacher,
    Bernoulli { p: f64 },
    MarchenkoPastur { q: f64 },
}

/// SNR at which the support of `rho_Y` splits into two intervals.
pub fn critical_gamma(kind: PriorKind) -> Result<f64> {
    match kind {
        PriorKind::Rademacher => Ok(1.0),
        PriorKind::Bernoulli { p } => {
            if !(p > 0.0 && p < 1.0) {
                return Err(invalid("p must lie in (0, 1)"));
            }
            Ok(1.0 + 3.0 * (p * p * (1.0 - p)).cbrt() + 3.0 * (p * (1.0 - p) * (1.0 - p)).cbrt())
        }
        PriorKind::MarchenkoPastur { q } => {
            if !(q > 0.0) {
                return Err(invalid("q must be positive"));
            }
            if q <= 1.0 {
                return Err(Error::NoTransition("support stays connected for q <= 1".into()));
            }
            Ok(q / (q.cbrt() - 1.0).powi(3))
        }
    }
}
