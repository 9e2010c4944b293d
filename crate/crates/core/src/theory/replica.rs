use alloc::format;
use alloc::vec::Vec;

use super::scalar::{scalar_mi, scalar_mmse, ScalarPrior};
use crate::error::{invalid, Error, Result};

const DAMPING: f64 = 0.5;
const MAX_ITERATIONS: usize = 10_000;
const STEP_TOL: f64 = 1e-14;
const STARTS: usize = 64;
const TIE_TOL: f64 = 1e-9;

/// Global minimizer of the rank-one variational problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaSolution {
    pub gamma: f64,
    pub sigma_star: f64,
    pub mi: f64,
    pub mmse: f64,
    pub fixed_point_iterations: usize,
    /// Another fixed point reaches the same functional value within `1e-9`.
    pub near_tie: bool,
}

/// `(gamma / 4) (sigma - rho)^2 + I(X; sqrt(gamma sigma) X + Z)`.
pub fn replica_functional(prior: &ScalarPrior, gamma: f64, sigma: f64) -> Result<f64> {
    let rho = prior.variance();
    Ok(0.25 * gamma * (sigma - rho).powi(2) + scalar_mi(prior, gamma * sigma)?)
}

fn iterate(prior: &ScalarPrior, gamma: f64, start: f64) -> Result<(f64, usize)> {
    let rho = prior.variance();
    let mut sigma = start;
    for k in 1..=MAX_ITERATIONS {
        let target = rho - scalar_mmse(prior, gamma * sigma)?;
        let next = ((1.0 - DAMPING) * sigma + DAMPING * target).clamp(0.0, rho);
        if (next - sigma).abs() <= STEP_TOL * rho.max(1.0) {
            return Ok((next, k));
        }
        sigma = next;
    }
    Err(Error::Convergence(format!(
        "replica fixed point from sigma0 = {start} did not settle in {MAX_ITERATIONS} iterations at gamma = {gamma}"
    )))
}

/// Solves `inf_sigma {(gamma/4)(sigma - rho)^2 + I(X; sqrt(gamma sigma) X + Z)}`
/// by damped fixed-point iteration from `sigma0 = rho` and 64 further starts.
pub fn rank_one_replica(prior: &ScalarPrior, gamma: f64) -> Result<ReplicaSolution> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma must be positive"));
    }
    let rho = prior.variance();
    let starts = core::iter::once(rho).chain((0..STARTS).map(|i| rho * i as f64 / (STARTS - 1) as f64));
    let mut found: Vec<(f64, f64, usize)> = Vec::new();
    for s0 in starts {
        let (sigma, its) = iterate(prior, gamma, s0)?;
        if found.iter().any(|&(s, _, _)| (s - sigma).abs() <= 1e-9) {
            continue;
        }
        found.push((sigma, replica_functional(prior, gamma, sigma)?, its));
    }
    let best = found.iter().cloned().fold(None::<(f64, f64, usize)>, |acc, c| match acc {
        Some(a) if a.1 <= c.1 => Some(a),
        _ => Some(c),
    });
    let (sigma, mi, its) = best.ok_or_else(|| Error::Internal("no fixed point".into()))?;
    let near_tie = found.iter().any(|&(s, f, _)| (s - sigma).abs() > 1e-6 && (f - mi).abs() <= TIE_TOL);
    Ok(ReplicaSolution {
        gamma,
        sigma_star: sigma,
        mi,
        mmse: rho * rho - sigma * sigma,
        fixed_point_iterations: its,
        near_tie,
    })
}
