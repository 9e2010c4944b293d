use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, invalid, Result};
use crate::measures::{hilbert_transform, SpectralMeasure};
use crate::numerics::Quadrature;

fn require_continuous(m: &SpectralMeasure) -> Result<()> {
    if m.has_atoms() || m.density().is_none() {
        return Err(domain("measure must be absolutely continuous"));
    }
    Ok(())
}

/// `int int ln|s - t| rho(s) rho(t) ds dt`.
pub fn log_energy(m: &SpectralMeasure) -> Result<f64> {
    require_continuous(m)?;
    let inner = Quadrature::with_rel_tol(1e-10).abs_tol(1e-14);
    let outer = Quadrature::with_rel_tol(1e-8).abs_tol(1e-13);
    let mut failure = None;
    let total = m.integrate_with(&outer, |s| match crate::measures::log_potential_with(m, s, &inner) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// `int rho^3 dx`, integrated against the measure itself.
pub fn cube_integral(m: &SpectralMeasure) -> Result<f64> {
    require_continuous(m)?;
    let d = m.density().unwrap().clone();
    m.integrate_with(&Quadrature::with_rel_tol(1e-11).abs_tol(1e-15), |x| d.eval(x).powi(2))
}

/// `(1/gamma) (1 - (4 pi^2 / 3) int rho_Y^3)`.
pub fn mmse_linear(rho_y: &SpectralMeasure, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(invalid("gamma must be positive"));
    }
    Ok((1.0 - 4.0 * PI * PI / 3.0 * cube_integral(rho_y)?) / gamma)
}

/// Asymptotic `I(S; Y) / N^2`.
pub fn mi_linear(rho_y: &SpectralMeasure) -> Result<f64> {
    Ok(0.5 * log_energy(rho_y)? + 0.125)
}

/// Voiculescu's free entropy.
pub fn free_entropy(m: &SpectralMeasure) -> Result<f64> {
    Ok(log_energy(m)? + 0.75 + 0.5 * (2.0 * PI).ln())
}

/// Free Fisher information `(4 pi^2 / 3) int rho^3`.
///
/// Each support interval is mapped through `x = c - r cos(t)`, which flattens
/// square-root edges; this is deliberately a different rule from
/// [`cube_integral`].
pub fn free_fisher(m: &SpectralMeasure) -> Result<f64> {
    require_continuous(m)?;
    let d = m.density().unwrap().clone();
    let q = Quadrature::with_rel_tol(1e-11).abs_tol(1e-15);
    let mut s = 0.0;
    for iv in m.support() {
        let (c, r) = (0.5 * (iv.lo + iv.hi), 0.5 * (iv.hi - iv.lo));
        s += q.integrate(|t| d.eval(c - r * t.cos()).powi(3) * r * t.sin(), 0.0, PI)?;
    }
    Ok(4.0 * PI * PI / 3.0 * s)
}

/// Both sides of the two Hilbert-transform identities
/// `int f H[f]^2 = (1/3) int f^3` and `int H[f] x f = (int f)^2 / (2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilbertIdentities {
    pub cubic_lhs: f64,
    pub cubic_rhs: f64,
    pub moment_lhs: f64,
    pub moment_rhs: f64,
}

pub fn hilbert_identities(m: &SpectralMeasure) -> Result<HilbertIdentities> {
    require_continuous(m)?;
    let q = Quadrature::with_rel_tol(1e-9).abs_tol(1e-13);
    let mut failure = None;
    let mut h = |x: f64| match hilbert_transform(m, x) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let cubic_lhs = m.integrate_with(&q, |x| h(x).powi(2))?;
    let moment_lhs = m.integrate_with(&q, |x| h(x) * x)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(HilbertIdentities {
        cubic_lhs,
        cubic_rhs: cube_integral(m)? / 3.0,
        moment_lhs,
        moment_rhs: m.mass()?.powi(2) / (2.0 * PI),
    })
}
