//! Sub-linear rank formulas and the rank-one spherical-integral cross-check.

#[allow(unused_imports)]
use num_traits::Float;

use super::linear::log_energy;
use crate::error::{invalid, Result};
use crate::measures::{cauchy_at_edge, cauchy_transform, log_potential, SpectralMeasure};
use crate::numerics::bisect;

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma must be positive"));
    }
    Ok(())
}

/// Limiting per-spike MSE of the sub-linear RIE under Wigner noise.
pub fn sublinear_rie_mse_wigner(rho_s: &SpectralMeasure, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let cut = 1.0 / gamma.sqrt();
    rho_s.integrate(|x| {
        let kept = if x.abs() >= cut { (x - 1.0 / (gamma * x)).powi(2) } else { 0.0 };
        x * x - kept
    })
}

/// Same quantity when the noise spectrum is uniform on `[1, 2]`.
pub fn sublinear_rie_mse_uniform_noise(rho_s: &SpectralMeasure, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if rho_s.hull().lo <= 0.0 {
        return Err(invalid("signal eigenvalues must be positive"));
    }
    rho_s.integrate(|x| {
        let t = 1.0 / (2.0 * gamma.sqrt() * x);
        let csch = 1.0 / t.sinh();
        x * x - csch.powi(4) / (16.0 * gamma * gamma * x * x)
    })
}

/// Husson's rank-one spherical-integral rate function, positive `theta`.
pub fn husson_k(theta: f64, lambda: f64, mu: &SpectralMeasure) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(invalid("theta must be positive"));
    }
    let r = mu.hull().hi;
    let lp = lambda.max(r);
    let g = |z: f64| if z <= r { cauchy_at_edge(mu, r) } else { cauchy_transform(mu, z) };
    let g_lp = g(lp)?;
    let v = if (0.0..=theta).contains(&g_lp) {
        lp
    } else {
        // G decreases from G(lp) > theta to 0 on (lp, inf).
        let mut hi = lp + 1.0 / theta + 1.0;
        while g(hi)? > theta {
            hi = lp + 2.0 * (hi - lp);
        }
        let mut failure = None;
        let v = bisect(
            |z| match g(z) {
                Ok(val) => val - theta,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            lp,
            hi,
            1e-14,
            200,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        v
    };
    let gv = if v == lp { g_lp } else { theta };
    Ok(theta * lp + (v - lp) * gv - theta.ln() - log_potential(mu, v)? - 1.0)
}

/// Sub-linear MI `(gamma/2) int x^2 rho_S - (1/2) E K(sqrt(gamma) x, h, rho_sc)`,
/// with `h(t)` the limiting top eigenvalue of `Y` for a spike `t`.
pub fn sublinear_mi_spherical(rho_s: &SpectralMeasure, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if rho_s.hull().lo <= 0.0 {
        return Err(invalid("signal eigenvalues must be positive"));
    }
    let sc = SpectralMeasure::semicircle(1.0)?;
    let mut failure = None;
    let expected_k = rho_s.integrate(|x| {
        let t = gamma.sqrt() * x;
        let h = if t <= 1.0 { 2.0 } else { t + 1.0 / t };
        match husson_k(t, h, &sc) {
            Ok(k) => k,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(0.5 * gamma * rho_s.moment(2)? - 0.5 * expected_k)
}

/// Mutual information of the smoothed ARIN model.
pub fn arin_mi(rho_y_eps: &SpectralMeasure, rho_z_eps: &SpectralMeasure) -> Result<f64> {
    Ok(0.5 * log_energy(rho_y_eps)? - 0.5 * log_energy(rho_z_eps)?)
}
