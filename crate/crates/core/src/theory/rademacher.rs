//! MMSE of the Rademacher-spectrum signal and its first two SNR derivatives.
//!
//! With `a = u^2` and `R = sqrt(1 + 16 gamma a)` the subordination functions
//! of `rho_Y` are `v^2 = W = (1 - 2a - 2 gamma + R) / 2` and
//! `psi'(u) = 2 - 4 gamma / (R (R + 1))`, so
//! `int rho_Y^3 dx = (2 / pi^3) int W^{3/2} psi' du` over `u >= 0`.
//! Differentiating under the integral sign is exact here because the
//! integrand and its first derivative vanish at the moving edges.

use alloc::format;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::Warned;
use crate::error::{invalid, Result};
use crate::numerics::{Panel, Quadrature};

/// Distance to `gamma = 1` below which results carry a warning.
pub const NEAR_CRITICAL: f64 = 1e-4;
/// Exactly at the transition the second-derivative integral diverges
/// logarithmically; it is replaced by the mean of both sides at this offset.
const CRITICAL_OFFSET: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmseExpansion {
    pub mmse: f64,
    pub first: f64,
    pub second: f64,
}

struct Roots {
    lo: f64,
    hi: f64,
    a_lo: f64,
    a_hi: f64,
}

fn roots(gamma: f64) -> Roots {
    let s = (1.0 + 8.0 * gamma).sqrt();
    let a_hi = 0.5 * (1.0 + 2.0 * gamma + s);
    let a_lo = (gamma * gamma - gamma) / a_hi;
    Roots { lo: if a_lo > 0.0 { a_lo.sqrt() } else { 0.0 }, hi: a_hi.sqrt(), a_lo, a_hi }
}

/// `h, dh/dgamma, d^2h/dgamma^2` for `h = W^{3/2} psi'`.
fn integrands(gamma: f64, u: f64, r: &Roots) -> [f64; 3] {
    let a = u * u;
    let rr = (1.0 + 16.0 * gamma * a).sqrt();
    let w = (-2.0 * (a - r.a_hi) * (a - r.a_lo) / (rr + 2.0 * a + 2.0 * gamma - 1.0)).max(0.0);
    let r_g = 8.0 * a / rr;
    let r_gg = -64.0 * a * a / rr.powi(3);
    let w_g = -1.0 + 0.5 * r_g;
    let w_gg = 0.5 * r_gg;
    let d = rr * rr + rr;
    let d_g = (2.0 * rr + 1.0) * r_g;
    let d_gg = 2.0 * r_g * r_g + (2.0 * rr + 1.0) * r_gg;
    let q = 1.0 / d;
    let q_g = -d_g / (d * d);
    let q_gg = -d_gg / (d * d) + 2.0 * d_g * d_g / d.powi(3);
    let p = 2.0 - 4.0 * gamma * q;
    let p_g = -4.0 * q - 4.0 * gamma * q_g;
    let p_gg = -8.0 * q_g - 4.0 * gamma * q_gg;
    let sw = w.sqrt();
    let h = w * sw * p;
    let h_g = 1.5 * sw * w_g * p + w * sw * p_g;
    let h_gg = if w > 0.0 {
        (0.75 / sw * w_g * w_g + 1.5 * sw * w_gg) * p + 3.0 * sw * w_g * p_g + w * sw * p_gg
    } else {
        0.0
    };
    [h, h_g, h_gg]
}

/// `(int rho^3, d/dgamma, d^2/dgamma^2)`, each to relative tolerance `1e-11`.
fn cube_integrals(gamma: f64) -> Result<[f64; 3]> {
    let r = roots(gamma);
    let panel = Panel { lo: r.lo, hi: r.hi, sqrt_lo: r.lo > 0.0, sqrt_hi: true };
    let q = Quadrature::with_rel_tol(1e-11).abs_tol(1e-15);
    let c = 2.0 / PI.powi(3);
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = c * q.integrate_panels(|u| integrands(gamma, u, &r)[k], &[panel])?;
    }
    Ok(out)
}

fn expansion_at(gamma: f64) -> Result<MmseExpansion> {
    let [f, f1, f2] = cube_integrals(gamma)?;
    let c = 4.0 * PI * PI / 3.0;
    let base = 1.0 - c * f;
    Ok(MmseExpansion {
        mmse: base / gamma,
        first: -base / (gamma * gamma) - c * f1 / gamma,
        second: 2.0 * base / gamma.powi(3) + 2.0 * c * f1 / (gamma * gamma) - c * f2 / gamma,
    })
}

/// MMSE, MMSE' and MMSE'' for `rho_S = (delta_{-1} + delta_{+1}) / 2`.
pub fn rademacher_mmse_expansion(gamma: f64) -> Result<Warned<MmseExpansion>> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma must be positive"));
    }
    let mut e = expansion_at(gamma)?;
    if (gamma - 1.0).abs() < CRITICAL_OFFSET {
        let lo = expansion_at(1.0 - CRITICAL_OFFSET)?;
        let hi = expansion_at(1.0 + CRITICAL_OFFSET)?;
        e.second = 0.5 * (lo.second + hi.second);
    }
    let warning = ((gamma - 1.0).abs() < NEAR_CRITICAL)
        .then(|| format!("gamma = {gamma} is within {NEAR_CRITICAL} of the transition at 1"));
    Ok(Warned { value: e, warning })
}

/// `(MMSE'(gamma), MMSE''(gamma))` for the Rademacher spectrum.
pub fn mmse_derivative_integrals(gamma: f64) -> Result<Warned<(f64, f64)>> {
    Ok(rademacher_mmse_expansion(gamma)?.map(|e| (e.first, e.second)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::rademacher_rho_y;
    use crate::numerics::StencilGrid;
    use crate::theory::mmse_linear;

    fn mmse(g: f64) -> f64 {
        rademacher_mmse_expansion(g).unwrap().value.mmse
    }

    #[test]
    fn matches_density_quadrature() {
        for g in [0.3, 0.75, 1.0, 2.0, 4.0] {
            let direct = mmse_linear(&rademacher_rho_y(g).unwrap(), g).unwrap();
            assert!((mmse(g) - direct).abs() < 1e-9, "{g}: {} vs {direct}", mmse(g));
        }
    }

    #[test]
    fn reference_values() {
        assert!((mmse(1.0) - 0.42617665196763).abs() < 1e-11);
        assert!((mmse(2.0) - 0.2332462894820717).abs() < 1e-11);
        let e1 = rademacher_mmse_expansion(1.0).unwrap();
        assert!((e1.value.first + 1.0 / 3.0).abs() < 1e-10);
        assert!((e1.value.second - 0.39100221914).abs() < 1e-8);
        assert!(e1.warning.is_some());
        let e2 = rademacher_mmse_expansion(2.0).unwrap();
        assert!((e2.value.first + 0.1075858316372512).abs() < 1e-10);
        assert!(e2.warning.is_none());
        let e = rademacher_mmse_expansion(0.75).unwrap().value;
        assert!((e.second - 0.3935562788).abs() < 1e-8);
    }

    #[test]
    fn derivatives_agree_with_stencils() {
        for g in [0.4, 0.8, 1.3, 2.5] {
            let e = rademacher_mmse_expansion(g).unwrap().value;
            let grid = StencilGrid::sample(mmse, g, 1e-3).unwrap();
            assert!((grid.d1() - e.first).abs() < 1e-8, "{g}");
            assert!((grid.d2() - e.second).abs() < 1e-5, "{g}");
            let firsts = StencilGrid::sample(|x| rademacher_mmse_expansion(x).unwrap().value.first, g, 1e-3).unwrap();
            assert!((firsts.d1() - e.second).abs() < 1e-7, "{g}");
        }
    }
}
