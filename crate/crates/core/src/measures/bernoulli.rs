//! Closed-form `rho_Y` for the spectral prior `p delta_0 + (1 - p) delta_1`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Density, Interval, SpectralMeasure};
use crate::error::{invalid, Result};
use crate::numerics::{bisect, quartic_roots, real_parts};

/// Density of `(p delta_0 + (1-p) delta_{sqrt g})` convolved with the
/// semicircle, parametrized by the subordination variable `u`.
#[derive(Debug, Clone)]
pub struct BernoulliRhoY {
    gamma: f64,
    p: f64,
    /// `u`-intervals where `v(u) > 0`, paired with their images.
    pieces: Vec<(Interval, Interval)>,
    support: Vec<Interval>,
}

impl BernoulliRhoY {
    pub fn new(gamma: f64, p: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(invalid("gamma must be positive"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid("p must lie in (0, 1)"));
        }
        let s = gamma.sqrt();
        // g(u) = u^4 - 2 s u^3 + (gamma - 1) u^2 + 2 p s u - p gamma
        let roots = real_parts(&quartic_roots(-2.0 * s, gamma - 1.0, 2.0 * p * s, -p * gamma), 1e-10);
        let mut d = BernoulliRhoY { gamma, p, pieces: Vec::new(), support: Vec::new() };
        for pair in roots.chunks_exact(2) {
            let iu = Interval::new(pair[0], pair[1]);
            let ix = Interval::new(d.psi_outside(pair[0]), d.psi_outside(pair[1]));
            d.pieces.push((iu, ix));
            d.support.push(ix);
        }
        Ok(d)
    }

    /// Quartic whose negativity set is `{u : v(u) > 0}`.
    pub fn quartic(&self, u: f64) -> f64 {
        let s = self.gamma.sqrt();
        let (g, p) = (self.gamma, self.p);
        u.powi(4) - 2.0 * s * u.powi(3) + (g - 1.0) * u * u + 2.0 * p * s * u - p * g
    }

    /// Number of real roots of the quartic (two or four).
    pub fn real_root_count(&self) -> usize {
        2 * self.pieces.len()
    }

    fn psi_outside(&self, u: f64) -> f64 {
        u + self.p / u + (1.0 - self.p) / (u - self.gamma.sqrt())
    }

    /// `v(u)` (zero off the support in `u`).
    pub fn v(&self, u: f64) -> f64 {
        if self.quartic(u) >= 0.0 {
            return 0.0;
        }
        let s = self.gamma.sqrt();
        let root = self.big_s(u);
        (0.5 * (-2.0 * u * u + 2.0 * s * u + root - self.gamma + 1.0)).max(0.0).sqrt()
    }

    fn big_s(&self, u: f64) -> f64 {
        let s = self.gamma.sqrt();
        (s * (s - 2.0 * u) * (-2.0 * s * u + self.gamma + 4.0 * self.p - 2.0) + 1.0).max(0.0).sqrt()
    }

    /// `psi(u)`.
    pub fn psi(&self, u: f64) -> f64 {
        let v = self.v(u);
        if v == 0.0 {
            return self.psi_outside(u);
        }
        let s = self.gamma.sqrt();
        if (s - 2.0 * u).abs() < 1e-6 {
            // removable 0/0 at the midpoint: direct subordination sum
            let v2 = v * v;
            return u + self.p * u / (u * u + v2) + (1.0 - self.p) * (u - s) / ((u - s).powi(2) + v2);
        }
        (-8.0 * u * u + 6.0 * s * u + self.big_s(u) - self.gamma - 1.0) / (2.0 * (s - 2.0 * u))
    }
}

impl Density for BernoulliRhoY {
    fn eval(&self, x: f64) -> f64 {
        for (iu, ix) in &self.pieces {
            if x > ix.lo && x < ix.hi {
                let u = match bisect(|u| self.psi(u) - x, iu.lo, iu.hi, 1e-14 * (1.0 + iu.hi.abs()), 200) {
                    Ok(u) => u,
                    Err(_) => return 0.0,
                };
                return self.v(u) / PI;
            }
        }
        0.0
    }

    fn support(&self) -> &[Interval] {
        &self.support
    }

    fn mass(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `rho_Y` for the spectral prior `p delta_0 + (1 - p) delta_1`.
pub fn bernoulli_rho_y(gamma: f64, p: f64) -> Result<SpectralMeasure> {
    Ok(SpectralMeasure::new_unchecked(vec![], Some(Arc::new(BernoulliRhoY::new(gamma, p)?))))
}
