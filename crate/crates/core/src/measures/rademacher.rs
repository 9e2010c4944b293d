//! Closed-form `rho_Y` for the symmetric two-atom spectral prior.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Density, Interval, SpectralMeasure};
use crate::error::{invalid, Result};

/// Inner support edge `L(gamma)` (zero for `gamma <= 1`).
pub fn rademacher_lower_edge(gamma: f64) -> f64 {
    if gamma <= 1.0 {
        return 0.0;
    }
    let s = (1.0 + 8.0 * gamma).sqrt();
    (s - 3.0) * (1.0 + 2.0 * gamma - s).max(0.0).sqrt() / (2f64.sqrt() * (s - 1.0))
}

/// Outer support edge `U(gamma)`.
pub fn rademacher_upper_edge(gamma: f64) -> f64 {
    let s = (1.0 + 8.0 * gamma).sqrt();
    (3.0 + s) * (1.0 + 2.0 * gamma + s).sqrt() / (2f64.sqrt() * (1.0 + s))
}

/// Density of `(delta_{-sqrt g} + delta_{+sqrt g}) / 2` convolved with the
/// semicircle. Evaluated at `|x|` with principal complex roots.
#[derive(Debug, Clone)]
pub struct RademacherRhoY {
    gamma: f64,
    support: Vec<Interval>,
}

impl RademacherRhoY {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(invalid("gamma must be positive"));
        }
        let (l, u) = (rademacher_lower_edge(gamma), rademacher_upper_edge(gamma));
        let support =
            if l > 0.0 { vec![Interval::new(-u, -l), Interval::new(l, u)] } else { vec![Interval::new(-u, u)] };
        Ok(RademacherRhoY { gamma, support })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Density for RademacherRhoY {
    fn eval(&self, x: f64) -> f64 {
        if !self.support.iter().any(|iv| x > iv.lo && x < iv.hi) {
            return 0.0;
        }
        let g = self.gamma;
        let x = x.abs();
        let t = -3.0 + 3.0 * g + x * x;
        let d = x * x * (9.0 + 18.0 * g - 2.0 * x * x).powi(2) - 4.0 * t.powi(3);
        let inner =
            Complex64::new(576.0 * x + 1152.0 * g * x - 128.0 * x.powi(3), 0.0) + 64.0 * Complex64::new(d, 0.0).sqrt();
        let b = inner.cbrt();
        let a = 16.0 * x + 32.0 * 2f64.cbrt() * t / b + 2f64.powf(2.0 / 3.0) * b;
        let val = 1.0 - 2.0 * (g + a * a / 2304.0) + (1.0 + g / 144.0 * a * a).sqrt();
        let r = val.sqrt().re;
        if r.is_finite() {
            r.max(0.0) / (2f64.sqrt() * PI)
        } else {
            0.0
        }
    }

    fn support(&self) -> &[Interval] {
        &self.support
    }

    fn mass(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `rho_Y` for the spectral prior `(delta_{-1} + delta_{+1}) / 2`.
pub fn rademacher_rho_y(gamma: f64) -> Result<SpectralMeasure> {
    Ok(SpectralMeasure::new_unchecked(vec![], Some(Arc::new(RademacherRhoY::new(gamma)?))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::support_components;

    #[test]
    fn edges_at_critical_point() {
        assert_eq!(rademacher_lower_edge(1.0), 0.0);
        assert!((rademacher_upper_edge(1.0) - 3.0 * 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn centre_value_below_transition() {
        let m = rademacher_rho_y(0.5).unwrap();
        assert!((m.density_at(0.0) - 0.5f64.sqrt() / PI).abs() < 1e-10);
    }

    #[test]
    fn components_and_normalization() {
        assert_eq!(support_components(&rademacher_rho_y(2.0).unwrap()).count(), 2);
        assert_eq!(support_components(&rademacher_rho_y(0.5).unwrap()).count(), 1);
        for g in [0.3, 1.0, 2.0, 5.0] {
            let m = rademacher_rho_y(g).unwrap();
            assert!((m.integrate(|_| 1.0).unwrap() - 1.0).abs() < 1e-8, "gamma {g}");
            assert!((m.moment(2).unwrap() - (g + 1.0)).abs() < 1e-7, "gamma {g}");
        }
    }
}
