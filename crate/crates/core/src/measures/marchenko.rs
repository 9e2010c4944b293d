//! Marchenko-Pastur laws and the free convolution of a rescaled one with
//! the semicircle.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Atom, Density, Interval, SpectralMeasure};
use crate::error::{invalid, Result};
use crate::numerics::bisect;

/// Continuous part of the Marchenko-Pastur law with ratio `q`:
/// `sqrt((x - a)(b - x)) / (2 pi x)`, `a, b = (1/sqrt(q) -+ 1)^2`.
#[derive(Debug, Clone)]
pub struct MarchenkoPasturLaw {
    q: f64,
    support: [Interval; 1],
}

impl MarchenkoPasturLaw {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(invalid("Marchenko-Pastur ratio must be positive"));
        }
        let s = 1.0 / q.sqrt();
        Ok(MarchenkoPasturLaw { q, support: [Interval::new((s - 1.0).powi(2), (s + 1.0).powi(2))] })
    }

    pub fn ratio(&self) -> f64 {
        self.q
    }
}

impl Density for MarchenkoPasturLaw {
    fn eval(&self, x: f64) -> f64 {
        let iv = self.support[0];
        if !(x > iv.lo && x < iv.hi) {
            return 0.0;
        }
        ((x - iv.lo) * (iv.hi - x)).sqrt() / (2.0 * PI * x)
    }

    fn support(&self) -> &[Interval] {
        &self.support
    }

    fn mass(&self) -> Option<f64> {
        Some(self.q.recip().min(1.0))
    }
}

/// Density of `MP(q)` scaled by `sqrt(gamma)` and convolved with the
/// semicircle. `G` solves the cubic
/// `-s G^3 + (1 + s x) G^2 + (s/q - s - x) G + 1 = 0`, `s = sqrt(gamma)`,
/// and the density is the imaginary part of its complex root, written with
/// real cube roots (Cardano).
#[derive(Debug, Clone)]
pub struct MarchenkoPasturRhoY {
    gamma: f64,
    q: f64,
    support: Vec<Interval>,
}

impl MarchenkoPasturRhoY {
    pub fn new(gamma: f64, q: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(invalid("gamma must be positive"));
        }
        if !(q > 0.0) || !q.is_finite() {
            return Err(invalid("q must be positive"));
        }
        let mut d = MarchenkoPasturRhoY { gamma, q, support: Vec::new() };
        d.support = d.find_support();
        Ok(d)
    }

    /// Depressed-cubic data `(p, r, shift)` at abscissa `x`.
    fn depressed(&self, x: f64) -> (f64, f64) {
        let s = self.gamma.sqrt();
        let a = -s;
        let b = (1.0 + s * x) / a;
        let c = (s / self.q - s - x) / a;
        let d = 1.0 / a;
        let p = c - b * b / 3.0;
        let r = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        (p, r)
    }

    /// Positive exactly where the cubic has a complex pair.
    pub fn discriminant(&self, x: f64) -> f64 {
        let (p, r) = self.depressed(x);
        r * r / 4.0 + p * p * p / 27.0
    }

    fn find_support(&self) -> Vec<Interval> {
        let s = self.gamma.sqrt();
        let b = (1.0 / self.q.sqrt() + 1.0).powi(2);
        let lo = -2.5;
        let hi = s * b + 2.5;
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let mut out = Vec::new();
        let mut start: Option<f64> = None;
        let mut prev = self.discriminant(lo);
        for k in 1..=n {
            let x = lo + h * k as f64;
            let cur = self.discriminant(x);
            if (prev > 0.0) != (cur > 0.0) {
                let e = bisect(|t| self.discriminant(t), x - h, x, 1e-15, 200).unwrap_or(x);
                if cur > 0.0 {
                    start = Some(e);
                } else if let Some(a) = start.take() {
                    out.push(Interval::new(a, e));
                }
            }
            prev = cur;
        }
        out
    }
}

impl Density for MarchenkoPasturRhoY {
    fn eval(&self, x: f64) -> f64 {
        if !self.support.iter().any(|iv| x > iv.lo && x < iv.hi) {
            return 0.0;
        }
        let (p, r) = self.depressed(x);
        let disc = r * r / 4.0 + p * p * p / 27.0;
        if disc <= 0.0 {
            return 0.0;
        }
        let sd = disc.sqrt();
        let c1 = (-r / 2.0 + sd).cbrt();
        let c2 = (-r / 2.0 - sd).cbrt();
        3f64.sqrt() / (2.0 * PI) * (c1 - c2).abs()
    }

    fn support(&self) -> &[Interval] {
        &self.support
    }

    fn mass(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `rho_Y` for a spectral prior `MP(q)` at signal-to-noise ratio `gamma`.
pub fn marchenko_pastur_rho_y(gamma: f64, q: f64) -> Result<SpectralMeasure> {
    let d = MarchenkoPasturRhoY::new(gamma, q)?;
    Ok(SpectralMeasure::new_unchecked(Vec::<Atom>::new(), Some(Arc::new(d))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::support_components;

    #[test]
    fn component_counts() {
        let one = marchenko_pastur_rho_y(6.0, 8.0).unwrap();
        assert_eq!(support_components(&one).count(), 1);
        let two = marchenko_pastur_rho_y(16.0, 8.0).unwrap();
        assert_eq!(support_components(&two).count(), 2);
        for q in [0.3, 1.0] {
            for g in [0.5, 4.0, 30.0] {
                let m = marchenko_pastur_rho_y(g, q).unwrap();
                assert_eq!(support_components(&m).count(), 1, "q={q} gamma={g}");
            }
        }
    }

    #[test]
    fn normalized_with_right_second_moment() {
        // second moment = gamma * E[S^2] + 1, E[S^2] of MP(q) = (1/q)(1 + 1/q)
        for (g, q) in [(1.0, 2.0), (6.0, 8.0), (16.0, 8.0), (2.0, 0.5)] {
            let m = marchenko_pastur_rho_y(g, q).unwrap();
            assert!((m.integrate(|_| 1.0).unwrap() - 1.0).abs() < 1e-7, "g={g} q={q}");
            let m2 = m.moment(2).unwrap();
            assert!((m2 - (g / q * (1.0 + 1.0 / q) + 1.0)).abs() < 1e-6, "g={g} q={q} m2={m2}");
        }
    }

    #[test]
    fn law_moments() {
        let m = SpectralMeasure::marchenko_pastur(3.0).unwrap();
        assert!((m.moment(1).unwrap() - 1.0 / 3.0).abs() < 1e-10);
        assert!((m.moment(2).unwrap() - (1.0 / 3.0) * (4.0 / 3.0)).abs() < 1e-10);
    }
}
