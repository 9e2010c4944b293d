//! Five-point finite-difference stencils.

use crate::error::{invalid, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Samples `f(c + k h)` for `k = -2..=2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilGrid {
    pub center: f64,
    pub step: f64,
    pub values: [f64; 5],
}

impl StencilGrid {
    pub fn new(center: f64, step: f64, values: [f64; 5]) -> Result<Self> {
        if !(step > 0.0) {
            return Err(invalid("stencil step must be positive"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("stencil values must be finite"));
        }
        Ok(StencilGrid { center, step, values })
    }

    /// Evaluates `f` on the five abscissae.
    pub fn sample<F: FnMut(f64) -> f64>(mut f: F, center: f64, step: f64) -> Result<Self> {
        let mut values = [0.0; 5];
        for (k, v) in values.iter_mut().enumerate() {
            *v = f(center + (k as f64 - 2.0) * step);
        }
        Self::new(center, step, values)
    }

    /// Like [`StencilGrid::sample`] for fallible functions.
    pub fn try_sample<F: FnMut(f64) -> Result<f64>>(mut f: F, center: f64, step: f64) -> Result<Self> {
        let mut values = [0.0; 5];
        for (k, v) in values.iter_mut().enumerate() {
            *v = f(center + (k as f64 - 2.0) * step)?;
        }
        Self::new(center, step, values)
    }

    pub fn d1(&self) -> f64 {
        five_point_d1(self)
    }

    pub fn d2(&self) -> f64 {
        five_point_d2(self)
    }
}

/// `(-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h`
pub fn five_point_d1(g: &StencilGrid) -> f64 {
    let [m2, m1, _, p1, p2] = g.values;
    (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * g.step)
}

/// `(-f(x+2h) + 16f(x+h) - 30f(x) + 16f(x-h) - f(x-2h)) / 12h^2`
pub fn five_point_d2(g: &StencilGrid) -> f64 {
    let [m2, m1, c, p1, p2] = g.values;
    (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * g.step * g.step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials() {
        let g = StencilGrid::sample(|x| x * x, 3.0, 0.01).unwrap();
        assert!((g.d1() - 6.0).abs() < 1e-10);
        let g = StencilGrid::sample(|x| x.powi(4), 1.0, 0.1).unwrap();
        assert!((g.d1() - 4.0).abs() < 1e-12);
        for c in [-2.0, 0.3, 5.0] {
            let g = StencilGrid::sample(|x| x * x * x, c, 0.25).unwrap();
            assert!((g.d2() - 6.0 * c).abs() < 1e-10 * (1.0 + c.abs()));
        }
        let g = StencilGrid::sample(|x| 3.0 * x * x - x, 0.7, 0.5).unwrap();
        assert!((g.d2() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn odd_function_curvature_vanishes() {
        let g = StencilGrid::sample(f64::sin, 0.0, 1e-3).unwrap();
        assert!(g.d2().abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(StencilGrid::new(0.0, 0.0, [0.0; 5]).is_err());
        assert!(StencilGrid::new(0.0, 0.1, [0.0, f64::NAN, 0.0, 0.0, 0.0]).is_err());
    }
}
