use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Density, Interval};
use crate::error::{invalid, Result};

/// `sqrt(4 s^2 - x^2) / (2 pi s^2)` on `[-2s, 2s]`, `s^2` the variance.
#[derive(Debug, Clone)]
pub struct Semicircle {
    variance: f64,
    support: [Interval; 1],
}

impl Semicircle {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(invalid("semicircle variance must be positive"));
        }
        let r = 2.0 * variance.sqrt();
        Ok(Semicircle { variance, support: [Interval::new(-r, r)] })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

impl Density for Semicircle {
    fn eval(&self, x: f64) -> f64 {
        let r2 = 4.0 * self.variance;
        if x * x >= r2 {
            return 0.0;
        }
        (r2 - x * x).sqrt() / (2.0 * PI * self.variance)
    }

    fn support(&self) -> &[Interval] {
        &self.support
    }

    fn mass(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Uniform density on `[a, b]`.
#[derive(Debug, Clone)]
pub struct Uniform {
    support: [Interval; 1],
}

impl Uniform {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(invalid("uniform law needs a < b"));
        }
        Ok(Uniform { support: [Interval::new(a, b)] })
    }
}

impl Density for Uniform {
    fn eval(&self, x: f64) -> f64 {
        let iv = self.support[0];
        if iv.contains(x) {
            1.0 / iv.width()
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

/// Density of `c X` given the density of `X`.
#[derive(Debug, Clone)]
pub struct ScaledDensity {
    inner: Arc<dyn Density>,
    c: f64,
    support: Vec<Interval>,
}

impl ScaledDensity {
    pub fn new(inner: Arc<dyn Density>, c: f64) -> Self {
        let mut support: Vec<Interval> = inner
            .support()
            .iter()
            .map(|iv| {
                let (a, b) = (c * iv.lo, c * iv.hi);
                Interval::new(a.min(b), a.max(b))
            })
            .collect();
        support.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        ScaledDensity { inner, c, support }
    }
}

impl Density for ScaledDensity {
    fn eval(&self, x: f64) -> f64 {
        self.inner.eval(x / self.c) / self.c.abs()
    }

    fn support(&self) -> &[Interval] {
        &self.support
    }

    fn mass(&self) -> Option<f64> {
        self.inner.mass()
    }
}

#[allow(dead_code)]
pub(crate) fn single(lo: f64, hi: f64) -> Vec<Interval> {
    vec![Interval::new(lo, hi)]
}
