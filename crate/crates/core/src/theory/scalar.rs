//! Scalar Gaussian channel `y = sqrt(s) X + Z` for symmetric priors.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::numerics::{gaussian_expectation, Quadrature};

/// Shape of a symmetric zero-mean scalar law.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorLaw {
    Gaussian,
    /// `+-sqrt(rho)` with equal weights.
    Rademacher,
    /// Uniform on `[-a, a]`.
    Uniform {
        half_width: f64,
    },
    Discrete {
        points: Vec<f64>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPrior {
    law: PriorLaw,
    variance: f64,
}

impl ScalarPrior {
    pub fn gaussian(variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(invalid("variance must be positive"));
        }
        Ok(ScalarPrior { law: PriorLaw::Gaussian, variance })
    }

    /// Unit-variance Rademacher law.
    pub fn rademacher() -> Self {
        ScalarPrior { law: PriorLaw::Rademacher, variance: 1.0 }
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("half width must be positive"));
        }
        Ok(ScalarPrior { law: PriorLaw::Uniform { half_width }, variance: half_width * half_width / 3.0 })
    }

    /// Finite symmetric law; weights are normalized.
    pub fn discrete(points: &[f64], weights: &[f64]) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(invalid("points and weights must be nonempty and of equal length"));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) || points.iter().any(|p| !p.is_finite()) {
            return Err(invalid("weights must be positive and points finite"));
        }
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        for (i, &x) in points.iter().enumerate() {
            let mirror: f64 =
                points.iter().zip(&weights).filter(|(&y, _)| (y + x).abs() <= 1e-12).map(|(_, w)| w).sum();
            if (mirror - weights[i]).abs() > 1e-9 * weights[i].max(1.0) {
                return Err(invalid("discrete prior must be symmetric"));
            }
        }
        let variance: f64 = points.iter().zip(&weights).map(|(x, w)| w * x * x).sum();
        if !(variance > 0.0) {
            return Err(invalid("discrete prior has zero variance"));
        }
        Ok(ScalarPrior { law: PriorLaw::Discrete { points: points.to_vec(), weights }, variance })
    }

    pub fn law(&self) -> &PriorLaw {
        &self.law
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// `E[X | y]` and `d/dy E[X | y] = sqrt(s) Var[X | y]`.
    pub fn posterior(&self, y: f64, s: f64) -> (f64, f64) {
        let (mean, var) = self.posterior_moments(y, s);
        (mean, s.sqrt() * var)
    }

    /// `E[X | y]` and `Var[X | y]`.
    pub fn posterior_moments(&self, y: f64, s: f64) -> (f64, f64) {
        let rs = s.sqrt();
        match &self.law {
            PriorLaw::Gaussian => {
                let k = self.variance / (1.0 + s * self.variance);
                (rs * k * y, k)
            }
            PriorLaw::Rademacher => {
                let a = self.variance.sqrt();
                let t = (rs * a * y).tanh();
                (a * t, a * a * (1.0 - t * t))
            }
            PriorLaw::Uniform { half_width } => {
                if s == 0.0 {
                    return (0.0, self.variance);
                }
                truncated_normal(y / rs, 1.0 / rs, -half_width, *half_width)
            }
            PriorLaw::Discrete { points, weights } => {
                let logs: Vec<f64> =
                    points.iter().zip(weights).map(|(x, w)| w.ln() + rs * x * y - 0.5 * s * x * x).collect();
                let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
                for (l, x) in logs.iter().zip(points) {
                    let p = (l - top).exp();
                    z += p;
                    m1 += p * x;
                    m2 += p * x * x;
                }
                let mean = m1 / z;
                (mean, (m2 / z - mean * mean).max(0.0))
            }
        }
    }

    /// `E_X f(X)` over the prior; uniform laws use adaptive quadrature.
    fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        match &self.law {
            PriorLaw::Rademacher => {
                let a = self.variance.sqrt();
                0.5 * (f(a) + f(-a))
            }
            PriorLaw::Discrete { points, weights } => points.iter().zip(weights).map(|(&x, w)| w * f(x)).sum(),
            PriorLaw::Uniform { half_width } => {
                let a = *half_width;
                let q = Quadrature::with_rel_tol(1e-10).abs_tol(1e-14);
                match q.integrate(&mut f, -a, a) {
                    Ok(v) => v / (2.0 * a),
                    Err(crate::Error::Accuracy { estimate, .. }) => estimate / (2.0 * a),
                    Err(_) => f64::NAN,
                }
            }
            PriorLaw::Gaussian => {
                let r = self.variance.sqrt();
                gaussian_expectation(|z| f(r * z))
            }
        }
    }
}

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Upper tail `P(N(0,1) > x)`.
fn upper_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Mean and variance of `N(m, sd^2)` conditioned on `[lo, hi]`.
fn truncated_normal(m: f64, sd: f64, lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = ((lo - m) / sd, (hi - m) / sd);
    let z = if a >= 0.0 {
        upper_tail(a) - upper_tail(b)
    } else if b <= 0.0 {
        upper_tail(-b) - upper_tail(-a)
    } else {
        1.0 - upper_tail(b) - upper_tail(-a)
    };
    if z < 1e-300 {
        // Far outside the interval: the conditioned law is close to an
        // exponential leaning on the nearer endpoint.
        return if a > 0.0 { (lo + sd / a, (sd / a).powi(2)) } else { (hi + sd / b, (sd / b).powi(2)) };
    }
    let (pa, pb) = (phi(a), phi(b));
    let r = (pa - pb) / z;
    let mean = m + sd * r;
    let var = sd * sd * (1.0 + (a * pa - b * pb) / z - r * r);
    (mean.clamp(lo, hi), var.max(0.0))
}

/// `E[(X - E[X | y])^2]` at SNR `s`.
pub fn scalar_mmse(prior: &ScalarPrior, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(invalid("snr must be nonnegative"));
    }
    let rho = prior.variance;
    Ok(match &prior.law {
        PriorLaw::Gaussian => rho / (1.0 + rho * s),
        PriorLaw::Rademacher => {
            let t = s * rho;
            rho * (1.0 - gaussian_expectation(|z| (t + t.sqrt() * z).tanh()))
        }
        _ => {
            let rs = s.sqrt();
            prior.expect(|x| gaussian_expectation(|z| prior.posterior_moments(rs * x + z, s).1))
        }
    }
    .max(0.0))
}

/// `I(X; sqrt(s) X + Z)` in nats.
pub fn scalar_mi(prior: &ScalarPrior, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(invalid("snr must be nonnegative"));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let rho = prior.variance;
    let rs = s.sqrt();
    Ok(match &prior.law {
        PriorLaw::Gaussian => 0.5 * (1.0 + rho * s).ln(),
        PriorLaw::Rademacher => {
            let t = s * rho;
            t - gaussian_expectation(|z| log_cosh(t + t.sqrt() * z))
        }
        PriorLaw::Discrete { points, weights } => {
            let log_partition = |y: f64| {
                let logs: Vec<f64> =
                    points.iter().zip(weights).map(|(x, w)| w.ln() + rs * x * y - 0.5 * s * x * x).collect();
                let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
            };
            0.5 * s * rho - prior.expect(|x| gaussian_expectation(|z| log_partition(rs * x + z)))
        }
        PriorLaw::Uniform { half_width } => {
            let a = *half_width;
            // ln E_X' exp(sqrt(s) X' y - s X'^2 / 2) for X' uniform on [-a, a].
            let log_partition = |y: f64| {
                let (hi, lo) = (rs * a - y, -rs * a - y);
                let mass = if lo >= 0.0 {
                    upper_tail(lo) - upper_tail(hi)
                } else if hi <= 0.0 {
                    upper_tail(-hi) - upper_tail(-lo)
                } else {
                    1.0 - upper_tail(hi) - upper_tail(-lo)
                };
                0.5 * y * y + 0.5 * (2.0 * PI / s).ln() - (2.0 * a).ln() + mass.max(f64::MIN_POSITIVE).ln()
            };
            0.5 * s * rho - prior.expect(|x| gaussian_expectation(|z| log_partition(rs * x + z)))
        }
    })
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - core::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let g = ScalarPrior::gaussian(1.0).unwrap();
        assert_eq!(scalar_mmse(&g, 0.0).unwrap(), 1.0);
        assert!((scalar_mmse(&g, 3.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((scalar_mi(&g, 3.0).unwrap() - 0.5 * 4f64.ln()).abs() < 1e-15);
        assert!(scalar_mmse(&g, -1.0).is_err());
    }

    #[test]
    fn rademacher_limits() {
        let r = ScalarPrior::rademacher();
        assert!((scalar_mmse(&r, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(scalar_mmse(&r, 60.0).unwrap() < 1e-10);
        assert!((scalar_mi(&r, 60.0).unwrap() - 2f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn discrete_matches_rademacher() {
        let r = ScalarPrior::rademacher();
        let d = ScalarPrior::discrete(&[-1.0, 1.0], &[1.0, 1.0]).unwrap();
        for s in [0.1, 0.7, 2.0, 5.0] {
            let (a, b) = (scalar_mmse(&r, s).unwrap(), scalar_mmse(&d, s).unwrap());
            assert!((a - b).abs() < 1e-10, "{s}: {a} {b}");
            assert!((scalar_mi(&r, s).unwrap() - scalar_mi(&d, s).unwrap()).abs() < 1e-10);
        }
        assert!(ScalarPrior::discrete(&[-1.0, 2.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn i_mmse_on_every_law() {
        let priors = [
            ScalarPrior::gaussian(2.0).unwrap(),
            ScalarPrior::rademacher(),
            ScalarPrior::uniform(3f64.sqrt()).unwrap(),
            ScalarPrior::discrete(&[-2.0, 0.0, 2.0], &[0.1, 0.8, 0.1]).unwrap(),
        ];
        for p in &priors {
            for s in [0.3, 1.0, 4.0] {
                let h = 1e-3;
                let d = (scalar_mi(p, s + h).unwrap() - scalar_mi(p, s - h).unwrap()) / (2.0 * h);
                let m = scalar_mmse(p, s).unwrap();
                assert!((2.0 * d - m).abs() < 1e-5, "{:?} s={s}: {} vs {m}", p.law(), 2.0 * d);
            }
        }
    }

    #[test]
    fn uniform_posterior_is_inside() {
        let p = ScalarPrior::uniform(1.0).unwrap();
        for y in [-50.0, -3.0, 0.0, 0.4, 7.0, 80.0] {
            let (m, d) = p.posterior(y, 9.0);
            assert!(m.abs() <= 1.0 && d >= 0.0);
        }
        assert!((scalar_mmse(&p, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }
}
