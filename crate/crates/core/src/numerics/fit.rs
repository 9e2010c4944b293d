//! Least-squares fit of a logarithmic singularity at a critical point.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};

/// Logarithm used on the abscissa of the fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Decimal,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Decimal => x.log10(),
        }
    }
}

/// Model `g(gamma) / (gamma - gamma_c)^p = a log|gamma - gamma_c| + a b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityFit {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual of the regression.
    pub residual: f64,
    pub gamma_c: f64,
}

/// Fit with `p = 1` and natural logarithms, both sides of `gamma_c` jointly.
pub fn fit_log_singularity(gammas: &[f64], values: &[f64], gamma_c: f64) -> Result<SingularityFit> {
    fit_log_singularity_with(gammas, values, gamma_c, 1, LogBase::Natural)
}

/// General form: divides by `(gamma - gamma_c)^power` before regressing on
/// `log|gamma - gamma_c|` in the requested base.
pub fn fit_log_singularity_with(
    gammas: &[f64],
    values: &[f64],
    gamma_c: f64,
    power: i32,
    base: LogBase,
) -> Result<SingularityFit> {
    if gammas.len() != values.len() {
        return Err(invalid("gammas and values differ in length"));
    }
    if gammas.len() < 3 {
        return Err(invalid("at least three points are needed"));
    }
    let mut xs = Vec::with_capacity(gammas.len());
    let mut ys = Vec::with_capacity(gammas.len());
    for (&g, &v) in gammas.iter().zip(values) {
        let d = g - gamma_c;
        if d == 0.0 {
            return Err(invalid("abscissa coincides with the critical point"));
        }
        xs.push(base.log(d.abs()));
        ys.push(v / d.powi(power));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("degenerate abscissae"));
    }
    let a = sxy / sxx;
    let intercept = my - a * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - a * x - intercept).powi(2)).sum();
    Ok(SingularityFit { a, b: intercept / a, residual: (ss / n).sqrt(), gamma_c })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (1..=20).flat_map(|k| [1.0 - 0.005 * k as f64, 1.0 + 0.005 * k as f64]).collect()
    }

    #[test]
    fn recovers_planted_model() {
        let gs = grid();
        let vs: Vec<f64> = gs.iter().map(|g| -0.8 * (g - 1.0) * ((g - 1.0).abs().ln() + 1.0)).collect();
        let f = fit_log_singularity(&gs, &vs, 1.0).unwrap();
        assert!((f.a + 0.8).abs() < 1e-10);
        assert!((f.b - 1.0).abs() < 1e-10);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn cubic_power_decimal_base() {
        let gs = grid();
        let vs: Vec<f64> = gs.iter().map(|g| 0.3 * (g - 1.0f64).powi(3) * ((g - 1.0f64).abs().log10() - 2.0)).collect();
        let f = fit_log_singularity_with(&gs, &vs, 1.0, 3, LogBase::Decimal).unwrap();
        assert!((f.a - 0.3).abs() < 1e-9);
        assert!((f.b + 2.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_log_singularity(&[0.9, 1.1], &[0.0, 0.0], 1.0).is_err());
        assert!(fit_log_singularity(&[0.9, 1.0, 1.1], &[0.0; 3], 1.0).is_err());
    }
}
