use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Method, ShrinkageResult};
use crate::ensembles::SymmetricMatrixInstance;
use crate::error::{invalid, Error, Result};
use crate::linalg::Eigen;
use crate::measures::{cauchy_derivative, cauchy_transform, hilbert_transform, SpectralMeasure};

const DEGENERATE_GAP: f64 = 1e-12;

/// Source of the Hilbert transform of the observation spectrum.
#[derive(Debug, Clone, Copy)]
pub enum HilbertMode<'a> {
    /// Empirical sum over the other eigenvalues, smoothed at `eta = N^{-1/2}`.
    Empirical,
    /// Empirical sum `(1/N) sum_j d / (d^2 + eta^2)` with `d = lambda_i - lambda_j`;
    /// `eta = 0` is the bare principal-value sum.
    EmpiricalWith(f64),
    /// Principal value against a known `rho_Y`.
    Density(&'a SpectralMeasure),
}

/// Noise spectra with a known thresholding function.
#[derive(Debug, Clone)]
pub enum SublinearNoise {
    Wigner,
    UniformSpectrum { a: f64, b: f64 },
    Generic(SpectralMeasure),
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma must be positive"));
    }
    Ok(())
}

fn shrink(
    eigen: &Eigen,
    xi: Vec<f64>,
    method: Method,
    warnings: Vec<alloc::string::String>,
) -> Result<ShrinkageResult> {
    let estimate = SymmetricMatrixInstance::symmetrized(eigen.reconstruct(&xi)?)?;
    Ok(ShrinkageResult { estimate, xi, method, warnings })
}

/// `xi_i = (lambda_i - 2 pi H[rho_Y](lambda_i)) / sqrt(gamma)`.
///
/// Uses the cached eigendecomposition of `y` when present.
pub fn rie_linear(y: &SymmetricMatrixInstance, gamma: f64, mode: HilbertMode<'_>) -> Result<ShrinkageResult> {
    check_gamma(gamma)?;
    let eigen = y.eigen()?;
    let lam = &eigen.values;
    let n = lam.len();
    let rg = gamma.sqrt();
    let mut warnings = Vec::new();
    let xi = match mode {
        HilbertMode::Empirical | HilbertMode::EmpiricalWith(_) => {
            let eta = match mode {
                HilbertMode::EmpiricalWith(e) if e >= 0.0 && e.is_finite() => e,
                HilbertMode::EmpiricalWith(_) => return Err(invalid("eta must be nonnegative")),
                _ => 1.0 / (n as f64).sqrt(),
            };
            let eta2 = eta * eta;
            let mut skipped = 0usize;
            let xi = (0..n)
                .map(|i| {
                    let mut h = 0.0;
                    for (j, &l) in lam.iter().enumerate() {
                        if j == i {
                            continue;
                        }
                        let d = lam[i] - l;
                        if eta2 == 0.0 && d.abs() < DEGENERATE_GAP {
                            skipped += 1;
                            continue;
                        }
                        h += d / (d * d + eta2);
                    }
                    (lam[i] - 2.0 * h / n as f64) / rg
                })
                .collect();
            if skipped > 0 {
                warnings.push(format!("{} degenerate eigenvalue pairs skipped", skipped / 2));
            }
            xi
        }
        HilbertMode::Density(rho) => {
            if rho.density().is_none() || rho.has_atoms() {
                return Err(invalid("density mode needs a continuous rho_Y"));
            }
            lam.iter()
                .map(|&l| Ok((l - 2.0 * core::f64::consts::PI * hilbert_transform(rho, l)?) / rg))
                .collect::<Result<Vec<_>>>()?
        }
    };
    shrink(eigen, xi, Method::RieLinear, warnings)
}

/// `f_Z(x) = -(1/sqrt(gamma)) 1{x outside [a, b]} G(x) / G'(x)`.
pub fn sublinear_threshold(noise: &SublinearNoise, gamma: f64, x: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let rg = gamma.sqrt();
    match noise {
        SublinearNoise::Wigner => Ok(if x.abs() > 2.0 { x.signum() * (x * x - 4.0).sqrt() / rg } else { 0.0 }),
        SublinearNoise::UniformSpectrum { a, b } => {
            if !(a < b) {
                return Err(invalid("uniform noise needs a < b"));
            }
            if x >= *a && x <= *b {
                return Ok(0.0);
            }
            Ok((x - a) * (x - b) * ((x - a) / (x - b)).ln() / ((b - a) * rg))
        }
        SublinearNoise::Generic(m) => {
            let hull = m.hull();
            if x >= hull.lo && x <= hull.hi {
                return Ok(0.0);
            }
            Ok(-cauchy_transform(m, x)? / (cauchy_derivative(m, x)? * rg))
        }
    }
}

/// Thresholding estimator for sub-linear rank signals.
pub fn rie_sublinear(y: &SymmetricMatrixInstance, gamma: f64, noise: &SublinearNoise) -> Result<ShrinkageResult> {
    check_gamma(gamma)?;
    let eigen = y.eigen()?;
    let xi = eigen.values.iter().map(|&l| sublinear_threshold(noise, gamma, l)).collect::<Result<Vec<_>>>()?;
    shrink(eigen, xi, Method::RieSublinear, Vec::new())
}

/// `xi_i = y_i^T S y_i`.
pub fn oracle(y: &SymmetricMatrixInstance, s: &SymmetricMatrixInstance) -> Result<ShrinkageResult> {
    if y.n() != s.n() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", y.n(), s.n())));
    }
    let eigen = y.eigen()?;
    let sv = s.matrix() * &eigen.vectors;
    let xi = (0..y.n()).map(|i| eigen.vectors.column(i).dot(&sv.column(i))).collect();
    shrink(eigen, xi, Method::Oracle, Vec::new())
}
