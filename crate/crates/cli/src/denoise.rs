//! Single-matrix denoising.

use std::path::Path;

use anyhow::Result;
use mdenoise_core::ensembles::SymmetricMatrixInstance;
use mdenoise_core::estimators::{decimation_amp, oracle, rie_linear, rie_sublinear, AmpOptions, HilbertMode, Method};
use mdenoise_core::linalg::DenseBackend;
use mdenoise_core::measures::SpectralMeasure;
use serde::Serialize;

use crate::io::{read_matrix, read_measure, PriorSource};
use crate::specs::{parse_noise, parse_scalar_prior, sublinear_noise};
use crate::InvalidInput;

#[derive(Debug, Clone)]
pub struct DenoiseRequest {
    pub gamma: f64,
    pub method: Method,
    pub noise: String,
    /// `empirical`, `empirical:<eta>` or `density:<measure file | spectral prior>`.
    pub hilbert: String,
    pub prior: Option<String>,
    pub rank: Option<usize>,
    /// Ground-truth signal, required by the oracle.
    pub signal: Option<std::path::PathBuf>,
    pub seed: u64,
    pub amp: AmpOptions,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub method: String,
    pub n: usize,
    pub gamma: f64,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub amp_iterations: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_range: Option<[f64; 2]>,
}

/// A density file is taken as `rho_Y` itself; a prior shorthand is
/// convolved at SNR `gamma`.
fn hilbert_density(arg: &str, gamma: f64) -> Result<SpectralMeasure> {
    if Path::new(arg).is_file() {
        return read_measure(Path::new(arg));
    }
    PriorSource::parse(arg)?.rho_y(gamma)
}

pub fn denoise(
    y: &SymmetricMatrixInstance,
    req: &DenoiseRequest,
    backend: &dyn DenseBackend,
) -> Result<(SymmetricMatrixInstance, Diagnostics)> {
    if !(req.gamma > 0.0) || !req.gamma.is_finite() {
        return Err(InvalidInput("gamma must be positive".into()).into());
    }
    let mut diag = Diagnostics {
        method: req.method.name().into(),
        n: y.n(),
        gamma: req.gamma,
        warnings: Vec::new(),
        amp_iterations: Vec::new(),
        xi_range: None,
    };
    if req.method != Method::DecimationAmp {
        y.eigen_with(backend)?;
    }
    let shrink = match req.method {
        Method::RieLinear => {
            let density;
            let mode = match req.hilbert.split_once(':') {
                None if req.hilbert == "empirical" => HilbertMode::Empirical,
                Some(("empirical", eta)) => {
                    HilbertMode::EmpiricalWith(eta.parse().map_err(|_| InvalidInput(format!("bad eta `{eta}`")))?)
                }
                Some(("density", arg)) => {
                    density = hilbert_density(arg, req.gamma)?;
                    HilbertMode::Density(&density)
                }
                _ => return Err(InvalidInput(format!("unknown hilbert mode `{}`", req.hilbert)).into()),
            };
            Some(rie_linear(y, req.gamma, mode)?)
        }
        Method::RieSublinear => Some(rie_sublinear(y, req.gamma, &sublinear_noise(&parse_noise(&req.noise)?))?),
        Method::Oracle => {
            let path = req.signal.as_ref().ok_or_else(|| InvalidInput("oracle needs --signal".into()))?;
            Some(oracle(y, &read_matrix(path)?)?)
        }
        Method::DecimationAmp => None,
    };
    let estimate = match shrink {
        Some(r) => {
            let lo = r.xi.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = r.xi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            diag.xi_range = Some([lo, hi]);
            diag.warnings.extend(r.warnings);
            r.estimate
        }
        None => {
            let prior = parse_scalar_prior(req.prior.as_deref().unwrap_or("gaussian"))?;
            let m = req.rank.ok_or_else(|| InvalidInput("dec-amp needs --rank".into()))?;
            if !matches!(parse_noise(&req.noise)?, mdenoise_core::ensembles::NoiseKind::Wigner) {
                diag.warnings.push("AMP assumes Wigner noise".into());
            }
            let opts = AmpOptions { seed: req.seed, ..req.amp };
            let r = decimation_amp(y, req.gamma, m, &prior, &opts)?;
            diag.amp_iterations = r.states.iter().map(|s| s.iterations).collect();
            diag.warnings.extend(r.warnings);
            r.estimate
        }
    };
    Ok((estimate, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::LapackBackend;
    use mdenoise_core::ensembles::{observe, sample_factor_signal, NoiseKind};
    use mdenoise_core::theory::ScalarPrior;

    fn request(method: Method) -> DenoiseRequest {
        DenoiseRequest {
            gamma: 4.0,
            method,
            noise: "wigner".into(),
            hilbert: "empirical".into(),
            prior: Some("gaussian".into()),
            rank: Some(3),
            signal: None,
            seed: 0,
            amp: AmpOptions::default(),
        }
    }

    #[test]
    fn every_method_runs() {
        let f = sample_factor_signal(120, 3, &ScalarPrior::gaussian(1.0).unwrap(), 1).unwrap();
        let y = observe(&f.s, 4.0, &NoiseKind::Wigner, 2).unwrap();
        for m in [Method::RieLinear, Method::RieSublinear, Method::DecimationAmp] {
            let (est, d) = denoise(&y, &request(m), &LapackBackend).unwrap();
            assert_eq!(est.n(), 120);
            assert_eq!(d.method, m.name());
        }
        assert!(denoise(&y, &request(Method::Oracle), &LapackBackend).is_err());
        let mut r = request(Method::RieLinear);
        r.hilbert = "density:wigner".into();
        assert!(denoise(&y, &r, &LapackBackend).is_ok());
        r.hilbert = "fourier".into();
        assert!(denoise(&y, &r, &LapackBackend).is_err());
    }
}
