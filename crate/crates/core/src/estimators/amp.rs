use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensembles::{derive_seed, rng_from_seed, SymmetricMatrixInstance};
use crate::error::{invalid, Error, Result};
use crate::linalg::lanczos_top;
use crate::theory::ScalarPrior;

const LANCZOS_STEPS: usize = 300;
const LANCZOS_TOL: f64 = 1e-8;
const MIN_INIT_OVERLAP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmpInit {
    /// Top eigenvector of the data, scaled by the predicted overlap.
    Spectral,
    /// i.i.d. normal entries with the given standard deviation.
    Random { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmpOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub init: AmpInit,
    pub seed: u64,
}

impl Default for AmpOptions {
    fn default() -> Self {
        AmpOptions { tol: 1e-7, max_iter: 200, init: AmpInit::Spectral, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmpState {
    pub iterate: DVector<f64>,
    pub previous: DVector<f64>,
    pub onsager: f64,
    /// `gamma ||x_hat||^2 / N`.
    pub effective_snr: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Posterior mean and variance for the channel `u = s X + sqrt(s) xi`.
fn denoise(prior: &ScalarPrior, u: f64, s: f64) -> (f64, f64) {
    if s <= 0.0 {
        return (0.0, prior.variance());
    }
    prior.posterior_moments(u / s.sqrt(), s)
}

fn initial_iterate(y: &DMatrix<f64>, gamma: f64, prior: &ScalarPrior, opts: &AmpOptions) -> Result<DVector<f64>> {
    let n = y.nrows();
    let mut rng = rng_from_seed(derive_seed(opts.seed, 0, "amp-init"));
    match opts.init {
        AmpInit::Random { scale } => {
            if !(scale > 0.0) || !scale.is_finite() {
                return Err(invalid("random init scale must be positive"));
            }
            Ok(DVector::from_fn(n, |_, _| scale * rng.sample::<f64, _>(StandardNormal)))
        }
        AmpInit::Spectral => {
            let (lam, v) = lanczos_top(y, LANCZOS_STEPS, LANCZOS_TOL, &mut rng)?;
            // Outlier at theta + 1/theta for a spike of strength theta.
            let overlap = if lam > 2.0 {
                let theta = 0.5 * (lam + (lam * lam - 4.0).sqrt());
                prior.variance() * (1.0 - 1.0 / (theta * theta))
            } else {
                0.0
            };
            let _ = gamma;
            Ok(v * (n as f64 * overlap.max(MIN_INIT_OVERLAP)).sqrt())
        }
    }
}

fn run(y: &DMatrix<f64>, gamma: f64, prior: &ScalarPrior, opts: &AmpOptions) -> Result<AmpState> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma must be positive"));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(invalid("tol and max_iter must be positive"));
    }
    let n = y.nrows();
    let nf = n as f64;
    let rg = gamma.sqrt();
    let mut x = initial_iterate(y, gamma, prior, opts)?;
    let mut prev = DVector::zeros(n);
    let mut onsager = 0.0;
    let mut u = DVector::zeros(n);
    let mut state = AmpState {
        iterate: x.clone(),
        previous: prev.clone(),
        onsager,
        effective_snr: gamma * x.norm_squared() / nf,
        iterations: 0,
        converged: false,
    };
    for t in 1..=opts.max_iter {
        let s = gamma * x.norm_squared() / nf;
        u.gemv(rg, y, &x, 0.0);
        u.axpy(-onsager, &prev, 1.0);
        let mut next = DVector::zeros(n);
        let mut var_sum = 0.0;
        for i in 0..n {
            let (m, v) = denoise(prior, u[i], s);
            next[i] = m;
            var_sum += v;
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { iteration: t, spike: 0 });
        }
        let step = (&next - &x).norm() / x.norm().max(1e-12);
        onsager = gamma * var_sum / nf;
        prev = core::mem::replace(&mut x, next);
        state = AmpState {
            iterate: x.clone(),
            previous: prev.clone(),
            onsager,
            effective_snr: gamma * x.norm_squared() / nf,
            iterations: t,
            converged: step < opts.tol,
        };
        if state.converged {
            break;
        }
    }
    Ok(state)
}

/// Bayes-optimal AMP for `Y = sqrt(gamma) x x^T / N + Z`.
///
/// The returned iterate estimates the O(1)-entry column `x`.
pub fn amp_rank_one(
    y: &SymmetricMatrixInstance,
    gamma: f64,
    prior: &ScalarPrior,
    opts: &AmpOptions,
) -> Result<(DVector<f64>, AmpState)> {
    let state = run(y.matrix(), gamma, prior, opts)?;
    Ok((state.iterate.clone(), state))
}

#[derive(Debug, Clone)]
pub struct DecimationResult {
    pub estimate: SymmetricMatrixInstance,
    /// Column `t` is the spike removed at step `t`, scaled by `1/sqrt(N)`.
    pub spikes: DMatrix<f64>,
    pub states: Vec<AmpState>,
    pub warnings: Vec<String>,
}

/// Extracts `m` spikes one at a time, subtracting each estimate from the data.
pub fn decimation_amp(
    y: &SymmetricMatrixInstance,
    gamma: f64,
    m: usize,
    prior: &ScalarPrior,
    opts: &AmpOptions,
) -> Result<DecimationResult> {
    let n = y.n();
    if m == 0 || m > n {
        return Err(invalid(format!("spike count {m} outside [1, {n}]")));
    }
    let rg = gamma.sqrt();
    let mut resid = y.matrix().clone();
    let mut spikes = DMatrix::zeros(n, m);
    let mut states = Vec::with_capacity(m);
    let mut warnings = Vec::new();
    for t in 0..m {
        let spike_opts = AmpOptions { seed: derive_seed(opts.seed, t as u64, "spike"), ..*opts };
        let state = run(&resid, gamma, prior, &spike_opts).map_err(|e| match e {
            Error::Divergence { iteration, .. } => Error::Divergence { iteration, spike: t },
            other => other,
        })?;
        if !state.converged {
            warnings.push(format!("spike {t}: AMP stopped after {} iterations", state.iterations));
        }
        let x = &state.iterate / (n as f64).sqrt();
        for j in 0..n {
            let c = rg * x[j];
            for i in 0..=j {
                let v = resid[(i, j)] - c * x[i];
                resid[(i, j)] = v;
                resid[(j, i)] = v;
            }
        }
        spikes.set_column(t, &x);
        states.push(state);
    }
    let estimate = SymmetricMatrixInstance::symmetrized(&spikes * spikes.transpose())?;
    Ok(DecimationResult { estimate, spikes, states, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{observe, sample_factor_signal, NoiseKind};
    use crate::estimators::{mse, Normalization};

    fn overlap2(x: &DVector<f64>, xh: &DVector<f64>) -> f64 {
        let d = x.dot(xh);
        d * d / (x.norm_squared() * xh.norm_squared())
    }

    #[test]
    fn gaussian_overlap_matches_state_evolution() {
        let n = 1500;
        let g = ScalarPrior::gaussian(1.0).unwrap();
        let f = sample_factor_signal(n, 1, &g, 1).unwrap();
        let y = observe(&f.s, 4.0, &NoiseKind::Wigner, 2).unwrap();
        let (xh, st) = amp_rank_one(&y, 4.0, &g, &AmpOptions::default()).unwrap();
        let x = f.x.column(0).into_owned();
        assert!((overlap2(&x, &xh) - 0.75).abs() < 0.05, "{}", overlap2(&x, &xh));
        let q = xh.norm_squared() / n as f64;
        let m = x.dot(&xh).abs() / n as f64;
        assert!((q - m).abs() < 0.05, "{q} {m}");
        assert!(st.converged);
    }

    #[test]
    fn below_transition_no_recovery() {
        let n = 1000;
        let g = ScalarPrior::gaussian(1.0).unwrap();
        let f = sample_factor_signal(n, 1, &g, 3).unwrap();
        let y = observe(&f.s, 0.5, &NoiseKind::Wigner, 4).unwrap();
        let (xh, _) = amp_rank_one(&y, 0.5, &g, &AmpOptions::default()).unwrap();
        let x = f.x.column(0).into_owned();
        if xh.norm() > 0.0 {
            assert!(overlap2(&x, &xh) < 0.05);
        }
    }

    #[test]
    fn rademacher_random_init() {
        let n = 1000;
        let r = ScalarPrior::rademacher();
        let f = sample_factor_signal(n, 1, &r, 5).unwrap();
        let y = observe(&f.s, 9.0, &NoiseKind::Wigner, 6).unwrap();
        let opts = AmpOptions { init: AmpInit::Random { scale: 0.1 }, ..AmpOptions::default() };
        let (xh, _) = amp_rank_one(&y, 9.0, &r, &opts).unwrap();
        let x = f.x.column(0).into_owned();
        assert!(overlap2(&x, &xh) > 0.95);
    }

    #[test]
    fn zero_data_settles_fast() {
        let y = SymmetricMatrixInstance::zeros(50).unwrap();
        let (xh, st) = amp_rank_one(&y, 2.0, &ScalarPrior::rademacher(), &AmpOptions::default()).unwrap();
        assert!(st.converged && st.iterations <= 2, "{}", st.iterations);
        assert!(xh.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn single_spike_decimation_matches_amp() {
        let n = 400;
        let g = ScalarPrior::gaussian(1.0).unwrap();
        let f = sample_factor_signal(n, 1, &g, 7).unwrap();
        let y = observe(&f.s, 5.0, &NoiseKind::Wigner, 8).unwrap();
        let opts = AmpOptions::default();
        let d = decimation_amp(&y, 5.0, 1, &g, &opts).unwrap();
        let spike_opts = AmpOptions { seed: derive_seed(opts.seed, 0, "spike"), ..opts };
        let (xh, _) = amp_rank_one(&y, 5.0, &g, &spike_opts).unwrap();
        let xh = xh / (n as f64).sqrt();
        let direct = &xh * xh.transpose();
        assert!((d.estimate.matrix() - direct).norm() < 1e-12);
        assert!(mse(&f.s, &d.estimate, Normalization::PerRank(1)).unwrap().is_finite());
        assert!(decimation_amp(&y, 5.0, 0, &g, &opts).is_err());
    }

    #[test]
    fn decimation_consumes_all_spikes() {
        let n = 600;
        let g = ScalarPrior::gaussian(1.0).unwrap();
        let f = sample_factor_signal(n, 5, &g, 9).unwrap();
        let y = observe(&f.s, 9.0, &NoiseKind::Wigner, 10).unwrap();
        let d = decimation_amp(&y, 9.0, 5, &g, &AmpOptions::default()).unwrap();
        let resid = y.matrix() - d.estimate.matrix() * 3.0;
        let top = crate::linalg::NalgebraBackend;
        let e = crate::linalg::DenseBackend::eigh(&top, &resid).unwrap();
        assert!(e.values[n - 1] < 2.2 && e.values[0] > -2.2, "{:?}", (e.values[0], e.values[n - 1]));
        let m = mse(&f.s, &d.estimate, Normalization::PerRank(5)).unwrap();
        assert!(m < 0.4, "{m}");
    }
}
