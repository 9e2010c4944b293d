//! One realization's spectrum against the predicted density.

use std::path::Path;

use anyhow::Result;
use mdenoise_core::ensembles::{derive_seed, observe_with, sample_rot_inv_signal_with, EigenvalueSource, NoiseKind};
use mdenoise_core::linalg::DenseBackend;
use mdenoise_core::measures::{ks_distance_to, support_components, SpectralMeasure};
use mdenoise_core::numerics::{spectral_histogram, Histogram};
use serde::Serialize;

use crate::io::PriorSource;
use crate::InvalidInput;

/// Histogram runs holding less than this share of eigenvalues are ignored
/// when counting bulk components.
const MIN_COMPONENT_MASS: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub n: usize,
    pub gamma: f64,
    pub seed: u64,
    pub ks: f64,
    pub theory_components: usize,
    pub empirical_components: usize,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub histogram: Histogram,
    pub theory: SpectralMeasure,
    pub summary: SpectrumSummary,
}

fn histogram_components(h: &Histogram) -> usize {
    let total: f64 = h.rows().map(|(lo, hi, d)| (hi - lo) * d).sum();
    let mut count = 0;
    let mut mass = 0.0;
    for (lo, hi, d) in h.rows().chain(std::iter::once((0.0, 0.0, 0.0))) {
        if d > 0.0 {
            mass += (hi - lo) * d;
        } else {
            if mass >= MIN_COMPONENT_MASS * total {
                count += 1;
            }
            mass = 0.0;
        }
    }
    count
}

/// `Y = sqrt(gamma) O diag(lambda) O^T + Z` with `lambda` i.i.d. from the
/// prior and Wigner `Z`.
pub fn spectrum(
    prior: &PriorSource,
    gamma: f64,
    n: usize,
    seed: u64,
    bins: usize,
    backend: &dyn DenseBackend,
) -> Result<SpectrumResult> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(InvalidInput("gamma must be nonnegative".into()).into());
    }
    if n == 0 || bins == 0 {
        return Err(InvalidInput("n and bins must be positive".into()).into());
    }
    let src = EigenvalueSource::Draws { measure: prior.measure()?, count: n };
    let s = sample_rot_inv_signal_with(n, &src, derive_seed(seed, 0, "signal"), backend)?;
    let y = observe_with(&s, gamma, &NoiseKind::Wigner, derive_seed(seed, 0, "noise"), backend)?;
    let eigenvalues = backend.eigh(y.matrix())?.values;
    let theory = if gamma == 0.0 { SpectralMeasure::semicircle(1.0)? } else { prior.rho_y(gamma)? };
    let histogram = spectral_histogram(&eigenvalues, bins)?;
    let summary = SpectrumSummary {
        n,
        gamma,
        seed,
        ks: ks_distance_to(&eigenvalues, &theory)?,
        theory_components: support_components(&theory).count(),
        empirical_components: histogram_components(&histogram),
    };
    Ok(SpectrumResult { eigenvalues, histogram, theory, summary })
}

/// `<stem>.hist.csv` (`bin_lo,bin_hi,density`) and `<stem>.theory.csv`
/// (`x,density`) sampled at the histogram bin centres.
pub fn write_spectrum(stem: &Path, r: &SpectrumResult) -> Result<()> {
    let with = |ext: &str| {
        let mut s = stem.as_os_str().to_owned();
        s.push(ext);
        std::path::PathBuf::from(s)
    };
    let mut w = csv::Writer::from_path(with(".hist.csv"))?;
    w.write_record(["bin_lo", "bin_hi", "density"])?;
    for (lo, hi, d) in r.histogram.rows() {
        w.write_record([lo.to_string(), hi.to_string(), d.to_string()])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(with(".theory.csv"))?;
    w.write_record(["x", "density"])?;
    for (lo, hi, _) in r.histogram.rows() {
        let x = 0.5 * (lo + hi);
        w.write_record([x.to_string(), r.theory.density_at(x).to_string()])?;
    }
    w.flush()?;
    Ok(())
}
