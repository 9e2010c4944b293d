//! Empirical-spectrum statistics: Wasserstein-2, histograms, Kolmogorov-Smirnov.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// W2 distance between two empirical measures with equal sample counts.
pub fn wasserstein2_empirical(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(alloc::format!("{} vs {}", u.len(), v.len())));
    }
    if u.is_empty() {
        return Err(invalid("empty sample"));
    }
    let mut a = u.to_vec();
    let mut b = v.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let s: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((s / a.len() as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` increasing edges.
    pub edges: Vec<f64>,
    /// Density per bin; integrates to one.
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.density.len()
    }

    /// Rows of `(bin_lo, bin_hi, density)`.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.density.iter().enumerate().map(move |(i, d)| (self.edges[i], self.edges[i + 1], *d))
    }
}

/// Equal-width histogram over `[min, max]` of the sample, normalized as a density.
pub fn spectral_histogram(eigs: &[f64], bins: usize) -> Result<Histogram> {
    if eigs.is_empty() {
        return Err(invalid("no eigenvalues"));
    }
    if bins == 0 {
        return Err(invalid("bins must be positive"));
    }
    let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0usize; bins];
    for &e in eigs {
        let k = (((e - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = eigs.len() as f64;
    let density = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    Ok(Histogram { edges, density })
}

/// Sup distance between the empirical CDF of `sample` and a reference CDF.
///
/// `cdf` returns `(F(x-), F(x))`, so jumps of the reference law are compared
/// from both sides.
pub fn ks_distance<F: FnMut(f64) -> (f64, f64)>(sample: &[f64], mut cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(invalid("empty sample"));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        let x = s[i];
        let mut j = i;
        while j < s.len() && s[j] == x {
            j += 1;
        }
        let (left, right) = cdf(x);
        d = d.max((left - i as f64 / n).abs()).max((right - j as f64 / n).abs());
        i = j;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wasserstein_examples() {
        assert_eq!(wasserstein2_empirical(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(wasserstein2_empirical(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(wasserstein2_empirical(&[0.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn histogram_integrates_to_one() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let h = spectral_histogram(&xs, 17).unwrap();
        let total: f64 = h.rows().map(|(a, b, d)| (b - a) * d).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(spectral_histogram(&[], 3).is_err());
    }

    #[test]
    fn ks_against_point_mass() {
        let d = ks_distance(&[0.0], |x| {
            if x < 0.0 {
                (0.0, 0.0)
            } else if x == 0.0 {
                (0.0, 1.0)
            } else {
                (1.0, 1.0)
            }
        })
        .unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn ks_uniform_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_distance(&xs, |x| (x, x)).unwrap();
        assert!((d - 0.005).abs() < 1e-12);
    }
}
