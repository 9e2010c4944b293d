//! Seeded random matrix ensembles and the additive observation channel.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::DMatrix;
use once_cell::race::OnceBox;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::linalg::{DenseBackend, Eigen, NalgebraBackend};
use crate::measures::SpectralMeasure;
use crate::theory::{PriorLaw, ScalarPrior};

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream seed for `(master, trial, role)`; stable across runs
/// and independent of scheduling.
pub fn derive_seed(master: u64, trial: u64, role: &str) -> u64 {
    let mut h = splitmix(master);
    h = splitmix(h ^ trial);
    for b in role.bytes() {
        h = splitmix(h ^ u64::from(b));
    }
    h
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense real symmetric matrix with a lazily computed eigendecomposition.
pub struct SymmetricMatrixInstance {
    matrix: DMatrix<f64>,
    eigen: OnceBox<Eigen>,
}

impl fmt::Debug for SymmetricMatrixInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricMatrixInstance")
            .field("n", &self.n())
            .field("eigen_cached", &self.eigen.get().is_some())
            .finish()
    }
}

impl Clone for SymmetricMatrixInstance {
    fn clone(&self) -> Self {
        let eigen = OnceBox::new();
        if let Some(e) = self.eigen.get() {
            let _ = eigen.set(Box::new(e.clone()));
        }
        SymmetricMatrixInstance { matrix: self.matrix.clone(), eigen }
    }
}

impl SymmetricMatrixInstance {
    /// Wraps an exactly symmetric square matrix.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(invalid("matrix must be square and nonempty"));
        }
        let n = matrix.nrows();
        for j in 0..n {
            for i in 0..j {
                if matrix[(i, j)] != matrix[(j, i)] {
                    return Err(invalid(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        Ok(SymmetricMatrixInstance { matrix, eigen: OnceBox::new() })
    }

    /// `(A + A^T) / 2`, exactly symmetric.
    pub fn symmetrized(mut a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(invalid("matrix must be square"));
        }
        let n = a.nrows();
        for j in 0..n {
            for i in 0..j {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        Self::new(a)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(n, n))
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Attaches a known eigendecomposition.
    pub fn with_eigen(self, eigen: Eigen) -> Self {
        let _ = self.eigen.set(Box::new(eigen));
        self
    }

    pub fn cached_eigen(&self) -> Option<&Eigen> {
        self.eigen.get()
    }

    pub fn eigen(&self) -> Result<&Eigen> {
        self.eigen_with(&NalgebraBackend)
    }

    pub fn eigen_with(&self, backend: &dyn DenseBackend) -> Result<&Eigen> {
        self.eigen.get_or_try_init(|| backend.eigh(&self.matrix).map(Box::new))
    }

    pub fn eigenvalues_with(&self, backend: &dyn DenseBackend) -> Result<&[f64]> {
        Ok(&self.eigen_with(backend)?.values)
    }

    /// `||A - B||_F^2`.
    pub fn squared_distance(&self, other: &Self) -> Result<f64> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.n(), other.n())));
        }
        Ok(self.matrix.iter().zip(other.matrix.iter()).map(|(a, b)| (a - b) * (a - b)).sum())
    }
}

/// GOE with off-diagonal variance `1/n` and diagonal variance `2/n`.
pub fn sample_goe(n: usize, seed: u64) -> Result<SymmetricMatrixInstance> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let off = (1.0 / n as f64).sqrt();
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let z: f64 = rng.sample(StandardNormal);
            let v = if i == j { z * off * core::f64::consts::SQRT_2 } else { z * off };
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    SymmetricMatrixInstance::new(a)
}

/// Haar orthogonal matrix from the sign-corrected QR of a Gaussian matrix.
pub fn sample_haar_orthogonal(n: usize, seed: u64) -> Result<DMatrix<f64>> {
    sample_haar_orthogonal_with(n, seed, &NalgebraBackend)
}

pub fn sample_haar_orthogonal_with(n: usize, seed: u64, backend: &dyn DenseBackend) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let (mut q, diag) = backend.qr(g)?;
    for (j, d) in diag.iter().enumerate() {
        if *d < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

/// Where the eigenvalues of a rotation-invariant matrix come from.
#[derive(Debug, Clone)]
pub enum EigenvalueSource {
    Explicit(Vec<f64>),
    /// `count` i.i.d. draws; the remaining eigenvalues are zero.
    Draws {
        measure: SpectralMeasure,
        count: usize,
    },
}

fn draw_eigenvalues(source: &EigenvalueSource, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let mut vals = match source {
        EigenvalueSource::Explicit(v) => {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(invalid("eigenvalues must be finite"));
            }
            v.clone()
        }
        EigenvalueSource::Draws { measure, count } => {
            if *count > n {
                return Err(invalid(format!("{count} eigenvalues requested for dimension {n}")));
            }
            let table = measure.cdf_table()?;
            (0..*count).map(|_| table.quantile(rng.gen::<f64>())).collect()
        }
    };
    if vals.len() > n {
        return Err(invalid(format!("{} eigenvalues for dimension {n}", vals.len())));
    }
    vals.resize(n, 0.0);
    Ok(vals)
}

/// `O diag(lambda) O^T` with Haar `O`.
pub fn sample_rot_inv_signal(n: usize, source: &EigenvalueSource, seed: u64) -> Result<SymmetricMatrixInstance> {
    sample_rot_inv_signal_with(n, source, seed, &NalgebraBackend)
}

pub fn sample_rot_inv_signal_with(
    n: usize,
    source: &EigenvalueSource,
    seed: u64,
    backend: &dyn DenseBackend,
) -> Result<SymmetricMatrixInstance> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut rng = rng_from_seed(derive_seed(seed, 0, "eigenvalues"));
    let vals = draw_eigenvalues(source, n, &mut rng)?;
    let o = sample_haar_orthogonal_with(n, derive_seed(seed, 0, "haar"), backend)?;
    let active: Vec<usize> = (0..n).filter(|&i| vals[i] != 0.0).collect();
    let mut scaled = DMatrix::zeros(n, active.len());
    let mut basis = DMatrix::zeros(n, active.len());
    for (c, &i) in active.iter().enumerate() {
        basis.set_column(c, &o.column(i));
        scaled.set_column(c, &(o.column(i) * vals[i]));
    }
    let s = SymmetricMatrixInstance::symmetrized(&scaled * basis.transpose())?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let eigen = Eigen {
        values: order.iter().map(|&i| vals[i]).collect(),
        vectors: DMatrix::from_fn(n, n, |r, c| o[(r, order[c])]),
    };
    Ok(s.with_eigen(eigen))
}

/// `M = floor(N^alpha)`.
pub fn rank_for_alpha(n: usize, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha must lie in (0, 1)"));
    }
    let m = ((n as f64).powf(alpha) * (1.0 + 1e-12)).floor() as usize;
    Ok(m.max(1))
}

/// `S = X X^T / N` with i.i.d. entries of `X` drawn from a scalar prior.
#[derive(Debug, Clone)]
pub struct FactorSignal {
    pub x: DMatrix<f64>,
    pub s: SymmetricMatrixInstance,
    pub m: usize,
    pub alpha: Option<f64>,
}

pub fn sample_scalar<R: Rng>(prior: &ScalarPrior, rng: &mut R) -> f64 {
    match prior.law() {
        PriorLaw::Gaussian => prior.variance().sqrt() * rng.sample::<f64, _>(StandardNormal),
        PriorLaw::Rademacher => {
            let a = prior.variance().sqrt();
            if rng.gen::<bool>() {
                a
            } else {
                -a
            }
        }
        PriorLaw::Uniform { half_width } => rng.gen_range(-half_width..=*half_width),
        PriorLaw::Discrete { points, weights } => {
            let mut u: f64 = rng.gen();
            for (p, w) in points.iter().zip(weights) {
                if u < *w {
                    return *p;
                }
                u -= w;
            }
            *points.last().unwrap()
        }
    }
}

pub fn sample_factor_signal(n: usize, m: usize, prior: &ScalarPrior, seed: u64) -> Result<FactorSignal> {
    if n == 0 || m == 0 {
        return Err(invalid("n and m must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let mut x = DMatrix::zeros(n, m);
    for j in 0..m {
        for i in 0..n {
            x[(i, j)] = sample_scalar(prior, &mut rng);
        }
    }
    let s = SymmetricMatrixInstance::symmetrized(&x * x.transpose() / n as f64)?;
    Ok(FactorSignal { x, s, m, alpha: None })
}

/// Noise ensembles for the observation channel.
#[derive(Debug, Clone)]
pub enum NoiseKind {
    Wigner,
    /// Rotation-invariant with i.i.d. eigenvalues uniform on `[a, b]`.
    UniformSpectrum {
        a: f64,
        b: f64,
    },
    /// Rotation-invariant with i.i.d. eigenvalues from a measure.
    RotInv(SpectralMeasure),
}

impl NoiseKind {
    pub fn sample(&self, n: usize, seed: u64, backend: &dyn DenseBackend) -> Result<SymmetricMatrixInstance> {
        match self {
            NoiseKind::Wigner => sample_goe(n, seed),
            NoiseKind::UniformSpectrum { a, b } => {
                let measure = SpectralMeasure::uniform(*a, *b)?;
                sample_rot_inv_signal_with(n, &EigenvalueSource::Draws { measure, count: n }, seed, backend)
            }
            NoiseKind::RotInv(measure) => sample_rot_inv_signal_with(
                n,
                &EigenvalueSource::Draws { measure: measure.clone(), count: n },
                seed,
                backend,
            ),
        }
    }

    /// Law of the noise spectrum.
    pub fn spectral_measure(&self) -> Result<SpectralMeasure> {
        match self {
            NoiseKind::Wigner => SpectralMeasure::semicircle(1.0),
            NoiseKind::UniformSpectrum { a, b } => SpectralMeasure::uniform(*a, *b),
            NoiseKind::RotInv(m) => Ok(m.clone()),
        }
    }
}

/// `Y = sqrt(gamma) S + Z`.
pub fn observe(
    s: &SymmetricMatrixInstance,
    gamma: f64,
    noise: &NoiseKind,
    seed: u64,
) -> Result<SymmetricMatrixInstance> {
    observe_with(s, gamma, noise, seed, &NalgebraBackend)
}

pub fn observe_with(
    s: &SymmetricMatrixInstance,
    gamma: f64,
    noise: &NoiseKind,
    seed: u64,
    backend: &dyn DenseBackend,
) -> Result<SymmetricMatrixInstance> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma must be nonnegative"));
    }
    let z = noise.sample(s.n(), seed, backend)?;
    if gamma == 0.0 {
        return Ok(z);
    }
    let g = gamma.sqrt();
    let mut y = z.into_matrix();
    y.zip_apply(s.matrix(), |a, b| *a += g * b);
    SymmetricMatrixInstance::new(y)
}
