//! Dense symmetric linear algebra behind a swappable backend.

use alloc::vec::Vec;
use core::fmt::Debug;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Eigenvalues in ascending order with matching orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    /// `sum_i f(lambda_i) v_i v_i^T`.
    pub fn reconstruct(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        if xi.len() != self.values.len() {
            return Err(Error::DimensionMismatch("one shrunk value per eigenvalue".into()));
        }
        let mut scaled = self.vectors.clone();
        for (mut col, &x) in scaled.column_iter_mut().zip(xi) {
            col *= x;
        }
        Ok(&scaled * self.vectors.transpose())
    }
}

/// Heavy dense kernels. The default runs on nalgebra; hosts with LAPACK
/// provide a faster implementation.
pub trait DenseBackend: Send + Sync + Debug {
    fn eigh(&self, a: &DMatrix<f64>) -> Result<Eigen>;

    /// Thin QR of a square matrix: `(Q, diag(R))`.
    fn qr(&self, a: DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NalgebraBackend;

impl DenseBackend for NalgebraBackend {
    fn eigh(&self, a: &DMatrix<f64>) -> Result<Eigen> {
        if !a.is_square() {
            return Err(invalid("eigh needs a square matrix"));
        }
        let e = SymmetricEigen::new(a.clone());
        let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
        let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| e.eigenvectors[(r, order[c])]);
        Ok(Eigen { values, vectors })
    }

    fn qr(&self, a: DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
        if !a.is_square() {
            return Err(invalid("qr needs a square matrix"));
        }
        let qr = a.qr();
        let diag = qr.r().diagonal().iter().copied().collect();
        Ok((qr.q(), diag))
    }
}

/// Largest eigenpair by Lanczos with full reorthogonalization.
pub fn lanczos_top<R: Rng>(a: &DMatrix<f64>, max_iter: usize, tol: f64, rng: &mut R) -> Result<(f64, DVector<f64>)> {
    let n = a.nrows();
    if n == 0 || !a.is_square() {
        return Err(invalid("lanczos needs a nonempty square matrix"));
    }
    let kmax = max_iter.min(n).max(1);
    let mut q = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    q /= q.norm();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(kmax);
    let (mut alpha, mut beta) = (Vec::with_capacity(kmax), Vec::with_capacity(kmax));
    let mut w = DVector::zeros(n);
    let mut best = (0.0, DVector::zeros(n));
    for k in 0..kmax {
        basis.push(q.clone());
        w.gemv(1.0, a, &q, 0.0);
        let ak = w.dot(&q);
        alpha.push(ak);
        for _ in 0..2 {
            for b in &basis {
                let c = w.dot(b);
                w.axpy(-c, b, 1.0);
            }
        }
        let bk = w.norm();
        let done = k + 1 == kmax || bk <= 1e-14 * ak.abs().max(1.0);
        if done || (k + 1) % 8 == 0 {
            let m = k + 1;
            let t = DMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let e = SymmetricEigen::new(t);
            let top = (0..m).max_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j])).unwrap();
            let theta = e.eigenvalues[top];
            let s = e.eigenvectors.column(top);
            let residual = bk * s[m - 1].abs();
            let mut v = DVector::zeros(n);
            for (b, &c) in basis.iter().zip(s.iter()) {
                v.axpy(c, b, 1.0);
            }
            let norm = v.norm();
            best = (theta, v / norm);
            if done || residual <= tol * theta.abs().max(1.0) {
                return Ok(best);
            }
        }
        beta.push(bk);
        q = &w / bk;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        (&g + g.transpose()) * 0.5
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let a = random_symmetric(30, 1);
        let e = NalgebraBackend.eigh(&a).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let back = e.reconstruct(&e.values).unwrap();
        assert!((back - &a).norm() < 1e-10);
        let orth = e.vectors.transpose() * &e.vectors - DMatrix::identity(30, 30);
        assert!(orth.norm() < 1e-10);
    }

    #[test]
    fn qr_is_orthogonal() {
        let a = random_symmetric(20, 2);
        let (q, d) = NalgebraBackend.qr(a).unwrap();
        assert_eq!(d.len(), 20);
        assert!((q.transpose() * &q - DMatrix::identity(20, 20)).norm() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense() {
        let mut a = random_symmetric(200, 3);
        let u = DVector::from_fn(200, |i, _| if i % 2 == 0 { 0.1 } else { -0.1 });
        a += &u * u.transpose() * 5.0;
        let e = NalgebraBackend.eigh(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (lam, v) = lanczos_top(&a, 200, 1e-12, &mut rng).unwrap();
        assert!((lam - e.values[199]).abs() < 1e-9);
        assert!((v.dot(&e.vectors.column(199)).abs() - 1.0).abs() < 1e-8);
    }
}
