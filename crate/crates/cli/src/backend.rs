//! LAPACK implementation of the dense kernels (OpenBLAS underneath).

use std::os::raw::{c_char, c_int};
use std::sync::OnceLock;

use mdenoise_core::linalg::{DenseBackend, Eigen, NalgebraBackend};
use mdenoise_core::{Error, Result};
use nalgebra::DMatrix;

/// Falls back to [`NalgebraBackend`] when the linked LAPACK fails a
/// one-time accuracy probe. Some OpenBLAS builds pick CPU kernels that
/// return wrong blocked results; `OPENBLAS_CORETYPE` overrides the choice.
#[derive(Debug, Clone, Copy, Default)]
pub struct LapackBackend;

/// Above the blocking crossover of dgeqrf and dsyevd.
const PROBE_N: usize = 256;

impl LapackBackend {
    /// Whether calls go to LAPACK rather than the fallback.
    pub fn is_native() -> bool {
        static NATIVE: OnceLock<bool> = OnceLock::new();
        *NATIVE.get_or_init(|| {
            let ok = probe().unwrap_or(false);
            if !ok {
                log::warn!("linked LAPACK failed its accuracy probe; using the nalgebra backend");
            }
            ok
        })
    }
}

fn probe() -> Result<bool> {
    let n = PROBE_N;
    let a = DMatrix::from_fn(n, n, |i, j| ((i * 7919 + j * 104_729) % 1009) as f64 / 1009.0 - 0.5);
    let (q, _) = lapack_qr(a.clone())?;
    let orth = (q.transpose() * &q - DMatrix::<f64>::identity(n, n)).norm();
    let s = &a + a.transpose();
    let e = lapack_eigh(&s)?;
    let rec = (e.reconstruct(&e.values)? - &s).norm() / s.norm();
    Ok(orth < 1e-10 && rec < 1e-12)
}

fn dim(n: usize) -> Result<c_int> {
    c_int::try_from(n).map_err(|_| Error::InvalidParameter(format!("dimension {n} exceeds LAPACK range")))
}

fn check(info: c_int, routine: &str) -> Result<()> {
    match info {
        0 => Ok(()),
        i if i < 0 => Err(Error::Internal(format!("{routine}: argument {} rejected", -i))),
        i => Err(Error::Convergence(format!("{routine} failed with info = {i}"))),
    }
}

impl DenseBackend for LapackBackend {
    fn eigh(&self, a: &DMatrix<f64>) -> Result<Eigen> {
        if Self::is_native() {
            lapack_eigh(a)
        } else {
            NalgebraBackend.eigh(a)
        }
    }

    fn qr(&self, a: DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
        if Self::is_native() {
            lapack_qr(a)
        } else {
            NalgebraBackend.qr(a)
        }
    }
}

fn lapack_eigh(a: &DMatrix<f64>) -> Result<Eigen> {
    if !a.is_square() {
        return Err(Error::InvalidParameter("eigh needs a square matrix".into()));
    }
    let n = dim(a.nrows())?;
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: DMatrix::zeros(0, 0) });
    }
    let mut m = a.clone();
    let mut w = vec![0.0; a.nrows()];
    let (jobz, uplo) = (b'V' as c_char, b'L' as c_char);
    let mut info = 0;
    let mut wq = 0.0;
    let mut iwq: c_int = 0;
    // SAFETY: pointers reference live buffers sized as LAPACK requires;
    // the first call only queries workspace sizes.
    unsafe {
        lapack_sys::dsyevd_(
            &jobz,
            &uplo,
            &n,
            m.as_mut_ptr(),
            &n,
            w.as_mut_ptr(),
            &mut wq,
            &-1,
            &mut iwq,
            &-1,
            &mut info,
        );
    }
    check(info, "dsyevd")?;
    let lwork = wq as c_int;
    let liwork = iwq;
    let mut work = vec![0.0; lwork.max(1) as usize];
    let mut iwork = vec![0 as c_int; liwork.max(1) as usize];
    unsafe {
        lapack_sys::dsyevd_(
            &jobz,
            &uplo,
            &n,
            m.as_mut_ptr(),
            &n,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    check(info, "dsyevd")?;
    Ok(Eigen { values: w, vectors: m })
}

fn lapack_qr(mut a: DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if !a.is_square() {
        return Err(Error::InvalidParameter("qr needs a square matrix".into()));
    }
    let n = dim(a.nrows())?;
    if n == 0 {
        return Ok((a, vec![]));
    }
    let mut tau = vec![0.0; a.nrows()];
    let mut info = 0;
    let mut wq = 0.0;
    // SAFETY: as above; `a` is column-major with leading dimension n.
    unsafe {
        lapack_sys::dgeqrf_(&n, &n, a.as_mut_ptr(), &n, tau.as_mut_ptr(), &mut wq, &-1, &mut info);
    }
    check(info, "dgeqrf")?;
    let lwork = (wq as c_int).max(1);
    let mut work = vec![0.0; lwork as usize];
    unsafe {
        lapack_sys::dgeqrf_(&n, &n, a.as_mut_ptr(), &n, tau.as_mut_ptr(), work.as_mut_ptr(), &lwork, &mut info);
    }
    check(info, "dgeqrf")?;
    let diag = (0..a.nrows()).map(|i| a[(i, i)]).collect();
    unsafe {
        lapack_sys::dorgqr_(&n, &n, &n, a.as_mut_ptr(), &n, tau.as_ptr(), &mut wq, &-1, &mut info);
    }
    check(info, "dorgqr")?;
    let lwork = (wq as c_int).max(1);
    let mut work = vec![0.0; lwork as usize];
    unsafe {
        lapack_sys::dorgqr_(&n, &n, &n, a.as_mut_ptr(), &n, tau.as_ptr(), work.as_mut_ptr(), &lwork, &mut info);
    }
    check(info, "dorgqr")?;
    Ok((a, diag))
}
