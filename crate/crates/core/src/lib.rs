//! Bayesian denoising of symmetric matrices observed through additive
//! rotation-invariant noise, `Y = sqrt(gamma) S + Z`.
//!
//! The crate is `no_std` (it needs `alloc`). Linear algebra runs on
//! `nalgebra`; the eigensolver is pluggable through [`linalg::DenseBackend`]
//! so that a LAPACK backend can be supplied by a std host.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ensembles;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod measures;
pub mod numerics;
pub mod theory;

pub use error::{Error, Result};
