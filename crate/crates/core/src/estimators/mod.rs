//! Reconstruction procedures and their scoring.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::ensembles::SymmetricMatrixInstance;
use crate::error::{invalid, Error, Result};

mod amp;
mod rie;

pub use amp::{amp_rank_one, decimation_amp, AmpInit, AmpOptions, AmpState, DecimationResult};
pub use rie::{oracle, rie_linear, rie_sublinear, sublinear_threshold, HilbertMode, SublinearNoise};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    RieLinear,
    RieSublinear,
    Oracle,
    DecimationAmp,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::RieLinear, Method::RieSublinear, Method::Oracle, Method::DecimationAmp];

    pub fn name(self) -> &'static str {
        match self {
            Method::RieLinear => "rie-linear",
            Method::RieSublinear => "rie-sublinear",
            Method::Oracle => "oracle",
            Method::DecimationAmp => "dec-amp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| invalid(format!("unknown method `{s}`")))
    }
}

/// Eigenvalue shrinkage in the observation's eigenbasis.
#[derive(Debug, Clone)]
pub struct ShrinkageResult {
    pub estimate: SymmetricMatrixInstance,
    /// Aligned with the ascending eigenvalues of the observation.
    pub xi: Vec<f64>,
    pub method: Method,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    PerRank(usize),
    PerDim,
}

/// `||S - S_hat||_F^2` divided by the rank or the dimension.
pub fn mse(s: &SymmetricMatrixInstance, estimate: &SymmetricMatrixInstance, norm: Normalization) -> Result<f64> {
    let d = s.squared_distance(estimate)?;
    let k = match norm {
        Normalization::PerRank(0) => return Err(invalid("rank must be positive")),
        Normalization::PerRank(m) => m,
        Normalization::PerDim => s.n(),
    };
    Ok(d / k as f64)
}
