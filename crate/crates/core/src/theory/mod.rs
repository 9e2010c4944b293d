//! Closed-form information-theoretic quantities: linear-rank MMSE and mutual
//! information, free entropy and Fisher information, the rank-one replica
//! formula and the sub-linear-rank formulas.

mod linear;
mod rademacher;
mod replica;
mod scalar;
mod sublinear;

pub use linear::{
    cube_integral, free_entropy, free_fisher, hilbert_identities, log_energy, mi_linear, mmse_linear, HilbertIdentities,
};
pub use rademacher::{mmse_derivative_integrals, rademacher_mmse_expansion, MmseExpansion, NEAR_CRITICAL};
pub use replica::{rank_one_replica, replica_functional, ReplicaSolution};
pub use scalar::{scalar_mi, scalar_mmse, PriorLaw, ScalarPrior};
pub use sublinear::{
    arin_mi, husson_k, sublinear_mi_spherical, sublinear_rie_mse_uniform_noise, sublinear_rie_mse_wigner,
};

use alloc::string::String;

/// A value that may carry a numerical warning (near-critical evaluations).
#[derive(Debug, Clone, PartialEq)]
pub struct Warned<T> {
    pub value: T,
    pub warning: Option<String>,
}

impl<T> Warned<T> {
    pub fn clean(value: T) -> Self {
        Warned { value, warning: None }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Warned<U> {
        Warned { value: f(self.value), warning: self.warning }
    }
}
