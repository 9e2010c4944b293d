//! Numerical kernels shared by the other modules.

mod fit;
mod hermite;
mod quad;
mod roots;
mod stats;
mod stencil;

pub use fit::{fit_log_singularity, fit_log_singularity_with, LogBase, SingularityFit};
pub use hermite::{gauss_hermite, gaussian_expectation};
pub use quad::{Panel, Quadrature};
pub use roots::{bisect, cubic_roots, quartic_roots, real_parts};
pub use stats::{ks_distance, spectral_histogram, wasserstein2_empirical, Histogram};
pub use stencil::{five_point_d1, five_point_d2, StencilGrid};
