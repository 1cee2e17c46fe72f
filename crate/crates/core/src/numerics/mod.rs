//! Shared numerical kernels.

mod eigen;
mod expm;
mod quadrature;
mod random;

pub use eigen::{eig_sym, SymEigResult};
pub use expm::expm;
pub use quadrature::{gauss_legendre, integrate_1d, integrate_breaks, QuadratureSpec};
pub use random::{sample_bivariate_normal, stream_rng, StreamRng};
