use thiserror::Error;

/// Errors raised by the numerical kernels and the physical models built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("covariance is not positive semidefinite: {0}")]
    NotPsd(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("time order violated: tau1 = {tau1} > tau2 = {tau2}")]
    TimeOrderViolation { tau1: f64, tau2: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
