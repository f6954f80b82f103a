use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subsystem index {index} out of range for {len} subsystems")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("eigensolver did not converge after {0} iterations")]
    NotConverged(usize),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("state is not normalized (trace {0})")]
    NotNormalized(f64),
    #[error("fidelity overshoot {0:e} beyond rounding slack")]
    FidelityOvershoot(f64),
    #[error("unphysical covariance matrix (min eigenvalue of cov + iΩ/2 is {0:e})")]
    Unphysical(f64),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Fock cutoff {cutoff} captures only {captured} of the norm")]
    InsufficientCutoff { cutoff: usize, captured: f64 },
    #[error("metric not supported: {0}")]
    UnsupportedMetric(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
