use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitian(f64),
    #[error(
        "matrix is not positive semidefinite (min eigenvalue {min:.3e}, allowed {allowed:.3e})"
    )]
    NotPsd { min: f64, allowed: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operands live in different algebras")]
    AlgebraMismatch,
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("functional is zero")]
    ZeroFunctional,
    #[error("element is not a projection (residual {0:.3e})")]
    NotAProjection(f64),
    #[error("f is not absolutely continuous with respect to g")]
    NotAbsolutelyContinuous,
    #[error("invalid truncation level {0}: need N >= 2")]
    InvalidLevel(usize),
    #[error("truncation level {0} exceeds the cap of 40 (weights 10^-N lose precision)")]
    UnderflowRisk(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
