use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not {kind} within tolerance (defect {defect:e})")]
    KindViolated { kind: &'static str, defect: f64 },
    #[error("eigensolver failed to converge")]
    NoConvergence,
    #[error("matrix is singular or nearly singular (smallest singular value {0:e})")]
    Singular(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
