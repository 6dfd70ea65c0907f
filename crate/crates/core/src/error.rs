use thiserror::Error;

use crate::scalar::ScalarKind;

/// Errors raised by the algebra, module, frame and perturbation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the algebra needs at least one fiber")]
    EmptyAlgebra,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("mixed scalar kinds: expected {expected}, found {found}")]
    KindMismatch { expected: ScalarKind, found: ScalarKind },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("fiber index {index} out of range for {fibers} fibers")]
    IndexOutOfRange { index: usize, fibers: usize },
    #[error("element is not positive")]
    NotPositive,
    #[error("element is not invertible (fiber {fiber} has modulus {modulus:e})")]
    NotInvertible { fiber: usize, modulus: f64 },
    #[error("operation is not supported for quaternion fibers")]
    QuaternionUnsupported,
    #[error("invalid weight at position {index}: {reason}")]
    InvalidWeight { index: usize, reason: String },
    #[error("not a frame: smallest frame-operator eigenvalue {lambda_min:e} is below the threshold {threshold:e}")]
    NotAFrame { lambda_min: f64, threshold: f64 },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Variant name, for structured reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyAlgebra => "EmptyAlgebra",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::KindMismatch { .. } => "KindMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NotPositive => "NotPositive",
            Error::NotInvertible { .. } => "NotInvertible",
            Error::QuaternionUnsupported => "QuaternionUnsupported",
            Error::InvalidWeight { .. } => "InvalidWeight",
            Error::NotAFrame { .. } => "NotAFrame",
            Error::NotHermitian(_) => "NotHermitian",
            Error::InvalidMap(_) => "InvalidMap",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
