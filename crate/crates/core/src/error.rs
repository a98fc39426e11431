//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("sl2-triple construction failed: {0}")]
    ConstructionFailed(String),
    #[error("bilinear form is degenerate: {0}")]
    DegenerateForm(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("leading coefficient is not scalar-valued")]
    NonScalarLeading,
    #[error("leading coefficient is singular")]
    SingularLeading,
    #[error("compressed inverse is not invertible")]
    CompressionNotInvertible,
    #[error("Dirac pivot is not invertible")]
    PivotNotInvertible,
    #[error("element has positive Kazhdan weight {0}/2")]
    PositiveWeight(i64),
    #[error("family has no closed-form shift matrix: {0}")]
    UnsupportedFamily(String),
    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),
    #[error("bilinear form required when beta != 0")]
    FormMissing,
    #[error("compression maps violate orthogonality")]
    OrthogonalityViolation,
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
