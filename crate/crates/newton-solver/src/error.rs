use convex_core::PolytopeError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid radial profile: {0}")]
    InvalidProfile(String),
    #[error("invalid heightfield: {0}")]
    InvalidField(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("crease within the probe support (gradient jump {0:.3} rad)")]
    CreaseDetected(f64),
    #[error("probe support reaches the bounds 0 or M (value {0})")]
    TooCloseToBound(f64),
    #[error("heightfield file: {0}")]
    Io(String),
    #[error(transparent)]
    Geometry(#[from] PolytopeError),
}
