//! Errors raised by polytope operations.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("halfspace intersection is unbounded")]
    Unbounded,
    #[error("halfspace intersection is empty or has no interior")]
    Empty,
    #[error("point is not on the boundary (distance {0:.3e})")]
    NotOnBoundary(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("boundary point is singular (normal cone diameter {0:.3e} rad)")]
    SingularPoint(f64),
    #[error("no valid nose point: {0}")]
    NoValidPoint(String),
    #[error("mesh parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] IoErrorWrapper),
}

/// `std::io::Error` is not `Clone`; keep the message only.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct IoErrorWrapper(pub String);

impl From<std::io::Error> for PolytopeError {
    fn from(e: std::io::Error) -> Self {
        PolytopeError::Io(IoErrorWrapper(e.to_string()))
    }
}
