use convex_core::PolytopeError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoseError {
    #[error("apex lies inside the body or on its boundary")]
    ApexInside,
    #[error("stretch parameter {0} meets the obstacle set")]
    ObstacleHit(f64),
    #[error("stretch parameter {0} outside (-0.5, 1]")]
    OutOfRange(f64),
    #[error("nose family invariant violated: {0}")]
    FamilyInvariantViolated(String),
    #[error("silhouette is not a single closed loop")]
    BadSilhouette,
    #[error("no stationary apex: {0}")]
    NoRoot(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}
