//! Nose stretching of a convex polytope toward an external apex `O`.
//!
//! For `s ∈ [0, 1]` the stretched body is
//! `C(s) = ⋃_{√(1−s) ≤ λ ≤ 1} (λC + (1−λ)O)`, interpolating between `C` and
//! `Conv(C ∪ {O})`. Its surface-area measure moves along a straight line
//! `ν_C + s·(ν_V − ν_near)`, where `near` is the part of `∂C` visible from
//! `O` and `V` is the lateral surface of the tangent cone. Several apexes
//! with disjoint near regions stretch independently.

mod decompose;
mod error;
mod family;
pub mod instances;
mod multi;
mod stretch;

pub use decompose::{decompose, decompose_with, NoseDecomposition};
pub use error::NoseError;
pub use family::{
    family_measure_check, find_stationary_apex, resistance_along_family, stretch_derivative,
    AffineFit, DerivativeReport, FamilyMeasureReport, FamilyRow, StationaryApex,
};
pub use multi::{
    check_cone_disjointness, hull_equals_union, measure_multi_check, multi_stretch,
    DisjointnessReport, HullUnionReport, MultiMeasureReport, NoseFamily,
};
pub use stretch::{
    negative_range, singular_edge_obstacles, stretch, stretch_with, Obstacle,
};
