//! Three-dimensional convex geometry on polytopes: hulls, halfspace
//! intersections, dilations, boundary point classification and visibility
//! predicates, plus small shared utilities (tolerances, number formatting).

mod classify;
mod error;
pub mod fmt;
pub mod geom;
mod halfspace;
mod hull;
pub use hull::hull_triangles;
pub mod io;
mod lp;
mod nose_point;
mod polytope;
pub mod sample;
pub mod shapes;
pub mod tol;
mod visibility;

pub use classify::{classify_point, classify_point_with, BoundaryPointClass, PointKind};
pub use error::{IoErrorWrapper, PolytopeError};
pub use geom::{Segment3, Vec3};
pub use halfspace::{intersect_halfspaces, intersect_halfspaces_with, Halfspace};
pub use lp::chebyshev_center;
pub use nose_point::{place_nose_point, place_nose_point_with};
pub use polytope::{dilate, hull3d, hull3d_with, Edge, Facet, Polytope};
pub use tol::Tolerances;
pub use visibility::{segment_meets_interior, segment_meets_interior_with};
