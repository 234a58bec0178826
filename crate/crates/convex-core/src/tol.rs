//! Numerical tolerances shared across the crate.
//!
//! All length tolerances are absolute at unit scale; geometric routines
//! multiply them by the diameter of the body they operate on.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Coplanarity / on-plane tolerance for hulls and facet merging.
    pub plane: f64,
    /// Strict-interior tolerance for open-segment and visibility tests.
    pub strict: f64,
    /// Normal-cone angular diameter above which a boundary point is singular (rad).
    pub sing_angle: f64,
    /// Angular tolerance for merging measure atoms (rad).
    pub normal_angle: f64,
    /// Concavity tolerance for heightfields and radial profiles.
    pub conc: f64,
    /// Top-set tolerance relative to `M`.
    pub top_rel: f64,
    /// Gradient jump across an edge that marks a crease (rad).
    pub crease: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            plane: 1e-9,
            strict: 1e-10,
            sing_angle: 0.15,
            normal_angle: 1e-9,
            conc: 1e-9,
            top_rel: 1e-6,
            crease: 0.2,
        }
    }
}
