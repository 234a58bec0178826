//! Numerical minimization of resistance functionals over concave
//! heightfields, radial and two-dimensional, with verifiers for the
//! structural properties expected of minimizers.

mod concave;
mod error;
mod field;
mod mesh;
mod probe;
mod radial;
mod solve2d;
mod trace;
mod verify;

pub use concave::{concave_envelope, project_concave};
pub use error::SolverError;
pub use field::{resistance_2d, FieldSidecar, HeightField};
pub use mesh::{Mesh, Omega, P2};
pub use probe::{
    second_variation_probe, second_variation_probe_with, Bump, SecondVariationReport, Verdict,
};
pub use radial::{
    project_profile, resistance_radial, solve_radial, solve_radial_with, uniform_grid,
    LocalCheck, RadialProfile, RadialSolution, RadialSolveOptions,
};
pub use solve2d::{solve_2d, solve_2d_on, MoveCheck, Solve2dOptions, Solve2dResult, StartReport};
pub use trace::{StepKind, Trace, TraceRow};
pub use verify::{
    crease_edges, fit_quadratic, verify_det_d2, verify_det_d2_with, verify_p2, verify_p4_p5,
    verify_p4_p5_with, DetReport, LocalQuadratic, P2Report, P4P5Report, P2_LABEL,
};
