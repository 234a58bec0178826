//! Stock bodies used by tests, suites and the command line.

use rand::Rng;

use crate::geom::{v3, Vec3};
use crate::{hull3d, Polytope, PolytopeError};

pub fn cube_corners(lo: f64, hi: f64) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(8);
    for &x in &[lo, hi] {
        for &y in &[lo, hi] {
            for &z in &[lo, hi] {
                out.push(v3(x, y, z));
            }
        }
    }
    out
}

/// `[0, 1]³`.
pub fn unit_cube() -> Polytope {
    hull3d(&cube_corners(0.0, 1.0)).expect("cube is nondegenerate")
}

/// Tetrahedron with vertices `(1,1,1), (1,−1,−1), (−1,1,−1), (−1,−1,1)`.
pub fn regular_tetrahedron() -> Polytope {
    hull3d(&[
        v3(1.0, 1.0, 1.0),
        v3(1.0, -1.0, -1.0),
        v3(-1.0, 1.0, -1.0),
        v3(-1.0, -1.0, 1.0),
    ])
    .expect("tetrahedron is nondegenerate")
}

/// Points on the unit sphere on a Fibonacci spiral, both poles included.
///
/// The spiral latitudes are offset away from the poles so that the pole
/// neighborhoods are about as regular as the rest of the point set.
pub fn fibonacci_points(n: usize) -> Vec<Vec3> {
    const POLE_OFFSET: f64 = 0.36;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let m = n.saturating_sub(2);
    let mut out = Vec::with_capacity(n);
    out.push(v3(0.0, 0.0, 1.0));
    for i in 0..m {
        let z = 1.0 - 2.0 * (i as f64 + POLE_OFFSET) / (m as f64 - 1.0 + 2.0 * POLE_OFFSET);
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * (i + 1) as f64;
        out.push(v3(r * phi.cos(), r * phi.sin(), z));
    }
    if n >= 2 {
        out.push(v3(0.0, 0.0, -1.0));
    }
    out
}

/// Polytope inscribed in the unit sphere with `n` vertices, poles included.
pub fn fibonacci_sphere(n: usize) -> Result<Polytope, PolytopeError> {
    hull3d(&fibonacci_points(n))
}

/// Uniform random point on the unit sphere.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let p = v3(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let r = p.norm();
        if r > 1e-3 && r <= 1.0 {
            return p / r;
        }
    }
}

/// Random polytope with `n` vertices on an axis-aligned ellipsoid with
/// semi-axes drawn from `[0.6, 1]`; every sample is an extreme point.
pub fn random_polytope<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Polytope, PolytopeError> {
    let axes = v3(rng.gen_range(0.6..1.0), rng.gen_range(0.6..1.0), rng.gen_range(0.6..1.0));
    let pts: Vec<Vec3> = (0..n).map(|_| random_unit(rng).component_mul(&axes)).collect();
    hull3d(&pts)
}
