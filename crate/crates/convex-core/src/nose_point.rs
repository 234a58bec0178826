use crate::geom::{Segment3, Vec3};
use crate::tol::Tolerances;
use crate::{classify_point_with, segment_meets_interior_with, PointKind, Polytope, PolytopeError};

const RETRIES: usize = 8;

pub fn place_nose_point(
    c: &Polytope,
    xi: &Vec3,
    a: &[Vec3],
    eps: f64,
) -> Result<Vec3, PolytopeError> {
    place_nose_point_with(c, xi, a, eps, &Tolerances::default())
}

/// Point `O ∉ C` with `|O − ξ| < ε` such that every open segment `(O, a)`,
/// `a ∈ A`, meets the interior of `C`.
///
/// `O` is taken on the outward ray through `ξ` along the area-weighted mean
/// of the incident facet normals, at distance `ε/2`. A plane orthogonal to
/// that direction must separate `ξ` from `A` and from the vertices at
/// distance `≥ ε`. On failure `ε` is halved, at most eight times.
pub fn place_nose_point_with(
    c: &Polytope,
    xi: &Vec3,
    a: &[Vec3],
    eps: f64,
    tol: &Tolerances,
) -> Result<Vec3, PolytopeError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(PolytopeError::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    let scale = c.scale();
    let vtol = tol.plane * scale;
    let vi = c
        .vertices()
        .iter()
        .position(|v| (v - xi).norm() <= vtol)
        .ok_or_else(|| PolytopeError::InvalidArgument("ξ is not a vertex".into()))?;
    let class = classify_point_with(c, xi, tol)?;
    if class.kind == PointKind::Singular {
        return Err(PolytopeError::SingularPoint(class.angular_diameter));
    }
    if a.iter().any(|p| (p - xi).norm() <= vtol) {
        return Err(PolytopeError::InvalidArgument("ξ belongs to A".into()));
    }
    if a.iter().any(|p| !c.contains(p, vtol)) {
        return Err(PolytopeError::InvalidArgument("A is not contained in C".into()));
    }

    let mut n = Vec3::zeros();
    for fi in c.vertex_facets(vi) {
        n += c.facets()[fi].normal * c.facet_area(fi);
    }
    let n = n.normalize();
    let top = n.dot(xi);
    let level_a = a.iter().map(|p| n.dot(p)).fold(f64::NEG_INFINITY, f64::max);

    let mut e = eps;
    let mut last = String::new();
    for _ in 0..=RETRIES {
        let level_far = c
            .vertices()
            .iter()
            .filter(|v| (*v - xi).norm() >= e)
            .map(|v| n.dot(v))
            .fold(f64::NEG_INFINITY, f64::max);
        let level = level_a.max(level_far);
        if level >= top - tol.strict * scale {
            last = "no plane separates ξ from A and distant vertices".into();
            e *= 0.5;
            continue;
        }
        let o = xi + n * (0.5 * e);
        if c.max_plane_distance(&o) <= tol.strict * scale {
            last = "candidate apex is not outside C".into();
        } else if let Some(bad) = a
            .iter()
            .find(|p| !segment_meets_interior_with(c, &Segment3::new(o, **p), tol))
        {
            last = format!("segment to {:?} misses the interior", bad.as_slice());
        } else {
            return Ok(o);
        }
        e *= 0.5;
    }
    Err(PolytopeError::NoValidPoint(last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v3;
    use crate::{segment_meets_interior, shapes};

    #[test]
    fn cube_corner_is_rejected() {
        let c = shapes::unit_cube();
        assert!(matches!(
            place_nose_point(&c, &v3(1.0, 1.0, 1.0), &[], 0.1),
            Err(PolytopeError::SingularPoint(_))
        ));
    }

    #[test]
    fn sphere_pole() {
        let c = shapes::fibonacci_sphere(1000).unwrap();
        let north = v3(0.0, 0.0, 1.0);
        let south = v3(0.0, 0.0, -1.0);
        let o = place_nose_point(&c, &north, &[south], 0.1).unwrap();
        assert!((o - north).norm() < 0.1);
        assert!((o - v3(0.0, 0.0, 1.05)).norm() < 5e-3, "{o:?}");
        assert!(!c.contains(&o, 0.0));
        assert!(segment_meets_interior(&c, &Segment3::new(o, south)));
        let o2 = place_nose_point(&c, &north, &[], 0.1).unwrap();
        assert!((o2 - north).norm() < 0.1 && !c.contains(&o2, 0.0));
    }
}
