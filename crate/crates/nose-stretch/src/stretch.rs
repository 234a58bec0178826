use convex_core::{
    hull3d_with, intersect_halfspaces_with, Halfspace, Polytope, Segment3, Tolerances, Vec3,
};
use serde::Serialize;

use crate::{NoseDecomposition, NoseError};

/// Negative stretch parameters are never explored beyond this.
const NEGATIVE_CAP: f64 = 0.5;

/// Set that the stretched body must keep for `s < 0`.
#[derive(Clone, Debug, Serialize)]
pub enum Obstacle {
    Point(Vec3),
    Segment(Segment3),
    /// Convex body, tested through its vertices.
    Body(Polytope),
}

/// Edges of `c` whose normal cone is wider than the singularity threshold.
pub fn singular_edge_obstacles(c: &Polytope, tol: &Tolerances) -> Vec<Obstacle> {
    c.edges()
        .iter()
        .filter(|e| c.edge_normal_angle(e) > tol.sing_angle)
        .map(|e| Obstacle::Segment(Segment3::new(c.vertices()[e.a], c.vertices()[e.b])))
        .collect()
}

fn dilated_near(d: &NoseDecomposition, mu: f64) -> Vec<Halfspace> {
    d.near
        .iter()
        .map(|&i| {
            let f = &d.body.facets()[i];
            let no = f.normal.dot(&d.apex);
            Halfspace::new(f.normal, no + mu * (f.offset - no))
        })
        .collect()
}

/// Whether every obstacle point inside `C` also satisfies the dilated near
/// halfspaces for parameter `s < 0`.
fn clears(d: &NoseDecomposition, s: f64, obstacles: &[Obstacle]) -> bool {
    let mu = (1.0 - s).sqrt();
    let cuts = dilated_near(d, mu);
    let eps = d.tolerances().strict * d.body.scale();
    let inside = |p: &Vec3| d.body.contains(p, eps);
    let violates = |p: &Vec3| cuts.iter().any(|h| h.signed_distance(p) > eps);
    for ob in obstacles {
        let hit = match ob {
            Obstacle::Point(p) => inside(p) && violates(p),
            Obstacle::Body(b) => b.vertices().iter().any(|p| inside(p) && violates(p)),
            Obstacle::Segment(seg) => match clip_to_body(&d.body, seg, eps) {
                None => false,
                // the violation set of each cut is convex, so it suffices to
                // test the clipped endpoints against every cut separately
                Some((p, q)) => cuts
                    .iter()
                    .any(|h| h.signed_distance(&p).max(h.signed_distance(&q)) > eps),
            },
        };
        if hit {
            return false;
        }
    }
    true
}

/// Part of a closed segment inside `c` (inflated by `eps`).
fn clip_to_body(c: &Polytope, seg: &Segment3, eps: f64) -> Option<(Vec3, Vec3)> {
    let dir = seg.b - seg.a;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for f in c.facets() {
        let s0 = f.normal.dot(&seg.a) - f.offset - eps;
        let sd = f.normal.dot(&dir);
        if sd == 0.0 {
            if s0 > 0.0 {
                return None;
            }
        } else if sd > 0.0 {
            hi = hi.min(-s0 / sd);
        } else {
            lo = lo.max(-s0 / sd);
        }
        if lo > hi {
            return None;
        }
    }
    Some((seg.at(lo), seg.at(hi)))
}

/// Largest `σ ∈ [0, 0.5]` such that every `s ∈ [−σ, 0]` keeps the obstacles,
/// found by bisection on the clearance predicate.
pub fn negative_range(d: &NoseDecomposition, obstacles: &[Obstacle]) -> f64 {
    if clears(d, -NEGATIVE_CAP, obstacles) {
        return NEGATIVE_CAP;
    }
    let (mut ok, mut bad) = (0.0f64, NEGATIVE_CAP);
    for _ in 0..60 {
        let mid = 0.5 * (ok + bad);
        if clears(d, -mid, obstacles) {
            ok = mid;
        } else {
            bad = mid;
        }
    }
    ok
}

pub fn stretch(d: &NoseDecomposition, s: f64, obstacles: &[Obstacle]) -> Result<Polytope, NoseError> {
    stretch_with(d, s, obstacles, d.tolerances())
}

/// The stretched body `C(s)`.
///
/// `s = 1` gives `Conv(C ∪ {O})`; otherwise the body is the intersection of
/// the far facets, the cone planes and the near facets dilated about `O` by
/// `√(1 − s)`. For `s < 0` the obstacles must stay inside the result.
pub fn stretch_with(
    d: &NoseDecomposition,
    s: f64,
    obstacles: &[Obstacle],
    tol: &Tolerances,
) -> Result<Polytope, NoseError> {
    if !(s > -NEGATIVE_CAP && s <= 1.0) {
        return Err(NoseError::OutOfRange(s));
    }
    if s == 1.0 {
        let mut pts = d.body.vertices().to_vec();
        pts.push(d.apex);
        return Ok(hull3d_with(&pts, tol)?);
    }
    if s < 0.0 && !clears(d, s, obstacles) {
        return Err(NoseError::ObstacleHit(s));
    }
    let mu = (1.0 - s).sqrt();
    let mut hs: Vec<Halfspace> = d
        .far
        .iter()
        .map(|&i| {
            let f = &d.body.facets()[i];
            Halfspace::new(f.normal, f.offset)
        })
        .collect();
    hs.extend(d.cone_halfspaces());
    hs.extend(dilated_near(d, mu));
    Ok(intersect_halfspaces_with(&hs, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose;
    use convex_core::geom::v3;
    use convex_core::shapes;

    fn same_vertices(a: &Polytope, b: &Polytope, tol: f64) -> bool {
        a.vertices().len() == b.vertices().len()
            && a.vertices().iter().all(|p| b.vertices().iter().any(|q| (p - q).norm() <= tol))
    }

    #[test]
    fn endpoints() {
        let c = shapes::unit_cube();
        let d = decompose(&c, &v3(0.5, 0.5, 1.5)).unwrap();
        assert!(same_vertices(&stretch(&d, 0.0, &[]).unwrap(), &c, 1e-9));
        let top = stretch(&d, 1.0, &[]).unwrap();
        assert_eq!(top.vertices().len(), 9);
        assert!((top.volume() - (1.0 + 1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn half_stretch_of_cube() {
        let c = shapes::unit_cube();
        let d = decompose(&c, &v3(0.5, 0.5, 1.5)).unwrap();
        let b = stretch(&d, 0.5, &[]).unwrap();
        // frustum: top square of side √0.5 at height 1.5 − 0.5·√0.5
        let mu = 0.5f64.sqrt();
        let h = 1.5 - 0.5 * mu;
        assert_eq!(b.vertices().len(), 12);
        assert!(b.vertices().iter().filter(|v| (v.z - h).abs() < 1e-12).count() == 4);
        let top = b.facets().iter().position(|f| f.normal.z > 0.999).unwrap();
        assert!((b.facet_area(top) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn singular_edges_block_negative_stretch_on_polytopes() {
        let c = shapes::unit_cube();
        let d = decompose(&c, &v3(0.5, 0.5, 1.5)).unwrap();
        let obs = singular_edge_obstacles(&c, &Tolerances::default());
        assert_eq!(obs.len(), 12);
        assert!(negative_range(&d, &obs) < 1e-8);
        assert_eq!(stretch(&d, -0.01, &obs).unwrap_err(), NoseError::ObstacleHit(-0.01));
        // with nothing to protect the whole capped range is admissible
        assert_eq!(negative_range(&d, &[]), 0.5);
        let cut = stretch(&d, -0.2, &[]).unwrap();
        assert!((cut.volume() - (1.0 - 0.5 * ((1.2f64).sqrt() - 1.0))).abs() < 1e-12);
    }

    #[test]
    fn obstacle_deep_inside_limits_range() {
        let c = shapes::unit_cube();
        let d = decompose(&c, &v3(0.5, 0.5, 1.5)).unwrap();
        // the top plane sits at 1.5 − 0.5·√(1 − s); it reaches z = 0.9 at s = −0.44
        let obs = [Obstacle::Point(v3(0.5, 0.5, 0.9))];
        let sigma = negative_range(&d, &obs);
        assert!((sigma - 0.44).abs() < 1e-9, "{sigma}");
        assert!(stretch(&d, -0.43, &obs).is_ok());
        assert!(stretch(&d, -0.45, &obs).is_err());
        assert!(stretch(&d, 1.01, &obs).is_err());
    }
}
