use crate::geom::Segment3;
use crate::tol::Tolerances;
use crate::Polytope;

pub fn segment_meets_interior(c: &Polytope, seg: &Segment3) -> bool {
    segment_meets_interior_with(c, seg, &Tolerances::default())
}

/// Whether the open segment `(a, b)` contains a point of `int C`, with the
/// interior shrunk by the strict tolerance. Liang-Barsky clipping.
pub fn segment_meets_interior_with(c: &Polytope, seg: &Segment3, tol: &Tolerances) -> bool {
    let eps = tol.strict * c.scale();
    let d = seg.b - seg.a;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for f in c.facets() {
        // need  n·a - c + t n·d < -eps
        let s0 = f.normal.dot(&seg.a) - f.offset + eps;
        let sd = f.normal.dot(&d);
        if sd.abs() <= f64::EPSILON * d.norm() {
            if s0 >= 0.0 {
                return false;
            }
        } else if sd > 0.0 {
            hi = hi.min(-s0 / sd);
        } else {
            lo = lo.max(-s0 / sd);
        }
        if lo >= hi {
            return false;
        }
    }
    if seg.is_degenerate() {
        return true;
    }
    hi > lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v3;
    use crate::shapes;

    #[test]
    fn crossing_segment() {
        let c = shapes::unit_cube();
        assert!(segment_meets_interior(&c, &Segment3::new(v3(-1.0, 0.5, 0.5), v3(2.0, 0.5, 0.5))));
    }

    #[test]
    fn boundary_segments_do_not_count() {
        let c = shapes::unit_cube();
        assert!(!segment_meets_interior(&c, &Segment3::new(v3(0.0, 0.0, -1.0), v3(0.0, 0.0, 2.0))));
        assert!(!segment_meets_interior(&c, &Segment3::new(v3(0.2, 0.3, 1.0), v3(0.8, 0.1, 1.0))));
        assert!(!segment_meets_interior(&c, &Segment3::new(v3(2.0, 2.0, 2.0), v3(3.0, 0.5, 0.5))));
    }

    #[test]
    fn endpoint_touching_only() {
        let c = shapes::unit_cube();
        // open segment from outside to a boundary point, approaching along the face
        assert!(!segment_meets_interior(&c, &Segment3::new(v3(-1.0, 0.5, 1.0), v3(0.5, 0.5, 1.0))));
        assert!(segment_meets_interior(&c, &Segment3::new(v3(0.5, 0.5, 2.0), v3(0.5, 0.5, 0.0))));
    }
}
