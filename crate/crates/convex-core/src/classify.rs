use serde::{Deserialize, Serialize};

use crate::geom::{unit_angle, Vec3};
use crate::tol::Tolerances;
use crate::{Polytope, PolytopeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Regular,
    Singular,
}

/// Normal cone of a boundary point and its regular/singular verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPointClass {
    pub kind: PointKind,
    /// Outward normals of the facets through the point.
    pub normal_cone: Vec<Vec3>,
    pub facets: Vec<usize>,
    /// Largest pairwise angle between the normals (rad).
    pub angular_diameter: f64,
}

pub fn classify_point(c: &Polytope, xi: &Vec3) -> Result<BoundaryPointClass, PolytopeError> {
    classify_point_with(c, xi, &Tolerances::default())
}

pub fn classify_point_with(
    c: &Polytope,
    xi: &Vec3,
    tol: &Tolerances,
) -> Result<BoundaryPointClass, PolytopeError> {
    let eps = tol.plane * c.scale();
    let worst = c.max_plane_distance(xi);
    if worst.abs() > eps {
        return Err(PolytopeError::NotOnBoundary(worst));
    }
    let facets: Vec<usize> = c
        .plane_distances(xi)
        .enumerate()
        .filter(|(_, d)| d.abs() <= eps)
        .map(|(i, _)| i)
        .collect();
    let normal_cone: Vec<Vec3> = facets.iter().map(|&i| c.facets()[i].normal).collect();
    let mut angular_diameter = 0.0f64;
    for i in 0..normal_cone.len() {
        for j in i + 1..normal_cone.len() {
            angular_diameter = angular_diameter.max(unit_angle(&normal_cone[i], &normal_cone[j]));
        }
    }
    let kind = if angular_diameter > tol.sing_angle {
        PointKind::Singular
    } else {
        PointKind::Regular
    };
    Ok(BoundaryPointClass {
        kind,
        normal_cone,
        facets,
        angular_diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v3;
    use crate::shapes;

    #[test]
    fn cube_face_center_is_regular() {
        let c = shapes::unit_cube();
        let k = classify_point(&c, &v3(0.5, 0.5, 1.0)).unwrap();
        assert_eq!(k.kind, PointKind::Regular);
        assert_eq!(k.normal_cone.len(), 1);
        assert!((k.normal_cone[0] - v3(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn cube_corner_and_edge_are_singular() {
        let c = shapes::unit_cube();
        let k = classify_point(&c, &v3(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(k.kind, PointKind::Singular);
        assert_eq!(k.normal_cone.len(), 3);
        let e = classify_point(&c, &v3(0.5, 0.0, 0.0)).unwrap();
        assert_eq!(e.normal_cone.len(), 2);
        assert!((e.angular_diameter - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn off_boundary_is_rejected() {
        let c = shapes::unit_cube();
        assert!(matches!(
            classify_point(&c, &v3(0.5, 0.5, 0.5)),
            Err(PolytopeError::NotOnBoundary(_))
        ));
        assert!(classify_point(&c, &v3(0.5, 0.5, 1.1)).is_err());
    }
}
