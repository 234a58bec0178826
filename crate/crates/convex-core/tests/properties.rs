use convex_core::{
    classify_point, hull3d, intersect_halfspaces, shapes, PointKind, Polytope, Vec3,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cloud() -> impl Strategy<Value = Vec<Vec3>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y, z)| Vec3::new(x, y, z)),
        8..60,
    )
}

fn body(seed: u64, n: usize) -> Polytope {
    shapes::random_polytope(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn same_vertices(a: &Polytope, b: &Polytope, tol: f64) -> bool {
    a.vertices().len() == b.vertices().len()
        && a
            .vertices()
            .iter()
            .all(|p| b.vertices().iter().any(|q| (p - q).norm() <= tol))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hull_contains_inputs_and_is_idempotent(pts in cloud()) {
        let h = match hull3d(&pts) { Ok(h) => h, Err(_) => return Ok(()) };
        for p in &pts {
            prop_assert!(h.contains(p, 1e-9 * h.scale()));
        }
        let again = hull3d(h.vertices()).unwrap();
        prop_assert!(same_vertices(&h, &again, 0.0));
        prop_assert!(h.planarity_defect() <= 1e-9 * h.scale());
        for f in h.facets() {
            prop_assert!((f.normal.norm() - 1.0).abs() < 1e-12);
        }
        // every vertex is extreme: removing it shrinks the hull
        for (i, v) in h.vertices().iter().enumerate() {
            let rest: Vec<Vec3> = h.vertices().iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p).collect();
            if let Ok(r) = hull3d(&rest) {
                prop_assert!(!r.contains(v, 1e-12));
            }
        }
    }

    #[test]
    fn monotone_containment(pts in cloud(), extra in cloud()) {
        let small = match hull3d(&pts) { Ok(h) => h, Err(_) => return Ok(()) };
        let mut all = pts.clone();
        all.extend(extra);
        let big = hull3d(&all).unwrap();
        for v in small.vertices() {
            prop_assert!(big.contains(v, 1e-9 * big.scale()));
        }
    }

    #[test]
    fn dilation_composes(seed in 0u64..1000, a in 0.2f64..3.0, b in 0.2f64..3.0,
                         cx in -2.0f64..2.0, cy in -2.0f64..2.0, cz in -2.0f64..2.0) {
        let c = body(seed, 16);
        let o = Vec3::new(cx, cy, cz);
        let two = c.dilate(&o, a).unwrap().dilate(&o, b).unwrap();
        let one = c.dilate(&o, a * b).unwrap();
        for (p, q) in two.vertices().iter().zip(one.vertices()) {
            prop_assert!((p - q).norm() <= 1e-12 * (1.0 + p.norm()));
        }
        for i in 0..c.facets().len() {
            prop_assert!((one.facet_area(i) - a * a * b * b * c.facet_area(i)).abs() <= 1e-12 * one.area());
        }
    }

    #[test]
    fn halfspace_round_trip(seed in 0u64..1000, n in 6usize..40) {
        let c = body(seed, n);
        let back = intersect_halfspaces(&c.halfspaces()).unwrap();
        prop_assert!(same_vertices(&c, &back, 1e-9 * c.scale()));
        prop_assert_eq!(back.facets().len(), c.facets().len());
    }

    #[test]
    fn polytope_vertices_are_singular(seed in 0u64..1000, n in 4usize..30) {
        let c = body(seed, n);
        for v in c.vertices() {
            let k = classify_point(&c, v).unwrap();
            prop_assert_eq!(k.kind, PointKind::Singular);
            prop_assert!(k.normal_cone.len() >= 3);
        }
    }
}
