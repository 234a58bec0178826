use std::sync::Arc;

use newton_solver::{
    resistance_2d, second_variation_probe, solve_radial, verify_det_d2, verify_p2, verify_p4_p5,
    Bump, HeightField, Mesh, Omega, SolverError, Verdict,
};
use surface_measure::{ClassicalLaw, PressureLaw};

fn disc(rings: usize) -> (Omega, Arc<Mesh>) {
    let om = Omega::disc(1.0, 64).unwrap();
    let mesh = Arc::new(Mesh::auto(&om, rings).unwrap());
    (om, mesh)
}

#[test]
fn unit_slope_cone_has_no_band_violations() {
    let apothem = (std::f64::consts::PI / 64.0).cos();
    let om = Omega::disc(1.0 / apothem, 64).unwrap();
    let mesh = Arc::new(Mesh::auto(&om, 12).unwrap());
    let u = HeightField::from_fn(&om, 1.0, mesh, |p| 1.0 - om.gauge(p)).unwrap();
    let rep = verify_p2(&u, 0.05);
    assert!(rep.violations.is_empty());
    assert!(rep.note.contains("= 1"));
}

#[test]
fn cap_violations_match_slope_distribution() {
    // |∇u| = r for u = (1 − r²)/2, so the band (δ, 1−δ) covers the
    // annulus δ < r < 1 − δ with area fraction (1−δ)² − δ².
    let (om, mesh) = disc(24);
    let u = HeightField::from_fn(&om, 1.0, mesh, |p| 0.5 * (1.0 - p[0] * p[0] - p[1] * p[1])).unwrap();
    for delta in [0.05, 0.2] {
        let rep = verify_p2(&u, delta);
        let expect = (1.0 - delta).powi(2) - delta * delta;
        assert!((rep.area_fraction - expect).abs() < 0.03, "{} vs {expect}", rep.area_fraction);
    }
}

#[test]
fn flat_top_and_cone_top_sets() {
    let (om, mesh) = disc(20);
    let top = HeightField::from_fn(&om, 1.0, Arc::clone(&mesh), |p| {
        ((1.0 - om.gauge(p)) / 0.7).min(1.0)
    })
    .unwrap();
    let rep = verify_p4_p5(&top);
    assert!((rep.top_diameter - 0.6).abs() <= rep.mesh_spacing, "{rep:?}");
    assert!(rep.max_boundary_value <= 1e-12);
    let cone = HeightField::from_fn(&om, 1.0, mesh, |p| 1.0 - om.gauge(p)).unwrap();
    let rep = verify_p4_p5(&cone);
    assert!(rep.top_diameter <= rep.mesh_spacing);
    assert_eq!(rep.top_vertices, 1);
}

#[test]
fn embedded_radial_solution_has_flat_top_and_zero_boundary() {
    let (om, mesh) = disc(32);
    let sol = solve_radial(1.0, 1.0, 2000).unwrap();
    let u = HeightField::from_profile(&om, mesh, &sol.profile).unwrap();
    let rep = verify_p4_p5(&u);
    assert!(rep.max_boundary_value <= 1e-9);
    assert!(rep.top_diameter > 2.0 * rep.mesh_spacing);
}

#[test]
fn paraboloid_has_unit_determinant_and_cone_zero() {
    let (om, mesh) = disc(16);
    let par = HeightField::from_fn(&om, 1.0, Arc::clone(&mesh), |p| 1.0 - 0.5 * (p[0] * p[0] + p[1] * p[1])).unwrap();
    let rep = verify_det_d2(&par, 0.1);
    assert!(rep.used > 100);
    assert!((rep.median_abs_det - 1.0).abs() < 1e-9, "{rep:?}");
    assert!((rep.max_abs_det - 1.0).abs() < 1e-9);

    let (om, mesh) = disc(32);
    let cone = HeightField::from_fn(&om, 1.0, mesh, |p| 1.0 - p[0].hypot(p[1])).unwrap();
    let rep = verify_det_d2(&cone, 0.2);
    assert!(rep.used > 50);
    assert!(rep.median_abs_det < 1e-2, "{rep:?}");
}

#[test]
fn radial_field_converges_at_first_order() {
    // Euclidean-radius embedding on a square, so the kinks of the profile
    // cut the rings at every offset. Oracle: exact areas of square ∩ annulus.
    fn clipped_disc(a: f64, r: f64) -> f64 {
        use std::f64::consts::PI;
        if r <= a {
            PI * r * r
        } else if r >= a * 2f64.sqrt() {
            4.0 * a * a
        } else {
            PI * r * r - 4.0 * (r * r * (a / r).acos() - a * (r * r - a * a).sqrt())
        }
    }
    let sol = solve_radial(1.0, 1.0, 2000).unwrap();
    let p = &sol.profile;
    let a = 0.5f64.sqrt();
    let exact: f64 = (0..p.r.len() - 1)
        .map(|i| {
            let s = (p.phi[i + 1] - p.phi[i]) / (p.r[i + 1] - p.r[i]);
            ClassicalLaw.g(s, 0.0) * (clipped_disc(a, p.r[i + 1]) - clipped_disc(a, p.r[i]))
        })
        .sum();
    let om = Omega::square(a).unwrap();
    let err = |rings: usize| {
        let mesh = Arc::new(Mesh::auto(&om, rings).unwrap());
        let u = HeightField::from_fn(&om, 1.0, mesh, |x| p.value_at(x[0].hypot(x[1]))).unwrap();
        resistance_2d(&ClassicalLaw, &u).unwrap() - exact
    };
    let ratio = err(16) / err(32);
    assert!((1.5..=3.0).contains(&ratio), "ratio {ratio}");

    // On the full disc the same comparison is against 2π·R.
    let (om, mesh) = disc(32);
    let u = HeightField::from_profile(&om, mesh, p).unwrap();
    let f = resistance_2d(&ClassicalLaw, &u).unwrap();
    assert!((f - 2.0 * std::f64::consts::PI * sol.resistance).abs() < 0.02 * f);
}

const TAUS: [f64; 4] = [10.0, 1.0, 0.1, 0.01];

#[test]
fn probe_certifies_strictly_concave_cap() {
    let (om, mesh) = disc(12);
    let u = HeightField::from_fn(&om, 2.0, mesh, |p| 1.0 - 0.5 * (p[0] * p[0] + p[1] * p[1])).unwrap();
    let rep = second_variation_probe(&ClassicalLaw, &u, [0.0, 0.0], &TAUS, 0.5, Bump::Exponential).unwrap();
    assert_eq!(rep.verdict, Verdict::CertifiedNonoptimal);
    assert!((rep.a + 2.0).abs() < 1e-6 && (rep.b - 2.0).abs() < 1e-6, "{rep:?}");
    assert!(rep.q.iter().all(|q| *q < 0.0));
    for i1 in &rep.first {
        assert!(*i1 <= rep.first_bound * (1.0 + 1e-9));
    }
    let slope = rep.second_slope.unwrap();
    assert!((-2.3..=-1.7).contains(&slope), "slope {slope}");
}

#[test]
fn probe_is_inconclusive_on_cone_flank() {
    let (om, mesh) = disc(24);
    let u = HeightField::from_fn(&om, 1.0, mesh, |p| 1.0 - p[0].hypot(p[1])).unwrap();
    let rep = second_variation_probe(&ClassicalLaw, &u, [0.5, 0.0], &TAUS, 0.2, Bump::Polynomial).unwrap();
    assert!(!rep.strictly_concave);
    assert_eq!(rep.verdict, Verdict::Inconclusive);
}

#[test]
fn probe_with_mixed_eigenvalues_is_driven_by_small_tau() {
    // At |∇u| = 1 the classical D²g has eigenvalues 1/2 and −1/2.
    let (om, mesh) = disc(24);
    let u = HeightField::from_fn(&om, 3.0, mesh, |p| 2.0 - p[0] - 0.3 * (p[0] * p[0] + p[1] * p[1])).unwrap();
    let rep = second_variation_probe(&ClassicalLaw, &u, [0.0, 0.0], &TAUS, 0.5, Bump::Exponential).unwrap();
    assert!((rep.a - 0.5).abs() < 1e-6 && (rep.b - 0.5).abs() < 1e-6, "{rep:?}");
    assert!(rep.q.windows(2).all(|w| w[1] < w[0]), "{:?}", rep.q);
    assert!(*rep.q.last().unwrap() < -10.0);
    assert_eq!(rep.verdict, Verdict::CertifiedNonoptimal);
}

#[test]
fn probe_rejects_creases_and_bounds() {
    let (om, mesh) = disc(16);
    let ridge = HeightField::from_fn(&om, 2.0, Arc::clone(&mesh), |p| 1.5 - p[0].abs()).unwrap();
    let r = second_variation_probe(&ClassicalLaw, &ridge, [0.0, 0.2], &TAUS, 0.3, Bump::Exponential);
    assert!(matches!(r, Err(SolverError::CreaseDetected(_))), "{r:?}");

    let cap = HeightField::from_fn(&om, 2.0, Arc::clone(&mesh), |p| 1.0 - 0.5 * (p[0] * p[0] + p[1] * p[1])).unwrap();
    let r = second_variation_probe(&ClassicalLaw, &cap, [0.8, 0.0], &TAUS, 0.5, Bump::Exponential);
    assert!(matches!(r, Err(SolverError::TooCloseToBound(_))));

    let touching = HeightField::from_fn(&om, 1.0, mesh, |p| 1.0 - 0.5 * (p[0] * p[0] + p[1] * p[1])).unwrap();
    let r = second_variation_probe(&ClassicalLaw, &touching, [0.0, 0.0], &TAUS, 0.3, Bump::Exponential);
    assert!(matches!(r, Err(SolverError::TooCloseToBound(_))));
}
