use std::sync::Arc;

use newton_solver::{
    resistance_2d, solve_2d_on, solve_radial, HeightField, Mesh, Omega, Solve2dOptions, StepKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surface_measure::ClassicalLaw;

fn quick() -> Solve2dOptions {
    Solve2dOptions {
        random_starts: 2,
        refine: 2,
        max_iter: 60,
        max_polish_sweeps: 1,
        move_deltas: vec![1e-2],
        max_top_sides: 3,
        radial_cells: 200,
        ..Default::default()
    }
}

#[test]
fn disc_solution_beats_embedded_radial_profile() {
    let om = Omega::disc(1.0, 64).unwrap();
    let mesh = Arc::new(Mesh::auto(&om, 8).unwrap());
    let res = solve_2d_on(&ClassicalLaw, &om, 1.5, Arc::clone(&mesh), &[], &quick()).unwrap();
    let radial = solve_radial(1.5, 1.0, 2000).unwrap();
    let embedded = HeightField::from_profile(&om, mesh, &radial.profile).unwrap();
    let fr = resistance_2d(&ClassicalLaw, &embedded).unwrap();
    assert!(res.objective <= fr, "{} > {}", res.objective, fr);
    assert!(res.trace.is_monotone());
    assert_eq!(res.trace.rows[0].step, StepKind::Init);
    let f = resistance_2d(&ClassicalLaw, &res.field).unwrap();
    assert!((f - res.objective).abs() <= 1e-12 * f);
    let check = res.move_check.unwrap();
    assert!(check.trials > 0);
}

#[test]
fn tiny_height_gives_flat_resistance() {
    let om = Omega::disc(1.0, 64).unwrap();
    let mesh = Arc::new(Mesh::auto(&om, 6).unwrap());
    let res = solve_2d_on(&ClassicalLaw, &om, 1e-6, mesh, &[], &quick()).unwrap();
    assert!(res.field.values.iter().all(|v| *v <= 1e-6));
    assert!((res.objective - om.area()).abs() <= 1e-9 * om.area());
}

#[test]
fn square_objective_is_invariant_over_symmetric_orbit() {
    let om = Omega::square(1.0).unwrap();
    let mesh = Arc::new(Mesh::polar(&om, 5, 5).unwrap());
    let syms = mesh.square_symmetries(om.centroid());
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let seed: Vec<f64> = mesh
        .points
        .iter()
        .map(|p| 0.8 - 0.5 * (p[0] - 0.2).powi(2) - 0.3 * (p[1] + 0.1).powi(2) + rng.gen_range(0.0..0.05))
        .collect();
    let opts = Solve2dOptions {
        symmetrize: true,
        polish: false,
        ..quick()
    };
    let mut values = Vec::new();
    for perm in &syms {
        let mut img = vec![0.0; seed.len()];
        for (v, &to) in perm.iter().enumerate() {
            img[to] = seed[v];
        }
        let res = solve_2d_on(&ClassicalLaw, &om, 0.7, Arc::clone(&mesh), &[img], &opts).unwrap();
        values.push(res.objective);
    }
    for v in &values {
        assert!((v - values[0]).abs() <= 1e-6 * values[0], "{values:?}");
    }
}

#[test]
fn trace_csv_has_header_and_rows() {
    let om = Omega::disc(1.0, 16).unwrap();
    let mesh = Arc::new(Mesh::auto(&om, 4).unwrap());
    let res = solve_2d_on(&ClassicalLaw, &om, 1.0, mesh, &[], &quick()).unwrap();
    let csv = res.trace.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "iteration,objective,step");
    assert_eq!(lines.len(), res.trace.rows.len() + 1);
    assert!(lines[1].ends_with(",init"));
}

#[test]
fn rerun_with_same_seed_is_identical() {
    let om = Omega::disc(1.0, 16).unwrap();
    let mesh = Arc::new(Mesh::auto(&om, 4).unwrap());
    let opts = Solve2dOptions { seed: 9, ..quick() };
    let a = solve_2d_on(&ClassicalLaw, &om, 1.0, Arc::clone(&mesh), &[], &opts).unwrap();
    let b = solve_2d_on(&ClassicalLaw, &om, 1.0, mesh, &[], &opts).unwrap();
    assert_eq!(a.field.values, b.field.values);
    assert_eq!(a.trace.to_csv(), b.trace.to_csv());
}
