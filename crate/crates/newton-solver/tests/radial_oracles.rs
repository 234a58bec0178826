use newton_solver::{resistance_radial, solve_radial, uniform_grid, RadialProfile};

/// Slope-space DP over non-decreasing slope sequences drawn from
/// `{0} ∪ [1, 10]` (step 0.002). The budget `Σ tΔr ≤ M` is handled with a
/// Lagrange multiplier bisected until the budget fits.
fn dp_oracle(m: f64, l: f64, n: usize) -> f64 {
    let mut grid = vec![0.0];
    let mut s = 1.0;
    while s <= 10.0 + 1e-12 {
        grid.push(s);
        s += 0.002;
    }
    let r = uniform_grid(l, n);
    let k = grid.len();
    let inv: Vec<f64> = grid.iter().map(|s| 1.0 / (1.0 + s * s)).collect();

    // Returns (objective without the multiplier term, budget) of the DP optimum.
    let solve = |lambda: f64| -> (f64, f64) {
        let mut v = vec![0.0; k];
        let mut obj = vec![0.0; k];
        let mut bud = vec![0.0; k];
        let mut nv = vec![0.0; k];
        let mut nobj = vec![0.0; k];
        let mut nbud = vec![0.0; k];
        for i in 0..n {
            let w = r[i + 1] - r[i];
            let a = 0.5 * (r[i + 1] * r[i + 1] - r[i] * r[i]);
            let (mut best, mut bo, mut bb) = (f64::INFINITY, 0.0, 0.0);
            for j in 0..k {
                if i > 0 && v[j] < best {
                    best = v[j];
                    bo = obj[j];
                    bb = bud[j];
                }
                let base = if i == 0 { 0.0 } else { best };
                let c = a * inv[j];
                nv[j] = base + c + lambda * w * grid[j];
                nobj[j] = if i == 0 { c } else { bo + c };
                nbud[j] = if i == 0 { w * grid[j] } else { bb + w * grid[j] };
            }
            std::mem::swap(&mut v, &mut nv);
            std::mem::swap(&mut obj, &mut nobj);
            std::mem::swap(&mut bud, &mut nbud);
        }
        let j = (0..k).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        (obj[j], bud[j])
    };

    let (mut lo, mut hi) = (1e-6, 10.0 * l);
    assert!(solve(hi).1 <= m);
    for _ in 0..40 {
        let mid = (lo * hi).sqrt();
        if solve(mid).1 <= m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    solve(hi).0
}

/// Newton's parametric optimum: `r = r₀(1+p²)²/(4p)`,
/// `φ = M − r₀(¾p⁴ + p² − ln p − 7/4)/4` for `p ∈ [1, P]`, flat for `r < r₀`.
fn closed_form(m: f64, l: f64) -> (f64, f64) {
    let r0_of = |p: f64| 4.0 * p * l / (1.0 + p * p).powi(2);
    let drop = |p: f64| r0_of(p) * (0.75 * p.powi(4) + p * p - p.ln() - 1.75) / 4.0;
    let (mut lo, mut hi) = (1.0, 1e3);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if drop(mid) < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let r0 = r0_of(p);
    let prim = |p: f64| 0.75 * p.powi(4) + 2.5 * p * p + p.ln() + 0.5 / (p * p);
    let res = 0.5 * r0 * r0 + r0 * r0 / 16.0 * (prim(p) - prim(1.0));
    (res, r0)
}

#[test]
fn solver_matches_dp_oracle_and_closed_form() {
    let oracle = dp_oracle(1.0, 1.0, 20_000);
    let (exact, r0) = closed_form(1.0, 1.0);
    let sol = solve_radial(1.0, 1.0, 2000).unwrap();
    let gap = (sol.resistance - oracle).abs() / oracle;
    println!(
        "solver {:.10} dp {:.10} closed {:.10} gap {:.3e} r0 {:.5}",
        sol.resistance, oracle, exact, gap, r0
    );
    assert!((oracle - exact).abs() / exact < 1e-4);
    assert!(gap <= 1e-3);
    assert!((sol.resistance - exact).abs() / exact < 1e-4);
}

#[test]
fn optimum_has_flat_top_and_steep_flank() {
    let sol = solve_radial(1.0, 1.0, 2000).unwrap();
    assert!(sol.trace.is_monotone());
    let p = &sol.profile;
    let top = p.top_radius(1e-6).unwrap();
    let (_, r0) = closed_form(1.0, 1.0);
    assert!(top > 0.0 && (top - r0).abs() < 0.01, "top {top} vs {r0}");
    let min_flank = p
        .slopes()
        .iter()
        .filter(|s| **s < 0.0)
        .map(|s| -s)
        .fold(f64::INFINITY, f64::min);
    println!("top radius {top:.5}, smallest flank slope {min_flank:.6}");
    assert!(min_flank >= 0.99);
    assert!(sol.local_check.min_change >= -1e-14 * sol.resistance);
    assert_eq!(p.phi[p.phi.len() - 1], 0.0);
}

#[test]
fn vanishing_height_forces_flat_disc() {
    let sol = solve_radial(1e-6, 1.0, 200).unwrap();
    assert!(sol.profile.phi.iter().all(|v| *v <= 1e-6));
    assert!((sol.resistance - 0.5).abs() < 1e-5);
}

#[test]
fn closed_form_profile_samples_near_optimum() {
    let (exact, _) = closed_form(1.5, 1.0);
    let sol = solve_radial(1.5, 1.0, 1000).unwrap();
    assert!((sol.resistance - exact).abs() / exact < 1e-4);
    let check = RadialProfile::new(1.0, 1.5, sol.profile.r.clone(), sol.profile.phi.clone());
    assert!(check.is_ok());
    assert_eq!(resistance_radial(&check.unwrap()).unwrap(), sol.resistance);
}
