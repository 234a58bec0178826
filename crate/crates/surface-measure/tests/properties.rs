use convex_core::{shapes, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surface_measure::{
    eval_functional, measure_linear_combine, measure_of, DiscreteSurfaceMeasure, LawRegistry,
    Orientation, PressureLaw, TabulatedLaw,
};

#[test]
fn g_matches_p_on_dense_sample() {
    let reg = LawRegistry::with_builtins();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for law in reg.iter() {
        for _ in 0..10_000 {
            let (x, y): (f64, f64) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let s = (1.0 + x * x + y * y).sqrt();
            let n = Vec3::new(-x / s, -y / s, 1.0 / s);
            let (g, p) = (law.g(x, y), law.p(&n));
            assert!((g - p).abs() <= 1e-12 * (1.0 + p.abs()), "{} at ({x},{y}): {g} vs {p}", law.name());
            let f = law.f(&n);
            assert!((f - p * n.z).abs() <= 1e-12 * (1.0 + f.abs()), "{}", law.name());
        }
    }
}

fn random_measure(seed: u64, n: usize) -> DiscreteSurfaceMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DiscreteSurfaceMeasure::from_pairs(
        (0..n).map(|_| (shapes::random_unit(&mut rng), rng.gen_range(-2.0..2.0))),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functional_is_linear(s1 in 0u64..500, s2 in 0u64..500, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (m1, m2) = (random_measure(s1, 12), random_measure(s2, 7));
        let reg = LawRegistry::with_builtins();
        let tab = TabulatedLaw::sample("tab", &*reg.get("classical").unwrap(), 31, 12);
        let mut laws: Vec<&dyn PressureLaw> = reg.iter().map(|l| &**l).collect();
        laws.push(&tab);
        let combo = measure_linear_combine(&[a, b], &[&m1, &m2]);
        for law in laws {
            let lhs = eval_functional(law, &combo);
            let rhs = a * eval_functional(law, &m1) + b * eval_functional(law, &m2);
            let scale = a.abs() * m1.total_variation() + b.abs() * m2.total_variation();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + scale));
        }
    }

    #[test]
    fn closed_boundaries_close(seed in 0u64..1000, n in 4usize..50) {
        let c = shapes::random_polytope(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let all: Vec<usize> = (0..c.facets().len()).collect();
        let nu = measure_of(&c, &all, Orientation::Outward);
        prop_assert!(nu.closure_defect() <= 1e-9 * c.area());
        prop_assert!(nu.atoms().iter().all(|a| a.weight > 0.0));
        prop_assert!((nu.total_weight() - c.area()).abs() <= 1e-12 * c.area());
    }

    #[test]
    fn measure_is_additive(seed in 0u64..1000, split in 0.0f64..1.0) {
        let c = shapes::random_polytope(30, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let nf = c.facets().len();
        let k = ((nf as f64) * split) as usize;
        let first: Vec<usize> = (0..k).collect();
        let second: Vec<usize> = (k..nf).collect();
        let all: Vec<usize> = (0..nf).collect();
        let whole = measure_of(&c, &all, Orientation::Outward);
        let parts = measure_linear_combine(
            &[1.0, 1.0],
            &[&measure_of(&c, &first, Orientation::Outward), &measure_of(&c, &second, Orientation::Outward)],
        );
        prop_assert!(whole.max_deviation(&parts) <= 1e-12 * c.area());
    }
}

#[test]
fn cone_over_cube_top() {
    // ν₀ = ν_V − ν_top for the apex (0.5, 0.5, 1.5) over the unit cube
    let apex = Vec3::new(0.5, 0.5, 1.5);
    let top = [
        Vec3::new(0.0, 0.0, 1.0),
        Vec3::new(1.0, 0.0, 1.0),
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(0.0, 1.0, 1.0),
    ];
    let mut pairs = Vec::new();
    for i in 0..4 {
        let (a, b) = (top[i], top[(i + 1) % 4]);
        let n = (b - a).cross(&(apex - a));
        pairs.push((n, 0.5 * n.norm()));
    }
    let nu_v = DiscreteSurfaceMeasure::from_pairs(pairs);
    let nu_top = DiscreteSurfaceMeasure::from_pairs([(Vec3::z(), 1.0)]);
    let nu0 = measure_linear_combine(&[1.0, -1.0], &[&nu_v, &nu_top]);
    assert_eq!(nu0.len(), 5);
    for a in nu0.atoms() {
        if a.normal.z > 0.99 {
            assert_eq!(a.weight, -1.0);
        } else {
            assert!((a.weight - 2f64.sqrt() / 4.0).abs() < 1e-15);
            assert!((a.normal.z - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        }
    }
    // the pyramid over the top square closes: V plus the base facing down
    let base = DiscreteSurfaceMeasure::from_pairs([(-Vec3::z(), 1.0)]);
    let pyramid = measure_linear_combine(&[1.0, 1.0], &[&nu_v, &base]);
    assert!(pyramid.closure_defect() < 1e-15);
}
