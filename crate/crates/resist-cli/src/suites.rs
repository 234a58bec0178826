//! Named verification suites, selectable at run time.

use std::collections::BTreeMap;
use std::sync::Arc;

use convex_core::fmt::g17;
use convex_core::{shapes, Tolerances, Vec3};
use newton_solver::{
    resistance_2d, resistance_radial, second_variation_probe_with, solve_2d_on, solve_radial,
    uniform_grid, verify_det_d2_with, verify_p2, verify_p4_p5_with, Bump, HeightField, Mesh,
    Omega, RadialProfile, RadialSolution, Solve2dOptions, Verdict,
};
use nose_stretch::instances::{
    cube_instance, random_instance, random_two_apex_instance, rng, two_apex_cube,
};
use nose_stretch::{
    check_cone_disjointness, decompose_with, family_measure_check, find_stationary_apex,
    hull_equals_union, resistance_along_family, singular_edge_obstacles, stretch_derivative,
    NoseFamily,
};
use serde::Serialize;
use serde_json::{json, Value};
use surface_measure::{AreaLaw, ClassicalLaw, PressureLaw};

use crate::CliError;

/// One measured quantity against its bound.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Bounds exclude equality.
    pub strict: bool,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, value: f64, lower: Option<f64>, upper: Option<f64>, strict: bool) -> Self {
        let ok_lo = lower.is_none_or(|lo| if strict { value > lo } else { value >= lo });
        let ok_hi = upper.is_none_or(|hi| if strict { value < hi } else { value <= hi });
        Self {
            name: name.into(),
            value,
            lower,
            upper,
            strict,
            passed: !value.is_nan() && ok_lo && ok_hi,
        }
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, None, Some(bound), false)
    }

    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, None, Some(bound), true)
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, Some(bound), None, false)
    }

    pub fn above(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, Some(bound), None, true)
    }

    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, value, Some(lo), Some(hi), false)
    }

    pub fn holds(name: &str, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Some(1.0), None, false)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub details: Value,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(g17).unwrap_or_default();
        let mut out = String::from("check,value,lower,upper,strict,passed\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.name,
                g17(c.value),
                opt(c.lower),
                opt(c.upper),
                c.strict,
                c.passed
            ));
        }
        out
    }
}

pub struct SuiteContext {
    pub seed: u64,
    pub tol: Tolerances,
}

pub trait VerificationSuite: Send + Sync {
    fn name(&self) -> &str;
    fn description(&self) -> &str;
    fn run(&self, ctx: &SuiteContext) -> Result<SuiteReport, CliError>;
}

pub struct SuiteRegistry {
    suites: BTreeMap<String, Box<dyn VerificationSuite>>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl SuiteRegistry {
    pub fn empty() -> Self {
        Self {
            suites: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Trivial));
        r.register(Box::new(Nose));
        r.register(Box::new(Stationary));
        r.register(Box::new(Radial));
        r.register(Box::new(Determinant));
        r.register(Box::new(Probe));
        r.register(Box::new(Appendix));
        r
    }

    pub fn register(&mut self, suite: Box<dyn VerificationSuite>) {
        self.suites.insert(suite.name().to_string(), suite);
    }

    pub fn get(&self, name: &str) -> Result<&dyn VerificationSuite, CliError> {
        self.suites.get(name).map(|s| s.as_ref()).ok_or_else(|| {
            CliError::Config(format!(
                "unknown suite {name:?}; available: {}",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.suites.keys().cloned().collect()
    }
}

fn report(name: &str, ctx: &SuiteContext, checks: Vec<Check>, details: Value) -> SuiteReport {
    SuiteReport {
        suite: name.into(),
        seed: ctx.seed,
        checks,
        details,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn eleven() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

struct Trivial;

impl VerificationSuite for Trivial {
    fn name(&self) -> &str {
        "trivial"
    }

    fn description(&self) -> &str {
        "flat and unit-slope fields, radial flat and cone profiles"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<SuiteReport, CliError> {
        let om = Omega::disc(1.0, 64)?;
        let mesh = Arc::new(Mesh::auto(&om, 8)?);
        let flat = HeightField::from_fn(&om, 1.0, mesh, |_| 1.0)?;
        let f_flat = resistance_2d(&ClassicalLaw, &flat)?;

        // The gauge cone of a regular polygon has slope 1/apothem.
        let apothem = (std::f64::consts::PI / 64.0).cos();
        let om2 = Omega::disc(1.0 / apothem, 64)?;
        let mesh2 = Arc::new(Mesh::auto(&om2, 8)?);
        let cone = HeightField::from_fn(&om2, 1.0, mesh2, |p| 1.0 - om2.gauge(p))?;
        let f_cone = resistance_2d(&ClassicalLaw, &cone)?;

        let r = uniform_grid(1.0, 1000);
        let zero = RadialProfile::new(1.0, 1.0, r.clone(), vec![0.0; r.len()])?;
        let lin = RadialProfile::new(1.0, 1.0, r.clone(), r.iter().map(|x| 1.0 - x).collect())?;
        let (r_flat, r_cone) = (resistance_radial(&zero)?, resistance_radial(&lin)?);

        let checks = vec![
            Check::at_most("flat-field-rel-error", rel(f_flat, om.area()), 1e-12),
            Check::at_most("unit-cone-rel-error", rel(f_cone, om2.area() / 2.0), 1e-12),
            Check::at_most("radial-flat-rel-error", rel(r_flat, 0.5), 1e-12),
            Check::at_most("radial-cone-rel-error", rel(r_cone, 0.25), 1e-12),
        ];
        let details = json!({
            "flat": f_flat, "area": om.area(), "cone": f_cone, "cone_area": om2.area(),
            "radial_flat": r_flat, "radial_cone": r_cone,
        });
        Ok(report(self.name(), ctx, checks, details))
    }
}

struct Nose;

impl VerificationSuite for Nose {
    fn name(&self) -> &str {
        "nose"
    }

    fn description(&self) -> &str {
        "measure linearity, affine resistance, right derivative and closure along nose families"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<SuiteReport, CliError> {
        let grid = eleven();
        let mut instances = vec![("cube".to_string(), cube_instance())];
        for i in 0..5 {
            let seed = ctx.seed.wrapping_add(i);
            instances.push((format!("random-{seed}"), random_instance(seed)));
        }
        let laws: [&dyn PressureLaw; 2] = [&ClassicalLaw, &AreaLaw];
        let (mut dev, mut closure, mut deriv) = (0.0f64, 0.0f64, 0.0f64);
        let mut residual = [0.0f64; 2];
        let mut rows = Vec::new();
        for (label, (c, o)) in &instances {
            let d = decompose_with(c, o, &ctx.tol)?;
            let fm = family_measure_check(&d, &grid)?;
            dev = dev.max(fm.max_deviation);
            closure = closure.max(fm.closure.iter().copied().fold(0.0, f64::max));
            let obstacles = singular_edge_obstacles(c, &ctx.tol);
            let mut entry = json!({"instance": label, "measure_deviation": fm.max_deviation});
            for (k, law) in laws.iter().enumerate() {
                let (_, fit) = resistance_along_family(*law, &d, &grid)?;
                residual[k] = residual[k].max(fit.max_residual);
                let dr = stretch_derivative(*law, &d, &obstacles, 1e-4)?;
                deriv = deriv.max(dr.rel_error);
                entry[law.name()] = json!({
                    "affine_residual": fit.max_residual,
                    "slope": fit.slope,
                    "derivative": dr,
                });
            }
            rows.push(entry);
        }
        let checks = vec![
            Check::at_most("measure-deviation", dev, 1e-8),
            Check::at_most("affine-residual-classical", residual[0], 1e-9),
            Check::at_most("affine-residual-area", residual[1], 1e-9),
            Check::at_most("derivative-rel-error", deriv, 1e-5),
            Check::at_most("closure-defect", closure, 1e-9),
        ];
        Ok(report(self.name(), ctx, checks, Value::Array(rows)))
    }
}

struct Stationary;

impl VerificationSuite for Stationary {
    fn name(&self) -> &str {
        "stationary"
    }

    fn description(&self) -> &str {
        "apex over the unit cube at which the stretch derivative vanishes"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<SuiteReport, CliError> {
        let c = shapes::unit_cube();
        let st = find_stationary_apex(
            &ClassicalLaw,
            &c,
            &Vec3::new(0.5, -0.5, 0.0),
            &Vec3::z(),
            (1.2, 2.0),
            1e-10,
            &ctx.tol,
        )?;
        let d = decompose_with(&c, &st.apex, &ctx.tol)?;
        let (rows, _) = resistance_along_family(&ClassicalLaw, &d, &eleven())?;
        let spread = rows.iter().map(|r| rel(r.f, rows[0].f)).fold(0.0, f64::max);
        let fd = stretch_derivative(&ClassicalLaw, &d, &singular_edge_obstacles(&c, &ctx.tol), 1e-4)?;
        let checks = vec![
            Check::at_most("stationary-derivative", st.derivative, 1e-8),
            Check::at_most("family-spread", spread, 1e-8),
            Check::at_most("finite-difference", fd.finite_difference.abs(), 1e-8),
        ];
        let details = json!({
            "apex": [st.apex.x, st.apex.y, st.apex.z],
            "iterations": st.iterations,
            "family": rows,
            "derivative": fd,
        });
        Ok(report(self.name(), ctx, checks, details))
    }
}

/// Embeds the radial solution on a disc of `rings` rings and checks the
/// slope band, the boundary values and the top set.
pub fn radial_checks(
    sol: &RadialSolution,
    rings: usize,
    delta: f64,
    tol: &Tolerances,
) -> Result<(Vec<Check>, Value), CliError> {
    let p = &sol.profile;
    let om = Omega::disc(p.l, 64)?;
    let mesh = Arc::new(Mesh::auto(&om, rings)?);
    let u = HeightField::from_profile(&om, mesh, p)?;
    let p2 = verify_p2(&u, delta);
    let p45 = verify_p4_p5_with(&u, tol);
    let scale = sol.resistance.abs().max(f64::MIN_POSITIVE);
    let checks = vec![
        Check::at_most("p2-violation-fraction", p2.fraction, 0.02),
        Check::at_most("boundary-max", p45.max_boundary_value, 1e-9),
        Check::above("top-diameter-over-spacing", p45.top_diameter / p45.mesh_spacing, 2.0),
        Check::at_least("local-min-change", sol.local_check.min_change / scale, 0.0),
        Check::holds("trace-monotone", sol.trace.is_monotone()),
    ];
    let details = json!({
        "resistance": sol.resistance,
        "top_radius": p.top_radius(tol.top_rel),
        "local_check": sol.local_check,
        "p2": {
            "delta": p2.delta, "triangles": p2.triangles, "violations": p2.violations.len(),
            "fraction": p2.fraction, "area_fraction": p2.area_fraction, "note": p2.note,
        },
        "p4_p5": p45,
    });
    Ok((checks, details))
}

struct Radial;

impl VerificationSuite for Radial {
    fn name(&self) -> &str {
        "radial"
    }

    fn description(&self) -> &str {
        "radial optimum for M = L = 1: slope band, zero boundary, flat top, local minimality"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<SuiteReport, CliError> {
        let sol = solve_radial(1.0, 1.0, 2000)?;
        let (checks, details) = radial_checks(&sol, 64, 0.05, &ctx.tol)?;
        Ok(report(self.name(), ctx, checks, details))
    }
}

/// Euclidean cap `M(1 − |x − c|²/ρ²)` with `ρ` the circumradius of Ω.
pub fn cap_control(u: &HeightField) -> Result<HeightField, CliError> {
    let c = u.omega.centroid();
    let rho2 = u
        .omega
        .vertices()
        .iter()
        .map(|v| (v[0] - c[0]).powi(2) + (v[1] - c[1]).powi(2))
        .fold(0.0, f64::max);
    let m = u.m;
    Ok(HeightField::from_fn(&u.omega, m, Arc::clone(&u.mesh), |p| {
        m * (1.0 - ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)) / rho2)
    })?)
}

/// Median `|det D²u|` of `u` against the cap control on the same mesh.
pub fn det_checks(u: &HeightField, tol: &Tolerances) -> Result<(Vec<Check>, Value), CliError> {
    let margin = 2.0 * u.mesh.spacing();
    let det = verify_det_d2_with(u, margin, tol);
    let control = verify_det_d2_with(&cap_control(u)?, margin, tol);
    let ratio = det.median_abs_det / control.median_abs_det;
    let checks = vec![Check::at_most("det-median-ratio", ratio, 0.1)];
    Ok((checks, json!({"det": det, "control": control, "ratio": ratio})))
}

struct Determinant;

impl VerificationSuite for Determinant {
    fn name(&self) -> &str {
        "determinant"
    }

    fn description(&self) -> &str {
        "2-D minimizer on the 64-gon at M = 1.5: vanishing Hessian determinant away from creases"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<SuiteReport, CliError> {
        let om = Omega::disc(1.0, 64)?;
        let mesh = Arc::new(Mesh::auto(&om, 16)?);
        let opts = Solve2dOptions {
            seed: ctx.seed,
            ..Default::default()
        };
        let res = solve_2d_on(&ClassicalLaw, &om, 1.5, Arc::clone(&mesh), &[], &opts)?;
        let (mut checks, det) = det_checks(&res.field, &ctx.tol)?;
        let radial = solve_radial(1.5, 1.0, 2000)?;
        let embedded = HeightField::from_profile(&om, mesh, &radial.profile)?;
        let f_radial = resistance_2d(&ClassicalLaw, &embedded)?;
        checks.push(Check::at_most("objective-minus-radial", res.objective - f_radial, 0.0));
        checks.push(Check::holds("trace-monotone", res.trace.is_monotone()));
        let details = json!({
            "objective": res.objective,
            "embedded_radial": f_radial,
            "winner": res.winner,
            "move_check": res.move_check,
            "det": det,
        });
        Ok(report(self.name(), ctx, checks, details))
    }
}

struct Probe;

impl VerificationSuite for Probe {
    fn name(&self) -> &str {
        "probe"
    }

    fn description(&self) -> &str {
        "second-variation probe on the strictly concave cap 1 − r²/2"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<SuiteReport, CliError> {
        let om = Omega::disc(1.0, 64)?;
        let mesh = Arc::new(Mesh::auto(&om, 12)?);
        let u = HeightField::from_fn(&om, 2.0, mesh, |p| 1.0 - 0.5 * (p[0] * p[0] + p[1] * p[1]))?;
        let taus = [1.0, 0.1, 0.01];
        let rep = second_variation_probe_with(&ClassicalLaw, &u, [0.0, 0.0], &taus, 0.5, Bump::Exponential, &ctx.tol)?;
        let first_ratio = rep.first.iter().map(|f| f / rep.first_bound).fold(0.0, f64::max);
        let checks = vec![
            Check::below("q-at-smallest-tau", rep.q[taus.len() - 1], 0.0),
            Check::at_most("first-over-bound", first_ratio, 1.0),
            Check::within("second-log-slope", rep.second_slope.unwrap_or(f64::NAN), -2.3, -1.7),
            Check::holds("certified-nonoptimal", rep.verdict == Verdict::CertifiedNonoptimal),
        ];
        Ok(report(self.name(), ctx, checks, serde_json::to_value(&rep).unwrap_or(Value::Null)))
    }
}

struct Appendix;

impl VerificationSuite for Appendix {
    fn name(&self) -> &str {
        "appendix"
    }

    fn description(&self) -> &str {
        "two-apex families: hull equals union and disjoint apex cones, sampled"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<SuiteReport, CliError> {
        let mut instances = vec![("two-apex-cube".to_string(), two_apex_cube())];
        for k in 0..3 {
            let seed = ctx.seed.wrapping_add(k);
            instances.push((format!("random-{seed}"), random_two_apex_instance(seed)));
        }
        let (mut union_bad, mut cone_bad, mut hyp_ok) = (0usize, 0usize, true);
        let mut rows = Vec::new();
        for (k, (label, (c, apexes))) in instances.iter().enumerate() {
            let fam = NoseFamily::new(c, apexes, &[0.5, 0.5], &ctx.tol)?;
            let mut r = rng(ctx.seed.wrapping_add(40 + k as u64));
            let hu = hull_equals_union(&fam, 10_000, &mut r)?;
            let dj = check_cone_disjointness(&fam, 10_000, &mut r);
            union_bad += hu.violations;
            cone_bad += dj.near_violations + dj.tangent_violations;
            hyp_ok &= dj.hypothesis_ok;
            rows.push(json!({"instance": label, "hull_union": hu, "disjointness": dj}));
        }
        let checks = vec![
            Check::holds("hypotheses", hyp_ok),
            Check::at_most("hull-union-violations", union_bad as f64, 0.0),
            Check::at_most("cone-disjointness-violations", cone_bad as f64, 0.0),
        ];
        Ok(report(self.name(), ctx, checks, Value::Array(rows)))
    }
}
