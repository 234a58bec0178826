//! One function per subcommand. Each writes its artifacts and returns the
//! checks it evaluated.

use std::path::Path;
use std::sync::Arc;

use convex_core::fmt::g17;
use convex_core::io::{read_body, to_off};
use convex_core::Vec3;
use newton_solver::{
    second_variation_probe_with, solve_2d_on, solve_radial, Bump, HeightField, Mesh, Verdict,
};
use nose_stretch::{
    decompose_with, family_measure_check, resistance_along_family, singular_edge_obstacles,
    stretch, stretch_derivative,
};
use serde_json::json;
use surface_measure::{LawRegistry, PressureLaw, TabulatedLaw};

use crate::config::{parse_grid, parse_omega, positive, RunConfig};
use crate::output::Artifacts;
use crate::suites::{det_checks, radial_checks, Check, SuiteContext, SuiteRegistry};
use crate::CliError;

pub struct Outcome {
    pub checks: Vec<Check>,
    /// One line for the terminal.
    pub summary: String,
}

pub fn law(cfg: &RunConfig) -> Result<Arc<dyn PressureLaw>, CliError> {
    let mut reg = LawRegistry::with_builtins();
    let name = cfg.law_name();
    if let Some(path) = &cfg.law_table {
        if reg.get(name).is_ok() {
            return Err(CliError::Config(format!("tabulated law may not replace built-in {name:?}")));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let table = TabulatedLaw::from_csv(name, &text).map_err(|e| CliError::Config(e.to_string()))?;
        reg.register(Arc::new(table));
    }
    reg.get(name).map_err(|e| CliError::Config(e.to_string()))
}

fn need<T: Clone>(v: &Option<T>, what: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing {what}")))
}

pub fn solve_radial_cmd(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    if cfg.law_name() != "classical" || cfg.law_table.is_some() {
        return Err(CliError::Config("solve-radial supports the classical law only".into()));
    }
    let m = positive("M", cfg.m.unwrap_or(1.0))?;
    let l = positive("L", cfg.l.unwrap_or(1.0))?;
    let n = cfg.n.unwrap_or(2000);
    let rings = cfg.rings.unwrap_or(64);
    let delta = cfg.delta.unwrap_or(0.05);
    if n < 2 || !(0.0..0.5).contains(&delta) {
        return Err(CliError::Config("need N >= 2 and 0 <= delta < 0.5".into()));
    }
    let sol = solve_radial(m, l, n)?;
    let (checks, details) = radial_checks(&sol, rings, delta, &cfg.tol())?;
    out.write("profile.csv", sol.profile.to_csv())?;
    out.write("trace.csv", sol.trace.to_csv())?;
    out.write_json(
        "report.json",
        &json!({
            "M": m, "L": l, "N": n, "rings": rings,
            "resistance": sol.resistance,
            "resistance_2d": 2.0 * std::f64::consts::PI * sol.resistance,
            "checks": checks,
            "details": details,
        }),
    )?;
    Ok(Outcome {
        checks,
        summary: format!("resistance {}", g17(sol.resistance)),
    })
}

pub fn solve_2d_cmd(cfg: &RunConfig, seed: u64, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let law = law(cfg)?;
    let om = parse_omega(cfg.omega.as_deref().unwrap_or("disc:1:64"))?;
    let m = positive("M", cfg.m.unwrap_or(1.0))?;
    let rings = cfg.rings.unwrap_or(16);
    let mut opts = cfg.solver.clone().unwrap_or_default();
    opts.seed = seed;
    let mesh = Arc::new(Mesh::auto(&om, rings)?);
    let res = solve_2d_on(law.as_ref(), &om, m, mesh, &[], &opts)?;
    let tol = cfg.tol();
    let (mut checks, det) = det_checks(&res.field, &tol)?;
    checks.push(Check::holds("trace-monotone", res.trace.is_monotone()));

    out.write("field.off", res.field.to_off())?;
    out.write_json("field.json", &res.field.sidecar(Some(seed)))?;
    out.write("trace.csv", res.trace.to_csv())?;
    let mut starts = String::from("label,initial,refined\n");
    for s in &res.starts {
        let refined = s.refined.map(g17).unwrap_or_default();
        starts.push_str(&format!("{},{},{}\n", s.label, g17(s.initial), refined));
    }
    out.write("starts.csv", starts)?;
    out.write_json(
        "report.json",
        &json!({
            "law": law.name(), "M": m, "omega": om.vertices(), "rings": rings,
            "vertices": res.field.mesh.len(),
            "objective": res.objective,
            "winner": res.winner,
            "move_check": res.move_check,
            "options": opts,
            "checks": checks,
            "det": det,
        }),
    )?;
    Ok(Outcome {
        checks,
        summary: format!("objective {} from start {}", g17(res.objective), res.winner),
    })
}

pub fn stretch_cmd(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let law = law(cfg)?;
    let path = need(&cfg.body, "body")?;
    let [x, y, z] = need(&cfg.apex, "apex")?;
    let grid = parse_grid(cfg.s.as_deref().unwrap_or("0:0.1:1"))?;
    if grid.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(CliError::Config("s values must lie in [0, 1]".into()));
    }
    let h = positive("h", cfg.h.unwrap_or(1e-4))?;
    let tol = cfg.tol();
    let body = read_body(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let d = decompose_with(&body, &Vec3::new(x, y, z), &tol)?;
    let (rows, fit) = resistance_along_family(law.as_ref(), &d, &grid)?;
    let measure = family_measure_check(&d, &grid)?;
    let deriv = stretch_derivative(law.as_ref(), &d, &singular_edge_obstacles(&body, &tol), h)?;

    let mut csv = String::from("s,F,area_near,area_V,closure_defect\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            g17(r.s),
            g17(r.f),
            g17(r.area_near),
            g17(r.area_cone),
            g17(r.closure_defect)
        ));
    }
    out.write("family.csv", csv)?;
    if cfg.frames.unwrap_or(false) {
        for (i, s) in grid.iter().enumerate() {
            out.write(&format!("frame_{i:03}.off"), to_off(&stretch(&d, *s, &[])?))?;
        }
    }
    let closure = measure.closure.iter().copied().fold(0.0, f64::max);
    let checks = vec![
        Check::at_most("affine-residual", fit.max_residual, 1e-9),
        Check::at_most("measure-deviation", measure.max_deviation, 1e-8),
        Check::at_most("closure-defect", closure, 1e-9),
        Check::at_most("derivative-rel-error", deriv.rel_error, 1e-5),
    ];
    out.write_json(
        "report.json",
        &json!({
            "law": law.name(),
            "apex": [x, y, z],
            "near_facets": d.near.len(),
            "silhouette": d.silhouette.len(),
            "area_near": d.area_near(),
            "area_cone": d.area_cone(),
            "fit": fit,
            "measure": measure,
            "derivative": deriv,
            "checks": checks,
        }),
    )?;
    Ok(Outcome {
        checks,
        summary: format!(
            "slope {} residual {}",
            g17(fit.slope),
            g17(fit.max_residual)
        ),
    })
}

pub fn verify_cmd(cfg: &RunConfig, seed: u64, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let reg = SuiteRegistry::with_builtins();
    let name = cfg.suite.as_deref().ok_or_else(|| {
        CliError::Config(format!("missing suite; available: {}", reg.names().join(", ")))
    })?;
    let suite = reg.get(name)?;
    let rep = suite.run(&SuiteContext { seed, tol: cfg.tol() })?;
    out.write("suite.csv", rep.to_csv())?;
    out.write_json("report.json", &rep)?;
    let failed = rep.failures();
    Ok(Outcome {
        summary: if failed.is_empty() {
            format!("suite {name}: {} checks passed", rep.checks.len())
        } else {
            format!("suite {name}: failed {}", failed.join(", "))
        },
        checks: rep.checks,
    })
}

fn read_field(path: &Path) -> Result<HeightField, CliError> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CliError::Config(format!("bad field path {}", path.display())))?;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    HeightField::read(dir, stem)
        .map(|(u, _)| u)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn probe_cmd(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let law = law(cfg)?;
    let u = match &cfg.field {
        Some(p) => read_field(p)?,
        None => {
            // Strictly concave cap 1 − |x − c|²/2 on Ω.
            let om = parse_omega(cfg.omega.as_deref().unwrap_or("disc:1:64"))?;
            let m = positive("M", cfg.m.unwrap_or(2.0))?;
            let mesh = Arc::new(Mesh::auto(&om, cfg.rings.unwrap_or(12))?);
            let c = om.centroid();
            HeightField::from_fn(&om, m, mesh, |p| {
                1.0 - 0.5 * ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2))
            })?
        }
    };
    let x0 = cfg.x0.unwrap_or_else(|| u.omega.centroid());
    let taus = cfg.taus.clone().unwrap_or_else(|| vec![1.0, 0.1, 0.01]);
    let radius = positive("radius", cfg.radius.unwrap_or(0.5))?;
    let bump = cfg.bump.unwrap_or(Bump::Exponential);
    let rep = second_variation_probe_with(law.as_ref(), &u, x0, &taus, radius, bump, &cfg.tol())
        .map_err(|e| match e {
            newton_solver::SolverError::InvalidArgument(m) => CliError::Config(m),
            e => e.into(),
        })?;
    let mut csv = String::from("tau,first,second,q\n");
    for i in 0..rep.taus.len() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            g17(rep.taus[i]),
            g17(rep.first[i]),
            g17(rep.second[i]),
            g17(rep.q[i])
        ));
    }
    out.write("probe.csv", csv)?;
    let checks = vec![Check::holds(
        "certified-nonoptimal",
        rep.verdict == Verdict::CertifiedNonoptimal,
    )];
    out.write_json("report.json", &json!({"law": law.name(), "report": rep, "checks": checks}))?;
    Ok(Outcome {
        checks,
        summary: format!("verdict {:?}", rep.verdict),
    })
}
