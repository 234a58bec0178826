//! Multi-start local search for `min ∬ g(∇u)` over concave `0 ≤ u ≤ M`.
//!
//! Each start runs projected gradient descent (step, then least concave
//! majorant). The best start is then polished with single-vertex moves:
//! raise or lower by `δ`, or insert an apex at height `M`, each followed by
//! re-projection.

use std::cmp::Ordering;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use surface_measure::PressureLaw;

use crate::concave::{concave_envelope, project_concave, ConcaveState};
use crate::field::{GradOps, HeightField};
use crate::mesh::{Mesh, Omega, P2};
use crate::radial::solve_radial;
use crate::trace::{StepKind, Trace};
use crate::SolverError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Solve2dOptions {
    /// Number of random concave starts.
    pub random_starts: usize,
    pub seed: u64,
    /// How many of the best starts get the full descent.
    pub refine: usize,
    pub max_iter: usize,
    /// Polish the winner with single-vertex moves.
    pub polish: bool,
    /// Move sizes relative to `M`, coarse to fine.
    pub move_deltas: Vec<f64>,
    pub max_polish_sweeps: usize,
    /// Close the start set under the mesh's square symmetries.
    pub symmetrize: bool,
    /// Radial cells for the embedded radial start.
    pub radial_cells: usize,
    /// Top polygons with 1..=max_top_sides vertices for the hull starts.
    pub max_top_sides: usize,
}

impl Default for Solve2dOptions {
    fn default() -> Self {
        Self {
            random_starts: 4,
            seed: 0,
            refine: 4,
            max_iter: 400,
            polish: true,
            move_deltas: vec![1e-2, 1e-3],
            max_polish_sweeps: 4,
            symmetrize: false,
            radial_cells: 400,
            max_top_sides: 6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StartReport {
    pub label: String,
    pub initial: f64,
    /// Objective after descent, if the start was refined.
    pub refined: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MoveCheck {
    pub trials: usize,
    /// Smallest `F(moved) − F(result)` seen in the last sweep.
    pub min_change: f64,
    pub sweeps: usize,
}

#[derive(Clone, Debug)]
pub struct Solve2dResult {
    pub field: HeightField,
    pub objective: f64,
    pub winner: String,
    pub trace: Trace,
    pub starts: Vec<StartReport>,
    pub move_check: Option<MoveCheck>,
}

struct Problem<'a> {
    law: &'a dyn PressureLaw,
    mesh: Arc<Mesh>,
    ops: GradOps,
    vertex_tris: Vec<Vec<usize>>,
    m: f64,
}

impl Problem<'_> {
    fn objective(&self, u: &[f64]) -> f64 {
        self.ops.objective(self.law, u)
    }

    /// `F(cand) − F(u)` summed over the triangles touching changed vertices.
    fn change(&self, u: &[f64], cand: &[f64], mark: &mut [bool]) -> f64 {
        let mut touched = Vec::new();
        for (v, (a, b)) in u.iter().zip(cand).enumerate() {
            if a != b {
                for &t in &self.vertex_tris[v] {
                    if !mark[t] {
                        mark[t] = true;
                        touched.push(t);
                    }
                }
            }
        }
        let mut d = 0.0;
        for t in touched {
            mark[t] = false;
            let (g0, g1) = (self.ops.gradient_on(t, u), self.ops.gradient_on(t, cand));
            d += self.ops.area[t] * (self.law.g(g1[0], g1[1]) - self.law.g(g0[0], g0[1]));
        }
        d
    }

    fn project(&self, u: &[f64]) -> Result<Vec<f64>, SolverError> {
        project_concave(&self.mesh.points, u, self.m)
    }

    fn descend(&self, u: &mut Vec<f64>, trace: &mut Trace, max_iter: usize) -> Result<f64, SolverError> {
        let mut f = self.objective(u);
        let mut alpha = 0.1 * self.m;
        let mut stall = 0;
        for _ in 0..max_iter {
            let grad = self.ops.objective_gradient(self.law, u);
            let dir: Vec<f64> = grad
                .iter()
                .zip(&self.ops.mass)
                .map(|(g, m)| -g / m)
                .collect();
            let scale = dir.iter().map(|d| d.abs()).fold(0.0, f64::max);
            if scale == 0.0 {
                break;
            }
            let mut accepted = false;
            for _ in 0..30 {
                let step = alpha / scale;
                let cand: Vec<f64> = u.iter().zip(&dir).map(|(v, d)| v + step * d).collect();
                let cand = self.project(&cand)?;
                let fc = self.objective(&cand);
                if fc < f {
                    let rel = (f - fc) / f.abs().max(1e-300);
                    *u = cand;
                    f = fc;
                    trace.push(f, StepKind::Gradient);
                    alpha = (alpha * 1.5).min(self.m);
                    accepted = true;
                    stall = if rel < 1e-9 { stall + 1 } else { 0 };
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-9 * self.m {
                    break;
                }
            }
            if !accepted || stall >= 10 {
                break;
            }
        }
        Ok(f)
    }

    /// Single-vertex moves until a full sweep finds no improvement.
    fn polish(
        &self,
        u: &mut Vec<f64>,
        trace: &mut Trace,
        deltas: &[f64],
        max_sweeps: usize,
    ) -> Result<MoveCheck, SolverError> {
        let mut f = self.objective(u);
        let mut mark = vec![false; self.ops.tris.len()];
        let mut check = MoveCheck {
            trials: 0,
            min_change: f64::INFINITY,
            sweeps: 0,
        };
        for _ in 0..max_sweeps {
            check.sweeps += 1;
            check.trials = 0;
            check.min_change = f64::INFINITY;
            let mut improved = false;
            let mut state = ConcaveState::new(&self.mesh.points, u.clone(), self.m)?;
            for v in 0..u.len() {
                let mut moves = Vec::with_capacity(2 * deltas.len() + 1);
                for &d in deltas {
                    moves.push((u[v] + d * self.m, StepKind::Raise));
                    if state.is_extreme(v) {
                        moves.push((u[v] - d * self.m, StepKind::Lower));
                    }
                }
                moves.push((self.m, StepKind::Apex));
                for (target, kind) in moves {
                    if !(0.0..=self.m).contains(&target) || target == u[v] {
                        continue;
                    }
                    let cand = state.moved(v, target)?;
                    let df = self.change(u, &cand, &mut mark);
                    check.trials += 1;
                    check.min_change = check.min_change.min(df);
                    if df < -1e-13 * f.abs() {
                        *u = cand;
                        f = self.objective(u);
                        trace.push(f, kind);
                        improved = true;
                        state = ConcaveState::new(&self.mesh.points, u.clone(), self.m)?;
                        break;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        Ok(check)
    }
}

/// `clamp`-free hull start: `Ω`'s vertices at 0 and `top` at height `M`.
fn hull_start(omega: &Omega, mesh: &Mesh, m: f64, top: &[P2]) -> Result<Vec<f64>, SolverError> {
    let mut xy: Vec<P2> = omega.vertices().to_vec();
    let mut z = vec![0.0; xy.len()];
    for p in top {
        xy.push(*p);
        z.push(m);
    }
    if top.len() < 3 {
        // Keep the lifted set three-dimensional for the hull.
        let c = omega.centroid();
        let far = omega.vertices()[0];
        xy.push([0.5 * (c[0] + far[0]), 0.5 * (c[1] + far[1])]);
        z.push(0.0);
    }
    let vals = concave_envelope(&xy, &z, &mesh.points)?;
    Ok(vals.into_iter().map(|v| v.unwrap_or(0.0).clamp(0.0, m)).collect())
}

/// Vertices of a regular `k`-gon (a point for `k = 1`, a segment for
/// `k = 2`) at gauge level `rho` about the centroid, rotated by `theta`.
fn top_polygon(omega: &Omega, k: usize, rho: f64, theta: f64) -> Vec<P2> {
    let c = omega.centroid();
    if k == 1 {
        return vec![c];
    }
    (0..k)
        .map(|i| {
            let a = theta + 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            let d = [a.cos(), a.sin()];
            let g = omega.gauge([c[0] + d[0], c[1] + d[1]]);
            [c[0] + rho * d[0] / g, c[1] + rho * d[1] / g]
        })
        .collect()
}

fn golden_min(f: impl Fn(f64) -> Result<f64, SolverError>, lo: f64, hi: f64, iters: usize) -> Result<(f64, f64), SolverError> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Lowest objective first; objectives within `1e-12` relative tie and fall
/// back to lexicographic vertex values.
fn rank(fa: f64, ua: &[f64], fb: f64, ub: &[f64]) -> Ordering {
    if (fa - fb).abs() <= 1e-12 * fa.abs().max(fb.abs()) {
        lex_cmp(ua, ub)
    } else {
        fa.total_cmp(&fb)
    }
}

struct Start {
    label: String,
    values: Vec<f64>,
    objective: f64,
}

/// Solves on the automatic ring mesh with `rings` rings.
pub fn solve_2d(
    law: &dyn PressureLaw,
    omega: &Omega,
    m: f64,
    rings: usize,
    opts: &Solve2dOptions,
) -> Result<Solve2dResult, SolverError> {
    let mesh = Arc::new(Mesh::auto(omega, rings)?);
    solve_2d_on(law, omega, m, mesh, &[], opts)
}

/// Solves on a given mesh. `extra` holds caller starts as raw vertex values.
pub fn solve_2d_on(
    law: &dyn PressureLaw,
    omega: &Omega,
    m: f64,
    mesh: Arc<Mesh>,
    extra: &[Vec<f64>],
    opts: &Solve2dOptions,
) -> Result<Solve2dResult, SolverError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(SolverError::InvalidArgument(format!("M = {m} must be positive")));
    }
    let prob = Problem {
        law,
        ops: GradOps::new(&mesh),
        vertex_tris: {
            let mut vt = vec![Vec::new(); mesh.len()];
            for (t, tri) in mesh.triangles.iter().enumerate() {
                tri.iter().for_each(|&v| vt[v].push(t));
            }
            vt
        },
        mesh: Arc::clone(&mesh),
        m,
    };
    let mut raw: Vec<(String, Vec<f64>)> = Vec::new();

    let radial = solve_radial(m, 1.0, opts.radial_cells.max(16))?;
    let embedded: Vec<f64> = mesh
        .level
        .iter()
        .map(|&t| radial.profile.value_at(t))
        .collect();
    raw.push(("radial".into(), embedded));

    for k in 1..=opts.max_top_sides {
        let thetas: Vec<f64> = if k == 1 {
            vec![0.0]
        } else {
            vec![0.0, std::f64::consts::PI / (2.0 * k as f64)]
        };
        for theta in thetas {
            let eval = |rho: f64| -> Result<f64, SolverError> {
                let u = hull_start(omega, &mesh, m, &top_polygon(omega, k, rho, theta))?;
                Ok(prob.objective(&u))
            };
            let rho = if k == 1 {
                0.0
            } else {
                golden_min(eval, 0.02, 0.95, 24)?.0
            };
            let u = hull_start(omega, &mesh, m, &top_polygon(omega, k, rho, theta))?;
            raw.push((format!("hull-k{k}-theta{theta:.4}-rho{rho:.4}"), u));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let c = omega.centroid();
    for s in 0..opts.random_starts {
        let n_top = rng.gen_range(1..=6);
        let top: Vec<P2> = (0..n_top)
            .map(|_| {
                let a = rng.gen_range(0.0..std::f64::consts::TAU);
                let d = [a.cos(), a.sin()];
                let g = omega.gauge([c[0] + d[0], c[1] + d[1]]);
                let r = rng.gen_range(0.0..0.9);
                [c[0] + r * d[0] / g, c[1] + r * d[1] / g]
            })
            .collect();
        let h = rng.gen_range(0.2..=1.0) * m;
        let mut u = hull_start(omega, &mesh, m, &top)?;
        u.iter_mut().for_each(|v| *v *= h / m);
        raw.push((format!("random-{s}"), u));
    }
    for (i, e) in extra.iter().enumerate() {
        if e.len() != mesh.len() {
            return Err(SolverError::InvalidArgument(format!(
                "start {i} has {} values for {} vertices",
                e.len(),
                mesh.len()
            )));
        }
        raw.push((format!("caller-{i}"), e.clone()));
    }

    if opts.symmetrize {
        let syms = mesh.square_symmetries(c);
        let mut closed = Vec::new();
        for (label, u) in &raw {
            for (g, perm) in syms.iter().enumerate() {
                let mut img = vec![0.0; u.len()];
                for (v, &to) in perm.iter().enumerate() {
                    img[to] = u[v];
                }
                closed.push((format!("{label}-g{g}"), img));
            }
        }
        raw = closed;
    }

    let mut starts: Vec<Start> = Vec::with_capacity(raw.len());
    for (label, u) in raw {
        let values = prob.project(&u)?;
        let objective = prob.objective(&values);
        starts.push(Start {
            label,
            values,
            objective,
        });
    }
    starts.sort_by(|a, b| rank(a.objective, &a.values, b.objective, &b.values));
    starts.dedup_by(|a, b| a.values == b.values);

    let mut reports: Vec<StartReport> = starts
        .iter()
        .map(|s| StartReport {
            label: s.label.clone(),
            initial: s.objective,
            refined: None,
        })
        .collect();

    let mut best: Option<(f64, Vec<f64>, Trace, String)> = None;
    for (i, s) in starts.iter().enumerate().take(opts.refine.max(1)) {
        let mut u = s.values.clone();
        let mut trace = Trace::default();
        trace.push(s.objective, StepKind::Init);
        let f = prob.descend(&mut u, &mut trace, opts.max_iter)?;
        reports[i].refined = Some(f);
        let better = match &best {
            None => true,
            Some((bf, bu, _, _)) => rank(f, &u, *bf, bu) == Ordering::Less,
        };
        if better {
            best = Some((f, u, trace, s.label.clone()));
        }
    }
    let (mut f, mut u, mut trace, winner) = best.expect("at least one start");

    let move_check = if opts.polish {
        let check = prob.polish(&mut u, &mut trace, &opts.move_deltas, opts.max_polish_sweeps)?;
        f = prob.objective(&u);
        Some(check)
    } else {
        None
    };

    let field = HeightField::new(omega.clone(), m, mesh, u)?;
    Ok(Solve2dResult {
        field,
        objective: f,
        winner,
        trace,
        starts: reports,
        move_check,
    })
}
