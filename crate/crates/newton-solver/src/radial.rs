//! Rotationally symmetric problem: minimize `R(φ) = ∫₀ᴸ r/(1 + φ′²) dr`
//! over concave non-increasing `φ` with `0 ≤ φ ≤ M`.

use std::fmt::Write as _;

use convex_core::fmt::g17;
use convex_core::Tolerances;
use serde::{Deserialize, Serialize};

use crate::trace::{StepKind, Trace};
use crate::SolverError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub l: f64,
    pub m: f64,
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
}

pub fn uniform_grid(l: f64, n: usize) -> Vec<f64> {
    let mut r: Vec<f64> = (0..=n).map(|i| l * i as f64 / n as f64).collect();
    r[n] = l;
    r
}

impl RadialProfile {
    /// Builds and validates a profile with the default concavity tolerance.
    pub fn new(l: f64, m: f64, r: Vec<f64>, phi: Vec<f64>) -> Result<Self, SolverError> {
        let p = Self { l, m, r, phi };
        p.validate(Tolerances::default().conc)?;
        Ok(p)
    }

    /// Samples `f` on a uniform grid of `n` cells.
    pub fn from_fn(
        l: f64,
        m: f64,
        n: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, SolverError> {
        let r = uniform_grid(l, n);
        let phi = r.iter().map(|&x| f(x)).collect();
        Self::new(l, m, r, phi)
    }

    pub fn validate(&self, conc: f64) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::InvalidProfile(msg));
        let n = self.r.len();
        if !(self.l > 0.0 && self.m > 0.0) {
            return bad(format!("L = {} and M = {} must be positive", self.l, self.m));
        }
        if n < 2 || self.phi.len() != n {
            return bad(format!("grid has {} radii and {} values", n, self.phi.len()));
        }
        if self.r[0] != 0.0 || (self.r[n - 1] - self.l).abs() > 1e-12 * self.l {
            return bad("grid must run from 0 to L".into());
        }
        if self.r.windows(2).any(|w| w[1] <= w[0]) {
            return bad("grid radii must increase strictly".into());
        }
        let tol = conc * self.l.max(self.m);
        for (i, &v) in self.phi.iter().enumerate() {
            if !v.is_finite() || v < -tol || v > self.m + tol {
                return bad(format!("value {v} at index {i} outside [0, M]"));
            }
        }
        for i in 0..n - 1 {
            if self.phi[i + 1] > self.phi[i] + tol {
                return bad(format!("profile increases at index {i}"));
            }
        }
        for i in 1..n - 1 {
            let (r0, r1, r2) = (self.r[i - 1], self.r[i], self.r[i + 1]);
            let chord = ((r2 - r1) * self.phi[i - 1] + (r1 - r0) * self.phi[i + 1]) / (r2 - r0);
            if self.phi[i] < chord - tol {
                return bad(format!("concavity fails at index {i}"));
            }
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        self.r.len() - 1
    }

    /// Per-cell slopes `φ′`.
    pub fn slopes(&self) -> Vec<f64> {
        (0..self.n_cells())
            .map(|i| (self.phi[i + 1] - self.phi[i]) / (self.r[i + 1] - self.r[i]))
            .collect()
    }

    /// Linear interpolation; constant beyond the ends.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= 0.0 {
            return self.phi[0];
        }
        if x >= self.r[n - 1] {
            return self.phi[n - 1];
        }
        let j = self.r.partition_point(|&ri| ri <= x).clamp(1, n - 1);
        let (r0, r1) = (self.r[j - 1], self.r[j]);
        let t = (x - r0) / (r1 - r0);
        self.phi[j - 1] * (1.0 - t) + self.phi[j] * t
    }

    /// Largest grid radius where the profile is within `top_rel·M` of `M`.
    pub fn top_radius(&self, top_rel: f64) -> Option<f64> {
        let cut = self.m * (1.0 - top_rel);
        self.phi
            .iter()
            .zip(&self.r)
            .filter(|(&v, _)| v >= cut)
            .map(|(_, &r)| r)
            .last()
    }

    pub fn to_csv(&self) -> String {
        let slopes = self.slopes();
        let mut out = String::from("r,phi,slope\n");
        for i in 0..self.r.len() {
            let s = slopes.get(i).copied().unwrap_or(f64::NAN);
            let _ = writeln!(out, "{},{},{}", g17(self.r[i]), g17(self.phi[i]), g17(s));
        }
        out
    }
}

/// Midpoint quadrature with per-cell constant slope. Because `r` is linear
/// on each cell, `r_mid·Δr = (r₁² − r₀²)/2` and the quadrature is exact for
/// piecewise-linear profiles.
pub fn resistance_radial(p: &RadialProfile) -> Result<f64, SolverError> {
    p.validate(Tolerances::default().conc)?;
    Ok(resistance_of_slopes(&p.r, &p.slopes()))
}

pub(crate) fn resistance_of_slopes(r: &[f64], slopes: &[f64]) -> f64 {
    slopes
        .iter()
        .enumerate()
        .map(|(i, s)| 0.5 * (r[i + 1] * r[i + 1] - r[i] * r[i]) / (1.0 + s * s))
        .sum()
}

/// Admissible re-projection of raw values: clamp to `[0, M]`, least concave
/// majorant, then the smallest non-increasing majorant, clamped again.
pub fn project_profile(r: &[f64], raw: &[f64], m: f64) -> Vec<f64> {
    let v: Vec<f64> = raw.iter().map(|x| x.clamp(0.0, m)).collect();
    let mut hull: Vec<usize> = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (r[b] - r[a]) * (v[i] - v[a]) - (v[b] - v[a]) * (r[i] - r[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = v.clone();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (k, o) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            let t = (r[k] - r[a]) / (r[b] - r[a]);
            *o = (v[a] * (1.0 - t) + v[b] * t).max(v[k]);
        }
    }
    for k in (0..out.len().saturating_sub(1)).rev() {
        out[k] = out[k].max(out[k + 1]);
    }
    out.iter_mut().for_each(|x| *x = x.clamp(0.0, m));
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialSolveOptions {
    pub max_iter: usize,
    /// Perturbation sizes, relative to `M`, for the coordinate-wise sweep.
    pub deltas: Vec<f64>,
}

impl Default for RadialSolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            deltas: vec![1e-2, 1e-3, 1e-4],
        }
    }
}

/// Outcome of the final coordinate-wise `±δ` sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalCheck {
    pub trials: usize,
    /// Smallest `R(perturbed) − R(result)` over all trials.
    pub min_change: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialSolution {
    pub profile: RadialProfile,
    pub resistance: f64,
    pub trace: Trace,
    pub local_check: LocalCheck,
}

struct SlopeProblem {
    r: Vec<f64>,
    w: Vec<f64>,
    a: Vec<f64>,
    rho: Vec<f64>,
    m: f64,
}

impl SlopeProblem {
    fn new(r: Vec<f64>, m: f64) -> Self {
        let n = r.len() - 1;
        let w: Vec<f64> = (0..n).map(|i| r[i + 1] - r[i]).collect();
        let a: Vec<f64> = (0..n).map(|i| 0.5 * (r[i + 1] * r[i + 1] - r[i] * r[i])).collect();
        let rho = (0..n).map(|i| a[i] / w[i]).collect();
        Self { r, w, a, rho, m }
    }

    fn objective(&self, t: &[f64]) -> f64 {
        t.iter().zip(&self.a).map(|(t, a)| a / (1.0 + t * t)).sum()
    }

    fn budget(&self, t: &[f64]) -> f64 {
        t.iter().zip(&self.w).map(|(t, w)| t * w).sum()
    }

    /// Minimizer of `ρ/(1 + t²) + λt` over `t ≥ 0`.
    fn cell_argmin(rho: f64, lambda: f64) -> f64 {
        let peak = 2.0 * rho * (1.0 / 3f64.sqrt()) / (4.0 / 3.0f64).powi(2);
        if lambda >= peak {
            return 0.0;
        }
        let slope_force = |t: f64| 2.0 * rho * t / (1.0 + t * t).powi(2);
        let mut lo = 1.0 / 3f64.sqrt();
        let mut hi = (2.0 * rho / lambda).cbrt().max(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if slope_force(mid) > lambda {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        let t = 0.5 * (lo + hi);
        if rho / (1.0 + t * t) + lambda * t < rho {
            t
        } else {
            0.0
        }
    }

    /// Cell-wise Lagrangian minimizer with the multiplier bisected so that
    /// the budget `Σ tΔr` does not exceed `M`.
    fn lagrange(&self) -> Vec<f64> {
        let slopes = |lambda: f64| -> Vec<f64> {
            self.rho
                .iter()
                .map(|&rho| Self::cell_argmin(rho, lambda))
                .collect()
        };
        let rho_max = self.rho.iter().copied().fold(0.0, f64::max);
        let mut hi = rho_max + 1.0;
        let mut lo = hi;
        while self.budget(&slopes(lo)) <= self.m {
            lo *= 0.5;
            if lo < 1e-300 {
                return slopes(lo);
            }
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if self.budget(&slopes(mid)) <= self.m {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi / lo - 1.0 < 1e-15 {
                break;
            }
        }
        slopes(hi)
    }

    /// Weighted projection onto `{0 ≤ t non-decreasing, Σ w t ≤ M}`.
    fn project(&self, y: &[f64]) -> Vec<f64> {
        let z = isotonic(y, &self.w);
        let shifted = |mu: f64| -> Vec<f64> { z.iter().map(|v| (v - mu).max(0.0)).collect() };
        let t0 = shifted(0.0);
        if self.budget(&t0) <= self.m {
            return t0;
        }
        let mut lo = 0.0;
        let mut hi = z.iter().copied().fold(0.0, f64::max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.budget(&shifted(mid)) <= self.m {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-16 * hi.max(1.0) {
                break;
            }
        }
        shifted(hi)
    }

    fn gradient_descent(&self, t: &mut Vec<f64>, trace: &mut Trace, max_iter: usize) {
        let mut f = self.objective(t);
        let mut alpha = 1e-2;
        let mut stall = 0;
        for _ in 0..max_iter {
            let y: Vec<f64> = t
                .iter()
                .zip(&self.rho)
                .map(|(&ti, &rho)| ti + alpha * 2.0 * rho * ti / (1.0 + ti * ti).powi(2))
                .collect();
            let cand = self.project(&y);
            let fc = self.objective(&cand);
            if fc < f {
                let rel = (f - fc) / f.abs().max(1e-300);
                *t = cand;
                f = fc;
                trace.push(f, StepKind::Gradient);
                alpha *= 1.5;
                stall = if rel < 1e-15 { stall + 1 } else { 0 };
                if stall > 20 {
                    break;
                }
            } else {
                alpha *= 0.5;
                if alpha < 1e-12 {
                    break;
                }
            }
        }
    }

    fn slopes_to_phi(&self, t: &[f64]) -> Vec<f64> {
        let n = t.len();
        let mut phi = vec![0.0; n + 1];
        for i in (0..n).rev() {
            phi[i] = phi[i + 1] + t[i] * self.w[i];
        }
        phi.iter_mut().for_each(|v| *v = v.min(self.m));
        phi
    }

    fn phi_to_slopes(&self, phi: &[f64]) -> Vec<f64> {
        (0..self.w.len())
            .map(|i| ((phi[i] - phi[i + 1]) / self.w[i]).max(0.0))
            .collect()
    }

    /// One coordinate-wise `±δ` sweep with re-projection. Returns the best
    /// improving slope vector, if any, and the smallest objective change.
    fn perturbation_sweep(&self, t: &[f64], delta: f64) -> (Option<Vec<f64>>, f64, usize) {
        let phi = self.slopes_to_phi(t);
        let f = resistance_of_slopes(&self.r, t);
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut min_change = f64::INFINITY;
        let mut trials = 0;
        for i in 0..phi.len() {
            for sign in [1.0, -1.0] {
                let mut raw = phi.clone();
                raw[i] += sign * delta;
                let cand = project_profile(&self.r, &raw, self.m);
                let ts = self.phi_to_slopes(&cand);
                let fc = resistance_of_slopes(&self.r, &ts);
                trials += 1;
                min_change = min_change.min(fc - f);
                if fc < f - 1e-14 * f.abs() && best.as_ref().is_none_or(|(bf, _)| fc < *bf) {
                    best = Some((fc, ts));
                }
            }
        }
        (best.map(|(_, t)| t), min_change, trials)
    }
}

/// Pool-adjacent-violators: weighted least-squares non-decreasing fit.
fn isotonic(y: &[f64], w: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (&yi, &wi) in y.iter().zip(w) {
        blocks.push((yi, wi, 1));
        while blocks.len() >= 2 {
            let (v2, w2, c2) = blocks[blocks.len() - 1];
            let (v1, w1, c1) = blocks[blocks.len() - 2];
            if v1 <= v2 {
                break;
            }
            blocks.pop();
            let wt = w1 + w2;
            *blocks.last_mut().expect("two blocks") = ((v1 * w1 + v2 * w2) / wt, wt, c1 + c2);
        }
    }
    let mut out = Vec::with_capacity(y.len());
    for (v, _, c) in blocks {
        out.extend(std::iter::repeat_n(v, c));
    }
    out
}

/// Minimizes `R` on a uniform grid of `n` cells.
pub fn solve_radial(m: f64, l: f64, n: usize) -> Result<RadialSolution, SolverError> {
    solve_radial_with(m, l, n, &RadialSolveOptions::default())
}

pub fn solve_radial_with(
    m: f64,
    l: f64,
    n: usize,
    opts: &RadialSolveOptions,
) -> Result<RadialSolution, SolverError> {
    if !(m > 0.0 && l > 0.0 && m.is_finite() && l.is_finite()) {
        return Err(SolverError::InvalidArgument(format!(
            "M = {m} and L = {l} must be positive"
        )));
    }
    if n < 16 {
        return Err(SolverError::InvalidArgument(format!("N = {n} < 16")));
    }
    let prob = SlopeProblem::new(uniform_grid(l, n), m);
    let mut trace = Trace::default();
    let mut t = vec![0.0; n];
    trace.push(prob.objective(&t), StepKind::Init);
    let lag = prob.lagrange();
    if prob.objective(&lag) < prob.objective(&t) {
        t = lag;
        trace.push(prob.objective(&t), StepKind::Lagrange);
    }

    let mut check = LocalCheck {
        trials: 0,
        min_change: f64::INFINITY,
    };
    for _round in 0..1000 {
        prob.gradient_descent(&mut t, &mut trace, opts.max_iter);
        let mut improved = false;
        check = LocalCheck {
            trials: 0,
            min_change: f64::INFINITY,
        };
        for &d in &opts.deltas {
            let (better, min_change, trials) = prob.perturbation_sweep(&t, d * m);
            check.trials += trials;
            check.min_change = check.min_change.min(min_change);
            if let Some(nt) = better {
                // Accept only if it lowers the objective as computed from
                // slopes, which is what the trace records.
                if prob.objective(&nt) < prob.objective(&t) {
                    t = nt;
                    trace.push(prob.objective(&t), StepKind::Perturb);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            break;
        }
    }

    let phi = prob.slopes_to_phi(&t);
    let profile = RadialProfile::new(l, m, prob.r.clone(), phi)?;
    let resistance = resistance_radial(&profile)?;
    Ok(RadialSolution {
        profile,
        resistance,
        trace,
        local_check: check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotonic_pools_violators() {
        let out = isotonic(&[1.0, 3.0, 2.0, 4.0], &[1.0; 4]);
        assert_eq!(out, vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn projection_restores_admissibility() {
        let r = uniform_grid(1.0, 10);
        let raw: Vec<f64> = r.iter().map(|x| (7.0 * x).sin() * 2.0).collect();
        let p = project_profile(&r, &raw, 1.0);
        RadialProfile::new(1.0, 1.0, r.clone(), p.clone()).unwrap();
        assert_eq!(project_profile(&r, &p, 1.0), p);
    }

    #[test]
    fn trivial_values() {
        let flat = RadialProfile::from_fn(1.0, 1.0, 100, |_| 0.0).unwrap();
        assert!((resistance_radial(&flat).unwrap() - 0.5).abs() < 1e-12);
        let cone = RadialProfile::from_fn(1.0, 1.0, 100, |r| 1.0 - r).unwrap();
        assert!((resistance_radial(&cone).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn rejects_increasing_profile() {
        let r = RadialProfile::from_fn(1.0, 1.0, 10, |r| r);
        assert!(matches!(r, Err(SolverError::InvalidProfile(_))));
    }
}
