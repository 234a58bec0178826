//! Second-variation probe: an oscillating bump aligned with the eigenvectors
//! of `D²g(∇u(x₀))` whose quadratic form turns negative as the oscillation
//! period shrinks, certifying that a strictly concave patch is not optimal.

use convex_core::Tolerances;
use serde::{Deserialize, Serialize};
use surface_measure::PressureLaw;

use crate::field::HeightField;
use crate::mesh::P2;
use crate::verify::{crease_edges, fit_quadratic, k_ring};
use crate::SolverError;

/// Profile `γ` of the bump, supported on `[−w, w]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bump {
    /// `exp(1 − 1/(1 − s²))`, smooth.
    #[default]
    Exponential,
    /// `(1 − s²)⁴`, C³.
    Polynomial,
}

impl Bump {
    /// `(γ(s), γ'(s))` for support half-width `w`.
    fn eval(self, s: f64, w: f64) -> (f64, f64) {
        let x = s / w;
        let q = 1.0 - x * x;
        if q <= 0.0 {
            return (0.0, 0.0);
        }
        match self {
            Bump::Exponential => {
                let g = (1.0 - 1.0 / q).exp();
                (g, g * (-2.0 * x / (q * q)) / w)
            }
            Bump::Polynomial => (q.powi(4), 4.0 * q.powi(3) * (-2.0 * x) / w),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedNonoptimal,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecondVariationReport {
    pub x0: P2,
    pub gradient: P2,
    /// Fitted `[u_xx, u_xy, u_yy]` at `x₀`.
    pub hessian: [f64; 3],
    /// `[g_XX, g_XY, g_YY]` at `∇u(x₀)`.
    pub d2g: [f64; 3],
    /// Larger eigenvalue of `D²g`.
    pub a: f64,
    /// Minus the smaller eigenvalue of `D²g`.
    pub b: f64,
    /// Angle of the eigenvector belonging to `a`.
    pub rotation: f64,
    pub support_radius: f64,
    pub taus: Vec<f64>,
    /// `∬ ψ_χ₁²` per τ.
    pub first: Vec<f64>,
    /// `∬ ψ_χ₂²` per τ.
    pub second: Vec<f64>,
    /// `a·first − b·second` per τ.
    pub q: Vec<f64>,
    /// `∫γ'² ∫γ²`, the τ-independent bound on `first`.
    pub first_bound: f64,
    /// Log-log slope of `second` against `|τ|` over entries with `|τ|`
    /// below the support half-width.
    pub second_slope: Option<f64>,
    pub strictly_concave: bool,
    pub verdict: Verdict,
}

/// Simpson's rule on `[lo, hi]` with an even number of panels.
fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

fn law_hessian(law: &dyn PressureLaw, p: P2) -> [f64; 3] {
    let h = 1e-4 * (1.0 + p[0].abs().max(p[1].abs()));
    let g = |dx: f64, dy: f64| law.g(p[0] + dx, p[1] + dy);
    let g0 = g(0.0, 0.0);
    [
        (g(h, 0.0) - 2.0 * g0 + g(-h, 0.0)) / (h * h),
        (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4.0 * h * h),
        (g(0.0, h) - 2.0 * g0 + g(0.0, -h)) / (h * h),
    ]
}

fn symmetric_eigen(m: [f64; 3]) -> (f64, f64, f64) {
    let [a, b, c] = m;
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (mean + rad, mean - rad, 0.5 * (2.0 * b).atan2(a - c))
}

pub fn second_variation_probe(
    law: &dyn PressureLaw,
    u: &HeightField,
    x0: P2,
    taus: &[f64],
    radius: f64,
    bump: Bump,
) -> Result<SecondVariationReport, SolverError> {
    second_variation_probe_with(law, u, x0, taus, radius, bump, &Tolerances::default())
}

/// Probes at `x₀` with a bump whose support lies in the disc of `radius`.
pub fn second_variation_probe_with(
    law: &dyn PressureLaw,
    u: &HeightField,
    x0: P2,
    taus: &[f64],
    radius: f64,
    bump: Bump,
    tol: &Tolerances,
) -> Result<SecondVariationReport, SolverError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(SolverError::InvalidArgument(format!("support radius {radius}")));
    }
    if taus.is_empty() || taus.iter().any(|t| *t == 0.0 || !t.is_finite()) {
        return Err(SolverError::InvalidArgument("tau schedule needs finite nonzero entries".into()));
    }
    let mesh = &u.mesh;
    let dist = u.omega.boundary_distance(x0);
    if dist < radius {
        return Err(SolverError::TooCloseToBound(dist));
    }
    let near = |p: P2| (p[0] - x0[0]).hypot(p[1] - x0[1]) <= radius;
    let (lo, hi) = (tol.strict * u.m, u.m * (1.0 - tol.top_rel));
    for (p, &v) in mesh.points.iter().zip(&u.values) {
        if near(*p) && !(v > lo && v < hi) {
            return Err(SolverError::TooCloseToBound(v));
        }
    }
    let worst = crease_edges(u, tol.crease)
        .into_iter()
        .filter(|&(a, b, _)| near(mesh.points[a]) || near(mesh.points[b]))
        .map(|(_, _, ang)| ang)
        .fold(None, |m: Option<f64>, a| Some(m.map_or(a, |m| m.max(a))));
    if let Some(ang) = worst {
        return Err(SolverError::CreaseDetected(ang));
    }

    let closest = (0..mesh.len())
        .min_by(|&i, &j| {
            let d = |k: usize| (mesh.points[k][0] - x0[0]).hypot(mesh.points[k][1] - x0[1]);
            d(i).total_cmp(&d(j))
        })
        .ok_or_else(|| SolverError::InvalidField("empty mesh".into()))?;
    let stencil = k_ring(&mesh.neighbors(), closest, 2);
    let fit = fit_quadratic(mesh, &u.values, x0, &stencil)
        .ok_or_else(|| SolverError::InvalidField("degenerate stencil at the probe point".into()))?;
    let [hmin, hmax] = fit.eigenvalues();
    let strictly_concave = hmax < -1e-6 * (1.0 + hmin.abs());

    let d2g = law_hessian(law, fit.gradient);
    let (big, small, rotation) = symmetric_eigen(d2g);
    let (a, b) = (big, -small);

    // The product support [−w, w]² sits inside the disc of `radius`.
    let w = radius / std::f64::consts::SQRT_2;
    let g2 = simpson(|s| bump.eval(s, w).0.powi(2), -w, w, 4000);
    let dg2 = simpson(|s| bump.eval(s, w).1.powi(2), -w, w, 4000);
    let mut first = Vec::with_capacity(taus.len());
    let mut second = Vec::with_capacity(taus.len());
    let mut q = Vec::with_capacity(taus.len());
    for &tau in taus {
        let panels = 4000 + 200 * (w / tau.abs()).ceil() as usize;
        let g2_sin = simpson(|s| (bump.eval(s, w).0 * (s / tau).sin()).powi(2), -w, w, panels);
        let d_osc = simpson(
            |s| {
                let (g, dg) = bump.eval(s, w);
                (dg * (s / tau).sin() + g * (s / tau).cos() / tau).powi(2)
            },
            -w,
            w,
            panels,
        );
        let (i1, i2) = (dg2 * g2_sin, g2 * d_osc);
        first.push(i1);
        second.push(i2);
        q.push(a * i1 - b * i2);
    }

    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(&second)
        .filter(|(t, _)| t.abs() <= w)
        .map(|(t, s)| (t.abs().ln(), s.ln()))
        .collect();
    let second_slope = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let second_slope = second_slope.filter(|s| s.is_finite());

    let verdict = if strictly_concave && b > 0.0 && q.iter().any(|v| *v < 0.0) {
        Verdict::CertifiedNonoptimal
    } else {
        Verdict::Inconclusive
    };
    Ok(SecondVariationReport {
        x0,
        gradient: fit.gradient,
        hessian: fit.hessian,
        d2g,
        a,
        b,
        rotation,
        support_radius: radius,
        taus: taus.to_vec(),
        first,
        second,
        q,
        first_bound: dg2 * g2,
        second_slope,
        strictly_concave,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x * x + 1.0, -1.0, 2.0, 6);
        assert!((v - (15.0 / 4.0 - 6.0 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn bump_derivative_matches_difference_quotient() {
        for bump in [Bump::Exponential, Bump::Polynomial] {
            for s in [-0.3, -0.1, 0.05, 0.2] {
                let h = 1e-6;
                let fd = (bump.eval(s + h, 0.4).0 - bump.eval(s - h, 0.4).0) / (2.0 * h);
                assert!((fd - bump.eval(s, 0.4).1).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn eigen_angle_diagonalizes() {
        let m = [1.0, 0.7, -2.0];
        let (big, small, th) = symmetric_eigen(m);
        let (c, s) = (th.cos(), th.sin());
        let mv = [m[0] * c + m[1] * s, m[1] * c + m[2] * s];
        assert!((mv[0] - big * c).abs() < 1e-12 && (mv[1] - big * s).abs() < 1e-12);
        assert!(small < big);
    }
}
