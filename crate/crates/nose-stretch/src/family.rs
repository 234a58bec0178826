use convex_core::{Polytope, Tolerances, Vec3};
use serde::Serialize;
use surface_measure::{
    eval_functional, measure_linear_combine, measure_of_with, DiscreteSurfaceMeasure,
    Orientation, PressureLaw,
};

use crate::{decompose_with, negative_range, stretch, NoseDecomposition, NoseError, Obstacle};

pub(crate) fn boundary_measure(c: &Polytope, tol: &Tolerances) -> DiscreteSurfaceMeasure {
    let all: Vec<usize> = (0..c.facets().len()).collect();
    measure_of_with(c, &all, Orientation::Outward, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyMeasureReport {
    pub s: Vec<f64>,
    /// Atom-wise deviation divided by the area of `∂C`, per grid point.
    pub deviation: Vec<f64>,
    pub max_deviation: f64,
    /// Closure defect of each stretched body divided by its area.
    pub closure: Vec<f64>,
}

/// Compares `ν_{∂C(s)}` with `ν_{∂C} + s·ν₀` on a grid in `[0, 1]`.
pub fn family_measure_check(
    d: &NoseDecomposition,
    s_grid: &[f64],
) -> Result<FamilyMeasureReport, NoseError> {
    let tol = d.tolerances();
    let base = d.body_measure();
    let nu0 = d.nu0();
    let area = d.body.area();
    let mut deviation = Vec::with_capacity(s_grid.len());
    let mut closure = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        if !(0.0..=1.0).contains(&s) {
            return Err(NoseError::OutOfRange(s));
        }
        let body = stretch(d, s, &[])?;
        let actual = boundary_measure(&body, tol);
        let predicted = measure_linear_combine(&[1.0, s], &[&base, &nu0]);
        deviation.push(actual.max_deviation(&predicted) / area);
        closure.push(actual.closure_defect() / body.area());
    }
    let max_deviation = deviation.iter().copied().fold(0.0, f64::max);
    Ok(FamilyMeasureReport {
        s: s_grid.to_vec(),
        deviation,
        max_deviation,
        closure,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyRow {
    pub s: f64,
    pub f: f64,
    pub area_near: f64,
    pub area_cone: f64,
    pub closure_defect: f64,
}

/// Least-squares line through `(s, F)` and its worst residual.
#[derive(Clone, Debug, Serialize)]
pub struct AffineFit {
    pub intercept: f64,
    pub slope: f64,
    /// `max |residual| / max |F|`.
    pub max_residual: f64,
}

impl AffineFit {
    pub fn fit(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let intercept = my - slope * mx;
        let scale = ys.iter().map(|y| y.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let max_residual = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).abs())
            .fold(0.0, f64::max)
            / scale;
        Self {
            intercept,
            slope,
            max_residual,
        }
    }
}

/// `F(∂C(s))` along a grid in `[0, 1]`, with the near and cone area split of
/// the stretched boundary.
pub fn resistance_along_family(
    law: &dyn PressureLaw,
    d: &NoseDecomposition,
    s_grid: &[f64],
) -> Result<(Vec<FamilyRow>, AffineFit), NoseError> {
    let tol = d.tolerances();
    let (a_near, a_cone) = (d.area_near(), d.area_cone());
    let mut rows = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        if !(0.0..=1.0).contains(&s) {
            return Err(NoseError::OutOfRange(s));
        }
        let body = stretch(d, s, &[])?;
        let nu = boundary_measure(&body, tol);
        rows.push(FamilyRow {
            s,
            f: eval_functional(law, &nu),
            area_near: (1.0 - s) * a_near,
            area_cone: s * a_cone,
            closure_defect: nu.closure_defect(),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.s).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.f).collect();
    let fit = AffineFit::fit(&xs, &ys);
    Ok((rows, fit))
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport {
    /// `F(V) − F(∂₋C)`.
    pub analytic: f64,
    pub f_cone: f64,
    pub f_near: f64,
    pub finite_difference: f64,
    /// Central differences were possible (negative side admissible).
    pub two_sided: bool,
    /// Admissible negative range found for the obstacle set.
    pub negative_range: f64,
    /// `|fd − analytic| / |analytic|`, or the absolute gap when the analytic
    /// value is zero.
    pub rel_error: f64,
}

/// Right derivative of `s ↦ F(∂C(s))` at 0, checked against Richardson
/// extrapolated finite differences with step `h`.
pub fn stretch_derivative(
    law: &dyn PressureLaw,
    d: &NoseDecomposition,
    obstacles: &[Obstacle],
    h: f64,
) -> Result<DerivativeReport, NoseError> {
    let tol = d.tolerances();
    let f_cone = eval_functional(law, &d.cone_measure());
    let f_near = eval_functional(law, &d.near_measure());
    let analytic = f_cone - f_near;
    let sigma = negative_range(d, obstacles);
    let two_sided = sigma >= 2.0 * h;
    let f_at = |s: f64| -> Result<f64, NoseError> {
        Ok(eval_functional(law, &boundary_measure(&stretch(d, s, obstacles)?, tol)))
    };
    let f0 = f_at(0.0)?;
    let finite_difference = if two_sided {
        let dc = |k: f64| -> Result<f64, NoseError> {
            Ok((f_at(k * h)? - f_at(-k * h)?) / (2.0 * k * h))
        };
        (4.0 * dc(1.0)? - dc(2.0)?) / 3.0
    } else {
        let d1 = (f_at(h)? - f0) / h;
        let d2 = (f_at(2.0 * h)? - f0) / (2.0 * h);
        2.0 * d1 - d2
    };
    let gap = (finite_difference - analytic).abs();
    let rel_error = if analytic != 0.0 { gap / analytic.abs() } else { gap };
    Ok(DerivativeReport {
        analytic,
        f_cone,
        f_near,
        finite_difference,
        two_sided,
        negative_range: sigma,
        rel_error,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StationaryApex {
    pub apex: Vec3,
    pub derivative: f64,
    pub iterations: usize,
}

/// Bisects the apex position `base + t·dir`, `t ∈ [t_lo, t_hi]`, for a zero of
/// `F(V) − F(∂₋C)`. The endpoints must bracket a sign change.
pub fn find_stationary_apex(
    law: &dyn PressureLaw,
    c: &Polytope,
    base: &Vec3,
    dir: &Vec3,
    (t_lo, t_hi): (f64, f64),
    tol_t: f64,
    tolerances: &Tolerances,
) -> Result<StationaryApex, NoseError> {
    let g = |t: f64| -> Result<f64, NoseError> {
        let d = decompose_with(c, &(base + dir * t), tolerances)?;
        Ok(eval_functional(law, &d.cone_measure()) - eval_functional(law, &d.near_measure()))
    };
    let (mut lo, mut hi) = (t_lo, t_hi);
    let (g_lo, g_hi) = (g(lo)?, g(hi)?);
    if g_lo.signum() == g_hi.signum() {
        return Err(NoseError::NoRoot(format!(
            "no sign change on [{t_lo}, {t_hi}]: {g_lo:e}, {g_hi:e}"
        )));
    }
    let mut iterations = 0;
    let lo_negative = g_lo < 0.0;
    while hi - lo > tol_t && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid)? < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let (glo, ghi) = (g(lo)?, g(hi)?);
    let t = if glo.abs() <= ghi.abs() { lo } else { hi };
    Ok(StationaryApex {
        apex: base + dir * t,
        derivative: glo.abs().min(ghi.abs()),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose;
    use convex_core::geom::v3;
    use convex_core::shapes;
    use surface_measure::{AreaLaw, ClassicalLaw, RearLaw};

    #[test]
    fn area_derivative_of_cube_cap() {
        let d = decompose(&shapes::unit_cube(), &v3(0.5, 0.5, 1.5)).unwrap();
        let r = stretch_derivative(&AreaLaw, &d, &[], 1e-4).unwrap();
        assert!((r.analytic - (2f64.sqrt() - 1.0)).abs() < 1e-14);
        assert!(r.two_sided);
        let obs = crate::singular_edge_obstacles(&d.body, d.tolerances());
        let r = stretch_derivative(&AreaLaw, &d, &obs, 1e-4).unwrap();
        assert!(!r.two_sided);
        assert!(r.rel_error < 1e-5, "{r:?}");
    }

    #[test]
    fn rear_law_has_zero_derivative_from_above() {
        let d = decompose(&shapes::unit_cube(), &v3(0.5, 0.5, 1.5)).unwrap();
        let r = stretch_derivative(&RearLaw, &d, &[], 1e-4).unwrap();
        assert_eq!(r.analytic, 0.0);
        assert!(r.finite_difference.abs() < 1e-12);
    }

    #[test]
    fn classical_slope_by_hand() {
        let d = decompose(&shapes::unit_cube(), &v3(0.5, 0.5, 1.5)).unwrap();
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let (rows, fit) = resistance_along_family(&ClassicalLaw, &d, &grid).unwrap();
        // four triangles of area √2/4 with n₃ = 1/√2
        let f_v = 4.0 * (2f64.sqrt() / 4.0) * (1.0 / 2f64.sqrt()).powi(3);
        assert!((fit.slope - (f_v - 1.0)).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
        assert_eq!(rows.len(), 11);
    }
}
