//! Structural checks on heightfields: the forbidden slope band, the top set
//! and boundary values, and the Hessian determinant away from creases.

use std::collections::HashMap;

use convex_core::Tolerances;
use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::field::{GradOps, HeightField};
use crate::mesh::{Mesh, P2};

pub const P2_LABEL: &str = "printed dichotomy reads |grad u| >= 1 or |grad u| = 1; \
tested as |grad u| >= 1 or |grad u| = 0 (forbidden band (delta, 1 - delta))";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct P2Report {
    pub delta: f64,
    pub triangles: usize,
    pub violations: Vec<usize>,
    /// Violating triangles over all triangles.
    pub fraction: f64,
    /// Violating area over the area of `Ω`.
    pub area_fraction: f64,
    pub note: String,
}

/// Triangles whose gradient norm lies strictly inside `(δ, 1 − δ)`.
pub fn verify_p2(u: &HeightField, delta: f64) -> P2Report {
    let ops = GradOps::new(&u.mesh);
    let grads = ops.gradients(&u.values);
    let mut violations = Vec::new();
    let mut bad_area = 0.0;
    for (t, g) in grads.iter().enumerate() {
        let s = g[0].hypot(g[1]);
        if s > delta && s < 1.0 - delta {
            violations.push(t);
            bad_area += ops.area[t];
        }
    }
    let total: f64 = ops.area.iter().sum();
    P2Report {
        delta,
        triangles: grads.len(),
        fraction: violations.len() as f64 / grads.len().max(1) as f64,
        area_fraction: bad_area / total,
        violations,
        note: P2_LABEL.into(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct P4P5Report {
    pub top_vertices: usize,
    pub top_diameter: f64,
    /// Area of triangles with all three vertices in the top set.
    pub top_area: f64,
    pub max_boundary_value: f64,
    pub mesh_spacing: f64,
}

pub fn verify_p4_p5(u: &HeightField) -> P4P5Report {
    verify_p4_p5_with(u, &Tolerances::default())
}

pub fn verify_p4_p5_with(u: &HeightField, tol: &Tolerances) -> P4P5Report {
    let top = u.top_set(tol.top_rel);
    let pts: Vec<P2> = top.iter().map(|&i| u.mesh.points[i]).collect();
    let mut diam: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            diam = diam.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    let mut in_top = vec![false; u.values.len()];
    top.iter().for_each(|&i| in_top[i] = true);
    let top_area = (0..u.mesh.triangles.len())
        .filter(|&t| u.mesh.triangles[t].iter().all(|&v| in_top[v]))
        .map(|t| u.mesh.triangle_area(t))
        .sum();
    let max_boundary_value = u
        .values
        .iter()
        .zip(&u.mesh.boundary)
        .filter(|(_, b)| **b)
        .map(|(v, _)| v.abs())
        .fold(0.0, f64::max);
    P4P5Report {
        top_vertices: top.len(),
        top_diameter: diam,
        top_area,
        max_boundary_value,
        mesh_spacing: u.mesh.spacing(),
    }
}

/// Quadratic least-squares fit `u ≈ c + g·d + ½ dᵀHd` about a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalQuadratic {
    pub value: f64,
    pub gradient: P2,
    /// `[h_xx, h_xy, h_yy]`.
    pub hessian: [f64; 3],
}

impl LocalQuadratic {
    pub fn det(&self) -> f64 {
        self.hessian[0] * self.hessian[2] - self.hessian[1] * self.hessian[1]
    }

    /// Eigenvalues of the Hessian, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let [a, b, c] = self.hessian;
        let mean = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        [mean - rad, mean + rad]
    }
}

/// Vertices within `rings` graph steps of `v`, including `v`.
pub(crate) fn k_ring(nb: &[Vec<usize>], v: usize, rings: usize) -> Vec<usize> {
    let mut seen = vec![v];
    let mut frontier = vec![v];
    for _ in 0..rings {
        let mut next = Vec::new();
        for &a in &frontier {
            for &b in &nb[a] {
                if !seen.contains(&b) {
                    seen.push(b);
                    next.push(b);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Fits a quadratic to the values at `stencil` about `center`.
pub fn fit_quadratic(mesh: &Mesh, values: &[f64], center: P2, stencil: &[usize]) -> Option<LocalQuadratic> {
    if stencil.len() < 6 {
        return None;
    }
    let h = stencil
        .iter()
        .map(|&i| (mesh.points[i][0] - center[0]).hypot(mesh.points[i][1] - center[1]))
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut ata = Matrix6::<f64>::zeros();
    let mut atb = Vector6::<f64>::zeros();
    for &i in stencil {
        let dx = (mesh.points[i][0] - center[0]) / h;
        let dy = (mesh.points[i][1] - center[1]) / h;
        let row = Vector6::new(1.0, dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy);
        ata += row * row.transpose();
        atb += row * values[i];
    }
    let sol = ata.cholesky()?.solve(&atb);
    if sol.iter().any(|x| !x.is_finite()) {
        return None;
    }
    Some(LocalQuadratic {
        value: sol[0],
        gradient: [sol[1] / h, sol[2] / h],
        hessian: [sol[3] / (h * h), sol[4] / (h * h), sol[5] / (h * h)],
    })
}

/// Angle between the graph normals of the two triangles at each interior
/// edge, for edges where it exceeds `threshold`.
pub fn crease_edges(u: &HeightField, threshold: f64) -> Vec<(usize, usize, f64)> {
    let ops = GradOps::new(&u.mesh);
    let grads = ops.gradients(&u.values);
    let normal = |g: P2| {
        let n = (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt();
        [-g[0] / n, -g[1] / n, 1.0 / n]
    };
    u.mesh
        .interior_edges()
        .into_iter()
        .filter_map(|(a, b, t1, t2)| {
            let (n1, n2) = (normal(grads[t1]), normal(grads[t2]));
            let dot: f64 = (0..3).map(|k| n1[k] * n2[k]).sum();
            let cr = [
                n1[1] * n2[2] - n1[2] * n2[1],
                n1[2] * n2[0] - n1[0] * n2[2],
                n1[0] * n2[1] - n1[1] * n2[0],
            ];
            let ang = (cr[0].hypot(cr[1]).hypot(cr[2])).atan2(dot);
            (ang > threshold).then_some((a, b, ang))
        })
        .collect()
}

/// Flags points within `radius` of any marked point.
struct NearIndex {
    cell: f64,
    grid: HashMap<(i64, i64), Vec<P2>>,
}

impl NearIndex {
    fn new(points: impl Iterator<Item = P2>, radius: f64) -> Self {
        let cell = radius.max(1e-300);
        let mut grid: HashMap<(i64, i64), Vec<P2>> = HashMap::new();
        for p in points {
            let key = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
            grid.entry(key).or_default().push(p);
        }
        Self { cell, grid }
    }

    fn near(&self, q: P2, radius: f64) -> bool {
        let (ci, cj) = ((q[0] / self.cell).floor() as i64, (q[1] / self.cell).floor() as i64);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(v) = self.grid.get(&(ci + di, cj + dj)) {
                    if v.iter().any(|p| (p[0] - q[0]).hypot(p[1] - q[1]) < radius) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetReport {
    pub margin: f64,
    pub used: usize,
    pub excluded_boundary: usize,
    pub excluded_top: usize,
    pub excluded_crease: usize,
    pub crease_edges: usize,
    pub median_abs_det: f64,
    pub mean_abs_det: f64,
    pub p90_abs_det: f64,
    pub max_abs_det: f64,
}

pub fn verify_det_d2(u: &HeightField, margin: f64) -> DetReport {
    verify_det_d2_with(u, margin, &Tolerances::default())
}

pub fn verify_det_d2_with(u: &HeightField, margin: f64, tol: &Tolerances) -> DetReport {
    let mesh = &u.mesh;
    let nb = mesh.neighbors();
    let top = u.top_set(tol.top_rel);
    let top_idx = NearIndex::new(top.iter().map(|&i| mesh.points[i]), margin);
    let creases = crease_edges(u, tol.crease);
    let crease_idx = NearIndex::new(
        creases
            .iter()
            .flat_map(|&(a, b, _)| [mesh.points[a], mesh.points[b]]),
        margin,
    );
    let (mut eb, mut et, mut ec) = (0, 0, 0);
    let mut dets = Vec::new();
    for v in 0..mesh.len() {
        let p = mesh.points[v];
        if mesh.boundary[v] || u.omega.boundary_distance(p) < margin {
            eb += 1;
            continue;
        }
        if top_idx.near(p, margin) {
            et += 1;
            continue;
        }
        if crease_idx.near(p, margin) {
            ec += 1;
            continue;
        }
        let stencil = k_ring(&nb, v, 2);
        if let Some(q) = fit_quadratic(mesh, &u.values, p, &stencil) {
            dets.push(q.det().abs());
        }
    }
    dets.sort_by(f64::total_cmp);
    let pick = |f: f64| {
        if dets.is_empty() {
            f64::NAN
        } else {
            dets[((dets.len() - 1) as f64 * f).round() as usize]
        }
    };
    let median = if dets.is_empty() {
        f64::NAN
    } else if dets.len() % 2 == 1 {
        dets[dets.len() / 2]
    } else {
        0.5 * (dets[dets.len() / 2 - 1] + dets[dets.len() / 2])
    };
    DetReport {
        margin,
        used: dets.len(),
        excluded_boundary: eb,
        excluded_top: et,
        excluded_crease: ec,
        crease_edges: creases.len(),
        median_abs_det: median,
        mean_abs_det: if dets.is_empty() {
            f64::NAN
        } else {
            dets.iter().sum::<f64>() / dets.len() as f64
        },
        p90_abs_det: pick(0.9),
        max_abs_det: dets.last().copied().unwrap_or(f64::NAN),
    }
}
