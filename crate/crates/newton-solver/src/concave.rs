//! Least concave majorant of scattered values via the upper convex hull of
//! the lifted point set.

use convex_core::{hull_triangles, Vec3};

use crate::mesh::P2;
use crate::SolverError;

/// Relative hull tolerance. Points within this distance of a hull face are
/// absorbed; the final `max` with the input keeps the majorant property.
const HULL_EPS: f64 = 1e-13;
const JOGGLES: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Deterministic value in `[−1, 1]` (splitmix64).
fn jitter(i: u64) -> f64 {
    let mut x = i.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    (x >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

struct UpperSurface {
    pts: Vec<Vec3>,
    tris: Vec<[usize; 3]>,
    lo: P2,
    cell: f64,
    dims: (usize, usize),
    buckets: Vec<Vec<usize>>,
}

impl UpperSurface {
    /// Hull of the lifted points with `z` jittered by a deterministic
    /// amount of order `joggle·scale`; jitter is retried larger when the
    /// hull reports inconsistent topology. Interpolation uses the original
    /// heights, so exactly coplanar groups stay exact.
    fn build(xy: &[P2], z: &[f64]) -> Result<Self, SolverError> {
        let mut last = None;
        for joggle in JOGGLES {
            match Self::build_once(xy, z, joggle) {
                Ok(s) => return Ok(s),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    fn build_once(xy: &[P2], z: &[f64], joggle: f64) -> Result<Self, SolverError> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in xy {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
        let zmin = z.iter().copied().fold(f64::INFINITY, f64::min);
        let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scale = span.max(zmax - zmin);
        let mut lifted: Vec<Vec3> = xy
            .iter()
            .zip(z)
            .enumerate()
            .map(|(i, (p, &h))| Vec3::new(p[0], p[1], h + joggle * scale * jitter(i as u64)))
            .collect();
        let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        let deep_z = zmin - (zmax - zmin) - span;
        lifted.push(Vec3::new(mid[0], mid[1], deep_z));
        let all = hull_triangles(&lifted, HULL_EPS * scale)?;
        let mut pts: Vec<Vec3> = xy
            .iter()
            .zip(z)
            .map(|(p, &h)| Vec3::new(p[0], p[1], h))
            .collect();
        pts.push(Vec3::new(mid[0], mid[1], deep_z));

        let deep = pts.len() - 1;
        let min_area = 1e-14 * span * span;
        let tris: Vec<[usize; 3]> = all
            .into_iter()
            .filter(|t| !t.contains(&deep))
            .filter(|t| {
                let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
                let nz = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
                nz > min_area
            })
            .collect();

        let g = ((tris.len() as f64).sqrt().ceil() as usize).clamp(1, 512);
        let cell = span / g as f64 * (1.0 + 1e-9);
        let mut buckets = vec![Vec::new(); g * g];
        let clampi = |v: f64| (v.max(0.0) as usize).min(g - 1);
        for (ti, t) in tris.iter().enumerate() {
            let (mut x0, mut y0, mut x1, mut y1) =
                (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &v in t {
                x0 = x0.min(pts[v].x);
                y0 = y0.min(pts[v].y);
                x1 = x1.max(pts[v].x);
                y1 = y1.max(pts[v].y);
            }
            let pad = 1e-9 * span;
            let (i0, i1) = (clampi((x0 - pad - lo[0]) / cell), clampi((x1 + pad - lo[0]) / cell));
            let (j0, j1) = (clampi((y0 - pad - lo[1]) / cell), clampi((y1 + pad - lo[1]) / cell));
            for i in i0..=i1 {
                for j in j0..=j1 {
                    buckets[j * g + i].push(ti);
                }
            }
        }
        Ok(Self {
            pts,
            tris,
            lo,
            cell,
            dims: (g, g),
            buckets,
        })
    }

    /// Envelope value at `q`, or `None` if no upper face covers `q`.
    fn eval(&self, q: P2) -> Option<f64> {
        let (gx, gy) = self.dims;
        let i = (((q[0] - self.lo[0]) / self.cell).max(0.0) as usize).min(gx - 1);
        let j = (((q[1] - self.lo[1]) / self.cell).max(0.0) as usize).min(gy - 1);
        let mut best: Option<f64> = None;
        for &ti in &self.buckets[j * gx + i] {
            let t = self.tris[ti];
            let (a, b, c) = (self.pts[t[0]], self.pts[t[1]], self.pts[t[2]]);
            let det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
            let l1 = ((q[0] - a.x) * (c.y - a.y) - (q[1] - a.y) * (c.x - a.x)) / det;
            let l2 = ((b.x - a.x) * (q[1] - a.y) - (b.y - a.y) * (q[0] - a.x)) / det;
            let l0 = 1.0 - l1 - l2;
            let tol = -1e-9;
            if l0 < tol || l1 < tol || l2 < tol {
                continue;
            }
            let v = l0 * a.z + l1 * b.z + l2 * c.z;
            best = Some(best.map_or(v, |bv: f64| bv.min(v)));
        }
        best
    }
}

/// Least concave majorant of the lifted points `(xy[i], z[i])`, evaluated at
/// `queries`. Queries outside the convex hull of `xy` get `None`.
pub fn concave_envelope(
    xy: &[P2],
    z: &[f64],
    queries: &[P2],
) -> Result<Vec<Option<f64>>, SolverError> {
    if xy.len() != z.len() {
        return Err(SolverError::InvalidArgument(
            "point and value counts differ".into(),
        ));
    }
    let surf = UpperSurface::build(xy, z)?;
    Ok(queries.iter().map(|q| surf.eval(*q)).collect())
}

/// `clamp(LCM(clamp(u, 0, M)), 0, M)` at the mesh vertices.
pub fn project_concave(xy: &[P2], u: &[f64], m: f64) -> Result<Vec<f64>, SolverError> {
    let clamped: Vec<f64> = u.iter().map(|v| v.clamp(0.0, m)).collect();
    let zmax = clamped.iter().copied().fold(0.0, f64::max);
    let zmin = clamped.iter().copied().fold(f64::INFINITY, f64::min);
    if zmax - zmin <= 0.0 {
        return Ok(clamped);
    }
    let surf = UpperSurface::build(xy, &clamped)?;
    Ok(xy
        .iter()
        .zip(&clamped)
        .map(|(q, &c)| surf.eval(*q).unwrap_or(c).max(c).clamp(0.0, m))
        .collect())
}

/// A concave field together with the extreme points of its lifted set, for
/// cheap exact re-projection after a single-vertex change.
pub(crate) struct ConcaveState<'a> {
    xy: &'a [P2],
    pub values: Vec<f64>,
    m: f64,
    extreme: Vec<usize>,
    /// Upper triangles as indices into `xy`.
    tris: Vec<[usize; 3]>,
}

impl<'a> ConcaveState<'a> {
    /// `values` must already be a fixed point of [`project_concave`].
    pub fn new(xy: &'a [P2], values: Vec<f64>, m: f64) -> Result<Self, SolverError> {
        let surf = UpperSurface::build(xy, &values)?;
        let mut seen = vec![false; xy.len()];
        for t in &surf.tris {
            for &v in t {
                seen[v] = true;
            }
        }
        let extreme = (0..xy.len()).filter(|&i| seen[i]).collect();
        Ok(Self {
            xy,
            values,
            m,
            extreme,
            tris: surf.tris,
        })
    }

    pub fn is_extreme(&self, v: usize) -> bool {
        self.extreme.binary_search(&v).is_ok()
    }

    fn envelope_of(&self, subset: &[usize], raw: &[f64]) -> Result<Vec<f64>, SolverError> {
        let xy: Vec<P2> = subset.iter().map(|&i| self.xy[i]).collect();
        let z: Vec<f64> = subset.iter().map(|&i| raw[i]).collect();
        let surf = UpperSurface::build(&xy, &z)?;
        Ok(self
            .xy
            .iter()
            .zip(raw)
            .map(|(q, &c)| surf.eval(*q).unwrap_or(c).max(c).clamp(0.0, self.m))
            .collect())
    }

    /// Projection of the field with vertex `v` set to `z`.
    pub fn moved(&self, v: usize, z: f64) -> Result<Vec<f64>, SolverError> {
        let z = z.clamp(0.0, self.m);
        let mut raw = self.values.clone();
        raw[v] = z;
        if z >= self.values[v] {
            let mut subset = self.extreme.clone();
            if !self.is_extreme(v) {
                subset.push(v);
            }
            return self.envelope_of(&subset, &raw);
        }
        if !self.is_extreme(v) {
            // A non-extreme point lies under the envelope; lowering it is
            // undone by the projection.
            return Ok(self.values.clone());
        }
        // Points under the star of `v` may become extreme.
        let star: Vec<[usize; 3]> = self
            .tris
            .iter()
            .filter(|t| t.contains(&v))
            .copied()
            .collect();
        let mut subset = self.extreme.clone();
        for (w, q) in self.xy.iter().enumerate() {
            if self.is_extreme(w) {
                continue;
            }
            if star.iter().any(|t| in_triangle(*q, self.xy[t[0]], self.xy[t[1]], self.xy[t[2]])) {
                subset.push(w);
            }
        }
        self.envelope_of(&subset, &raw)
    }
}

fn in_triangle(q: P2, a: P2, b: P2, c: P2) -> bool {
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if det.abs() < 1e-300 {
        return false;
    }
    let l1 = ((q[0] - a[0]) * (c[1] - a[1]) - (q[1] - a[1]) * (c[0] - a[0])) / det;
    let l2 = ((b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])) / det;
    let tol = 1e-9;
    l1 >= -tol && l2 >= -tol && 1.0 - l1 - l2 >= -tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Mesh, Omega};

    #[test]
    fn single_vertex_moves_match_full_projection() {
        let om = Omega::disc(1.0, 16).unwrap();
        let mesh = Mesh::auto(&om, 8).unwrap();
        let raw: Vec<f64> = mesh
            .points
            .iter()
            .map(|p| (0.9 - 0.7 * p[0] * p[0] - 0.4 * p[1] * p[1] + 0.3 * p[0]).min(0.8))
            .collect();
        let u = project_concave(&mesh.points, &raw, 1.0).unwrap();
        let state = ConcaveState::new(&mesh.points, u.clone(), 1.0).unwrap();
        for v in (0..mesh.len()).step_by(7) {
            for z in [u[v] + 0.05, u[v] - 0.05, 1.0, 0.0] {
                let fast = state.moved(v, z).unwrap();
                let mut r = u.clone();
                r[v] = z;
                let full = project_concave(&mesh.points, &r, 1.0).unwrap();
                let dev = fast.iter().zip(&full).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(dev < 1e-9, "vertex {v} target {z}: {dev}");
            }
        }
    }
}
