//! Convex polygonal domains and their sector-ring triangulations.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::SolverError;

pub type P2 = [f64; 2];

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}

/// Convex polygon, counter-clockwise, no repeated or collinear vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Omega {
    vertices: Vec<P2>,
}

impl Omega {
    pub fn polygon(mut pts: Vec<P2>) -> Result<Self, SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidArgument(format!("domain: {m}")));
        if pts.len() < 3 {
            return bad("need at least 3 vertices");
        }
        if pts.iter().flatten().any(|c| !c.is_finite()) {
            return bad("non-finite coordinate");
        }
        let area2: f64 = (0..pts.len())
            .map(|i| cross(pts[i], pts[(i + 1) % pts.len()]))
            .sum();
        if area2 < 0.0 {
            pts.reverse();
        }
        let n = pts.len();
        let scale = pts.iter().map(|p| norm(*p)).fold(0.0, f64::max).max(1e-300);
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            let c = pts[(i + 2) % n];
            if cross(sub(b, a), sub(c, b)) <= 1e-12 * scale * scale {
                return bad("polygon must be strictly convex");
            }
        }
        Ok(Self { vertices: pts })
    }

    /// Regular `sides`-gon inscribed in the circle of radius `radius`, with
    /// a vertex on the positive x axis.
    pub fn disc(radius: f64, sides: usize) -> Result<Self, SolverError> {
        if !(radius > 0.0) || sides < 3 {
            return Err(SolverError::InvalidArgument(format!(
                "disc needs radius > 0 and at least 3 sides, got {radius}, {sides}"
            )));
        }
        let pts = (0..sides)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / sides as f64;
                [radius * a.cos(), radius * a.sin()]
            })
            .collect();
        Self::polygon(pts)
    }

    /// Axis-aligned square `[−h, h]²`.
    pub fn square(h: f64) -> Result<Self, SolverError> {
        Self::polygon(vec![[-h, -h], [h, -h], [h, h], [-h, h]])
    }

    pub fn vertices(&self) -> &[P2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| cross(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn centroid(&self) -> P2 {
        let n = self.vertices.len();
        let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let w = cross(p, q);
            a += w;
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        [cx / (3.0 * a), cy / (3.0 * a)]
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(norm(sub(*a, *b)));
            }
        }
        d
    }

    /// Minkowski gauge about the centroid: 0 at the centroid, 1 on `∂Ω`.
    pub fn gauge(&self, p: P2) -> f64 {
        let c = self.centroid();
        let d = sub(p, c);
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                let e = sub(b, a);
                let nrm = [e[1], -e[0]];
                let h = nrm[0] * (a[0] - c[0]) + nrm[1] * (a[1] - c[1]);
                (nrm[0] * d[0] + nrm[1] * d[1]) / h
            })
            .fold(0.0, f64::max)
    }

    /// Distance from an interior point to the boundary (negative outside).
    pub fn boundary_distance(&self, p: P2) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let e = sub(self.vertices[(i + 1) % n], a);
                cross(e, sub(p, a)) / norm(e)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: P2, tol: f64) -> bool {
        self.boundary_distance(p) >= -tol
    }
}

/// Triangulation of `Ω` by scaled copies of `∂Ω` ("rings") about the
/// centroid. Ring `k` sits at gauge `k/rings`; each side of ring `k` is cut
/// into `max(1, ⌈k·per_edge/rings⌉)` pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub points: Vec<P2>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    /// Gauge level `k/rings` of every vertex.
    pub level: Vec<f64>,
    pub rings: usize,
}

impl Mesh {
    pub fn polar(omega: &Omega, rings: usize, per_edge: usize) -> Result<Self, SolverError> {
        if rings == 0 || per_edge == 0 {
            return Err(SolverError::InvalidArgument(
                "mesh needs at least one ring and one piece per edge".into(),
            ));
        }
        let c = omega.centroid();
        let vs = omega.vertices();
        let ns = vs.len();
        let pieces = |k: usize| -> usize { (k * per_edge).div_ceil(rings).max(1) };

        let mut points = vec![c];
        let mut level = vec![0.0];
        let mut ring_start = vec![0usize];
        for k in 1..=rings {
            ring_start.push(points.len());
            let t = k as f64 / rings as f64;
            let d = pieces(k);
            for j in 0..ns {
                let a = vs[j];
                let b = vs[(j + 1) % ns];
                for i in 0..d {
                    let s = i as f64 / d as f64;
                    let q = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                    points.push([c[0] + t * (q[0] - c[0]), c[1] + t * (q[1] - c[1])]);
                    level.push(t);
                }
            }
        }
        let ring_len = |k: usize| if k == 0 { 1 } else { ns * pieces(k) };
        // Index of the `i`-th point on side `j` of ring `k` (wrapping).
        let idx = |k: usize, j: usize, i: usize| -> usize {
            if k == 0 {
                return 0;
            }
            let d = pieces(k);
            let flat = (j * d + i) % ring_len(k);
            ring_start[k] + flat
        };

        let mut triangles = Vec::new();
        for j in 0..ns {
            for i in 0..pieces(1) {
                triangles.push([0, idx(1, j, i), idx(1, j, i + 1)]);
            }
        }
        for k in 1..rings {
            let (din, dout) = (pieces(k), pieces(k + 1));
            for j in 0..ns {
                let (mut i, mut o) = (0usize, 0usize);
                while i < din || o < dout {
                    // Shorter new diagonal in edge parameter; mirror-symmetric.
                    let (ti, to) = (i as f64 / din as f64, o as f64 / dout as f64);
                    let via_outer = ((o + 1) as f64 / dout as f64 - ti).abs();
                    let via_inner = ((i + 1) as f64 / din as f64 - to).abs();
                    if o < dout && (i == din || via_outer < via_inner) {
                        triangles.push([idx(k, j, i), idx(k + 1, j, o), idx(k + 1, j, o + 1)]);
                        o += 1;
                    } else {
                        triangles.push([idx(k, j, i), idx(k + 1, j, o), idx(k, j, i + 1)]);
                        i += 1;
                    }
                }
            }
        }
        for t in &mut triangles {
            let a = sub(points[t[1]], points[t[0]]);
            let b = sub(points[t[2]], points[t[0]]);
            if cross(a, b) < 0.0 {
                t.swap(1, 2);
            }
        }
        let mut boundary = vec![false; points.len()];
        for b in boundary.iter_mut().skip(ring_start[rings]) {
            *b = true;
        }
        Ok(Self {
            points,
            triangles,
            boundary,
            level,
            rings,
        })
    }

    /// Ring mesh whose outer pieces have roughly the ring spacing.
    pub fn auto(omega: &Omega, rings: usize) -> Result<Self, SolverError> {
        let vs = omega.vertices();
        let c = omega.centroid();
        let reach = vs.iter().map(|v| norm(sub(*v, c))).fold(0.0, f64::max);
        let side = (0..vs.len())
            .map(|i| norm(sub(vs[(i + 1) % vs.len()], vs[i])))
            .fold(0.0, f64::max);
        let per_edge = ((side / reach) * rings as f64).ceil().max(1.0) as usize;
        Self::polar(omega, rings, per_edge)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * cross(
            sub(self.points[b], self.points[a]),
            sub(self.points[c], self.points[a]),
        )
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Longest edge length.
    pub fn spacing(&self) -> f64 {
        let mut h: f64 = 0.0;
        for t in &self.triangles {
            for e in 0..3 {
                h = h.max(norm(sub(self.points[t[e]], self.points[t[(e + 1) % 3]])));
            }
        }
        h
    }

    /// Sorted neighbor lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb: Vec<HashSet<usize>> = vec![HashSet::new(); self.len()];
        for t in &self.triangles {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                nb[a].insert(b);
                nb[b].insert(a);
            }
        }
        nb.into_iter()
            .map(|s| {
                let mut v: Vec<usize> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// Interior edges `(a, b, t_left, t_right)` with `a < b`.
    pub fn interior_edges(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push(ti);
            }
        }
        let mut out: Vec<_> = map
            .into_iter()
            .filter(|(_, ts)| ts.len() == 2)
            .map(|((a, b), ts)| (a, b, ts[0], ts[1]))
            .collect();
        out.sort_unstable();
        out
    }

    /// SHA-256 over the vertex count and triangle indices.
    pub fn topology_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.points.len() as u64).to_le_bytes());
        for t in &self.triangles {
            for &v in t {
                h.update((v as u64).to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    /// Vertex permutations induced by the eight isometries of the square
    /// about `center` that map this mesh onto itself (vertices and
    /// triangles). `perm[v]` is the image of vertex `v`.
    pub fn square_symmetries(&self, center: P2) -> Vec<Vec<usize>> {
        let maps: [[f64; 4]; 8] = [
            [1.0, 0.0, 0.0, 1.0],
            [0.0, -1.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, -1.0, 0.0],
            [1.0, 0.0, 0.0, -1.0],
            [-1.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, -1.0, -1.0, 0.0],
        ];
        let h = self.spacing().max(1e-300);
        let key = |p: P2| -> (i64, i64) {
            let q = 1e6 / h;
            ((p[0] * q).round() as i64, (p[1] * q).round() as i64)
        };
        let index: HashMap<(i64, i64), usize> =
            self.points.iter().enumerate().map(|(i, p)| (key(*p), i)).collect();
        let tri_set: HashSet<[usize; 3]> = self
            .triangles
            .iter()
            .map(|t| {
                let mut s = *t;
                s.sort_unstable();
                s
            })
            .collect();
        let mut out = Vec::new();
        'maps: for m in maps {
            let mut perm = Vec::with_capacity(self.len());
            for p in &self.points {
                let d = sub(*p, center);
                let q = [
                    center[0] + m[0] * d[0] + m[1] * d[1],
                    center[1] + m[2] * d[0] + m[3] * d[1],
                ];
                match index.get(&key(q)) {
                    Some(&j) if norm(sub(self.points[j], q)) <= 1e-9 * h => perm.push(j),
                    _ => continue 'maps,
                }
            }
            for t in &self.triangles {
                let mut s = [perm[t[0]], perm[t[1]], perm[t[2]]];
                s.sort_unstable();
                if !tri_set.contains(&s) {
                    continue 'maps;
                }
            }
            out.push(perm);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_mesh_tiles_the_polygon() {
        let om = Omega::disc(1.0, 64).unwrap();
        let mesh = Mesh::auto(&om, 12).unwrap();
        assert!((mesh.area() - om.area()).abs() < 1e-12);
        assert!((0..mesh.triangles.len()).all(|t| mesh.triangle_area(t) > 0.0));
        // Euler characteristic of a disc.
        let e = mesh.interior_edges().len()
            + mesh.boundary.iter().filter(|b| **b).count();
        assert_eq!(mesh.len() + mesh.triangles.len(), e + 1);
    }

    #[test]
    fn ring_points_sit_on_their_gauge_level() {
        let om = Omega::polygon(vec![[0.0, 0.0], [3.0, 0.0], [2.0, 2.0], [0.0, 1.5]]).unwrap();
        let mesh = Mesh::polar(&om, 7, 3).unwrap();
        for (p, l) in mesh.points.iter().zip(&mesh.level) {
            assert!((om.gauge(*p) - l).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_square_mesh_has_full_symmetry() {
        let om = Omega::square(1.0).unwrap();
        let mesh = Mesh::polar(&om, 6, 6).unwrap();
        let c = om.centroid();
        assert_eq!(mesh.square_symmetries(c).len(), 8, "centroid {c:?}");
    }

    #[test]
    fn non_convex_polygon_is_rejected() {
        let r = Omega::polygon(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.2], [1.0, 2.0]]);
        assert!(r.is_err());
    }
}
