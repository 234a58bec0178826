use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::hull::quickhull;
use super::PolytopeError;
use crate::geom::{bbox_diagonal, Vec3};
use crate::tol::Tolerances;

/// Planar facet with outward unit normal; `vertices` is a counter-clockwise
/// loop seen from outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec3,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

/// Edge `a < b` between facets `left` (which traverses `a → b`) and `right`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub left: usize,
    pub right: usize,
}

/// Bounded convex body with nonempty interior, stored as vertices plus
/// merged facets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    vertices: Vec<Vec3>,
    facets: Vec<Facet>,
    edges: Vec<Edge>,
    scale: f64,
}

/// Convex hull with default tolerances.
pub fn hull3d(points: &[Vec3]) -> Result<Polytope, PolytopeError> {
    hull3d_with(points, &Tolerances::default())
}

pub fn hull3d_with(points: &[Vec3], tol: &Tolerances) -> Result<Polytope, PolytopeError> {
    let scale = bbox_diagonal(points).max(f64::MIN_POSITIVE);
    let eps = tol.plane * scale;
    let tris = quickhull(points, eps)?;
    Polytope::from_triangles(points, &tris, eps)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

fn tri_normal(p: &[Vec3], t: &[usize; 3]) -> Vec3 {
    (p[t[1]] - p[t[0]]).cross(&(p[t[2]] - p[t[0]]))
}

/// Newell normal of a closed loop (length = twice the area).
fn newell(points: &[Vec3], lp: &[usize]) -> Vec3 {
    let mut n = Vec3::zeros();
    for i in 0..lp.len() {
        let a = points[lp[i]];
        let b = points[lp[(i + 1) % lp.len()]];
        n += a.cross(&b);
    }
    n
}

impl Polytope {
    fn from_triangles(
        points: &[Vec3],
        tris: &[[usize; 3]],
        eps: f64,
    ) -> Result<Self, PolytopeError> {
        let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
        for (ti, t) in tris.iter().enumerate() {
            for e in 0..3 {
                edge_face.insert((t[e], t[(e + 1) % 3]), ti);
            }
        }
        let normals: Vec<Vec3> = tris.iter().map(|t| tri_normal(points, t).normalize()).collect();

        let mut uf = UnionFind((0..tris.len()).collect());
        for (ti, t) in tris.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let Some(&tj) = edge_face.get(&(b, a)) else {
                    return Err(PolytopeError::DegenerateInput("open hull surface".into()));
                };
                if tj < ti || normals[ti].dot(&normals[tj]) <= 0.0 {
                    continue;
                }
                let opp_j = tris[tj].iter().copied().find(|&v| v != a && v != b).unwrap();
                let opp_i = t[(e + 2) % 3];
                let di = normals[ti].dot(&(points[opp_j] - points[a])).abs();
                let dj = normals[tj].dot(&(points[opp_i] - points[a])).abs();
                if di <= eps && dj <= eps {
                    uf.union(ti, tj);
                }
            }
        }

        // Group triangles, keeping the order of first appearance.
        let mut group_of: HashMap<usize, usize> = HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for ti in 0..tris.len() {
            let r = uf.find(ti);
            let g = *group_of.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(ti);
        }
        let tri_group: Vec<usize> = (0..tris.len()).map(|ti| group_of[&uf.find(ti)]).collect();

        let mut loops = Vec::with_capacity(groups.len());
        for (g, members) in groups.iter().enumerate() {
            let mut next: HashMap<usize, usize> = HashMap::new();
            let mut start = usize::MAX;
            for &ti in members {
                let t = tris[ti];
                for e in 0..3 {
                    let (a, b) = (t[e], t[(e + 1) % 3]);
                    if tri_group[edge_face[&(b, a)]] != g {
                        if next.insert(a, b).is_some() {
                            return Err(PolytopeError::DegenerateInput(
                                "pinched facet boundary".into(),
                            ));
                        }
                        start = start.min(a);
                    }
                }
            }
            let mut lp = vec![start];
            let mut cur = next[&start];
            while cur != start {
                lp.push(cur);
                cur = *next.get(&cur).ok_or_else(|| {
                    PolytopeError::DegenerateInput("facet boundary is not a loop".into())
                })?;
                if lp.len() > next.len() {
                    return Err(PolytopeError::DegenerateInput("facet boundary has several loops".into()));
                }
            }
            if lp.len() != next.len() {
                return Err(PolytopeError::DegenerateInput("facet boundary has several loops".into()));
            }
            loops.push(lp);
        }

        // Drop straight-angle vertices: they are not extreme points.
        let mut changed = true;
        while changed {
            changed = false;
            let mut removable: Vec<usize> = Vec::new();
            for lp in &loops {
                for i in 0..lp.len() {
                    let a = points[lp[(i + lp.len() - 1) % lp.len()]];
                    let b = points[lp[i]];
                    let c = points[lp[(i + 1) % lp.len()]];
                    let ac = c - a;
                    let len = ac.norm();
                    if len > 0.0 && (b - a).cross(&ac).norm() / len <= eps {
                        removable.push(lp[i]);
                    }
                }
            }
            if removable.is_empty() {
                break;
            }
            removable.sort_unstable();
            removable.dedup();
            // A vertex is dropped only if it is straight in every loop it
            // belongs to (mid-edge points appear in exactly two loops).
            for v in removable {
                let straight_everywhere = loops.iter().all(|lp| {
                    match lp.iter().position(|&x| x == v) {
                        None => true,
                        Some(i) => {
                            let a = points[lp[(i + lp.len() - 1) % lp.len()]];
                            let c = points[lp[(i + 1) % lp.len()]];
                            let ac = c - a;
                            let len = ac.norm();
                            len > 0.0 && (points[v] - a).cross(&ac).norm() / len <= eps
                        }
                    }
                });
                if straight_everywhere {
                    for lp in loops.iter_mut() {
                        if lp.len() > 3 {
                            lp.retain(|&x| x != v);
                        }
                    }
                    changed = true;
                }
            }
        }

        let mut used: Vec<usize> = loops.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        let remap: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let vertices: Vec<Vec3> = used.iter().map(|&v| points[v]).collect();

        let mut facets = Vec::with_capacity(loops.len());
        for lp in &loops {
            let n = newell(points, lp);
            let len = n.norm();
            if len == 0.0 {
                return Err(PolytopeError::DegenerateInput("zero-area facet".into()));
            }
            let normal = n / len;
            let offset = lp.iter().map(|&v| normal.dot(&points[v])).sum::<f64>() / lp.len() as f64;
            facets.push(Facet {
                normal,
                offset,
                vertices: lp.iter().map(|v| remap[v]).collect(),
            });
        }
        let scale = bbox_diagonal(&vertices);
        let mut poly = Polytope {
            vertices,
            facets,
            edges: Vec::new(),
            scale,
        };
        poly.edges = poly.build_edges()?;
        Ok(poly)
    }

    fn build_edges(&self) -> Result<Vec<Edge>, PolytopeError> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in self.facets.iter().enumerate() {
            let n = f.vertices.len();
            for i in 0..n {
                directed.insert((f.vertices[i], f.vertices[(i + 1) % n]), fi);
            }
        }
        let mut edges = Vec::new();
        for (fi, f) in self.facets.iter().enumerate() {
            let n = f.vertices.len();
            for i in 0..n {
                let (a, b) = (f.vertices[i], f.vertices[(i + 1) % n]);
                if a < b {
                    let right = *directed.get(&(b, a)).ok_or_else(|| {
                        PolytopeError::DegenerateInput("unmatched facet edge".into())
                    })?;
                    edges.push(Edge { a, b, left: fi, right });
                }
            }
        }
        Ok(edges)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Bounding-box diagonal, used to scale absolute tolerances.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn facet_area(&self, i: usize) -> f64 {
        let f = &self.facets[i];
        0.5 * f.normal.dot(&newell(&self.vertices, &f.vertices))
    }

    pub fn facet_centroid(&self, i: usize) -> Vec3 {
        let f = &self.facets[i];
        let p0 = self.vertices[f.vertices[0]];
        let mut acc = Vec3::zeros();
        let mut total = 0.0;
        for k in 1..f.vertices.len() - 1 {
            let a = self.vertices[f.vertices[k]];
            let b = self.vertices[f.vertices[k + 1]];
            let w = 0.5 * f.normal.dot(&(a - p0).cross(&(b - p0)));
            acc += (p0 + a + b) * (w / 3.0);
            total += w;
        }
        acc / total
    }

    pub fn area(&self) -> f64 {
        (0..self.facets.len()).map(|i| self.facet_area(i)).sum()
    }

    pub fn volume(&self) -> f64 {
        let c = self.vertex_mean();
        (0..self.facets.len())
            .map(|i| self.facet_area(i) * (self.facets[i].offset - self.facets[i].normal.dot(&c)) / 3.0)
            .sum()
    }

    pub fn vertex_mean(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    /// A point strictly inside the body.
    pub fn interior_point(&self) -> Vec3 {
        self.vertex_mean()
    }

    /// Signed distances `⟨n, p⟩ - c` of `p` to every facet plane.
    pub fn plane_distances(&self, p: &Vec3) -> impl Iterator<Item = f64> + '_ {
        let p = *p;
        self.facets.iter().map(move |f| f.normal.dot(&p) - f.offset)
    }

    pub fn max_plane_distance(&self, p: &Vec3) -> f64 {
        self.plane_distances(p).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Membership with absolute tolerance `tol`.
    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        self.max_plane_distance(p) <= tol
    }

    /// Facets incident to vertex `v`.
    pub fn vertex_facets(&self, v: usize) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&fi| self.facets[fi].vertices.contains(&v))
            .collect()
    }

    /// Vertices adjacent to `v` along edges.
    pub fn vertex_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.a == v {
                    Some(e.b)
                } else if e.b == v {
                    Some(e.a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Angle between the outward normals of the two facets at an edge.
    pub fn edge_normal_angle(&self, e: &Edge) -> f64 {
        crate::geom::unit_angle(&self.facets[e.left].normal, &self.facets[e.right].normal)
    }

    pub fn halfspaces(&self) -> Vec<crate::Halfspace> {
        self.facets
            .iter()
            .map(|f| crate::Halfspace::new(f.normal, f.offset))
            .collect()
    }

    /// Image under `x ↦ center + ratio·(x − center)`.
    pub fn dilate(&self, center: &Vec3, ratio: f64) -> Result<Polytope, PolytopeError> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(PolytopeError::InvalidArgument(format!(
                "dilation ratio must be positive, got {ratio}"
            )));
        }
        let vertices: Vec<Vec3> = self
            .vertices
            .iter()
            .map(|x| center + (x - center) * ratio)
            .collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet {
                normal: f.normal,
                offset: f.normal.dot(center) + ratio * (f.offset - f.normal.dot(center)),
                vertices: f.vertices.clone(),
            })
            .collect();
        Ok(Polytope {
            vertices,
            facets,
            edges: self.edges.clone(),
            scale: self.scale * ratio,
        })
    }

    /// Largest distance of a facet loop vertex from its plane.
    pub fn planarity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for f in &self.facets {
            for &v in &f.vertices {
                worst = worst.max((f.normal.dot(&self.vertices[v]) - f.offset).abs());
            }
        }
        worst
    }

    /// Triangle fan of every facet, for export and sampling.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for f in &self.facets {
            for k in 1..f.vertices.len() - 1 {
                out.push([f.vertices[0], f.vertices[k], f.vertices[k + 1]]);
            }
        }
        out
    }
}

/// Image of `c` under `x ↦ center + ratio·(x − center)`.
pub fn dilate(c: &Polytope, center: &Vec3, ratio: f64) -> Result<Polytope, PolytopeError> {
    c.dilate(center, ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use crate::geom::v3;

    #[test]
    fn cube_merges_to_six_facets() {
        let c = shapes::unit_cube();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
        assert_eq!(c.edges().len(), 12);
        assert!((c.area() - 6.0).abs() < 1e-14);
        assert!((c.volume() - 1.0).abs() < 1e-14);
        for f in c.facets() {
            assert_eq!(f.vertices.len(), 4);
            assert!((f.normal.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_and_mid_edge_points_are_absorbed() {
        let mut pts = shapes::unit_cube().vertices().to_vec();
        pts.push(v3(0.5, 0.5, 0.5));
        pts.push(v3(0.5, 0.0, 0.0));
        pts.push(v3(0.5, 0.5, 1.0));
        let c = hull3d(&pts).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
    }

    #[test]
    fn dilation_scales_areas() {
        let c = shapes::unit_cube();
        let d = c.dilate(&Vec3::zeros(), 2.0).unwrap();
        for i in 0..6 {
            assert!((d.facet_area(i) - 4.0).abs() < 1e-13);
        }
        assert!(d.contains(&v3(2.0, 2.0, 2.0), 1e-12));
        assert!(c.dilate(&Vec3::zeros(), 0.0).is_err());
        assert_eq!(c.dilate(&v3(0.3, 0.1, 0.2), 1.0).unwrap().vertices(), c.vertices());
    }
}
