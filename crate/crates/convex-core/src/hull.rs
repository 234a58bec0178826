//! Quickhull in three dimensions.
//!
//! Produces outward-oriented triangles; coplanar merging and facet loops are
//! handled by [`Polytope`](super::Polytope).

use std::collections::HashMap;

use super::PolytopeError;
use crate::geom::Vec3;

#[derive(Debug)]
struct Face {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(points: &[Vec3], v: [usize; 3]) -> Self {
        let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        let normal = if len > 0.0 { n / len } else { n };
        Self {
            v,
            normal,
            offset: normal.dot(&a),
            outside: Vec::new(),
            alive: true,
        }
    }

    fn dist(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

fn initial_simplex(points: &[Vec3], eps: f64) -> Result<[usize; 4], PolytopeError> {
    let mut extremes = [0usize; 6];
    for (i, p) in points.iter().enumerate() {
        for axis in 0..3 {
            if p[axis] < points[extremes[2 * axis]][axis] {
                extremes[2 * axis] = i;
            }
            if p[axis] > points[extremes[2 * axis + 1]][axis] {
                extremes[2 * axis + 1] = i;
            }
        }
    }
    let mut best = (0, 0, -1.0);
    for &i in &extremes {
        for &j in &extremes {
            let d = (points[i] - points[j]).norm();
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let (i0, i1, d01) = best;
    if d01 <= eps {
        return Err(PolytopeError::DegenerateInput("coincident points".into()));
    }
    let dir = (points[i1] - points[i0]) / d01;
    let mut i2 = usize::MAX;
    let mut d2 = -1.0;
    for (i, p) in points.iter().enumerate() {
        let d = (p - points[i0]).cross(&dir).norm();
        if d > d2 {
            d2 = d;
            i2 = i;
        }
    }
    if d2 <= eps {
        return Err(PolytopeError::DegenerateInput("collinear points".into()));
    }
    let n = (points[i1] - points[i0]).cross(&(points[i2] - points[i0])).normalize();
    let mut i3 = usize::MAX;
    let mut d3 = -1.0;
    for (i, p) in points.iter().enumerate() {
        let d = n.dot(&(p - points[i0])).abs();
        if d > d3 {
            d3 = d;
            i3 = i;
        }
    }
    if d3 <= eps {
        return Err(PolytopeError::DegenerateInput(
            "all points within tolerance of a common plane".into(),
        ));
    }
    Ok([i0, i1, i2, i3])
}

/// Convex hull triangles of `points`, each oriented counter-clockwise when
/// seen from outside. Points within `eps` of the current hull are discarded.
pub(crate) fn quickhull(points: &[Vec3], eps: f64) -> Result<Vec<[usize; 3]>, PolytopeError> {
    if points.len() < 4 {
        return Err(PolytopeError::DegenerateInput(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(PolytopeError::DegenerateInput("non-finite coordinate".into()));
    }
    let inconsistent =
        || PolytopeError::DegenerateInput("inconsistent hull topology (near-coplanar input)".into());
    let simplex = initial_simplex(points, eps)?;
    let centroid = simplex.iter().map(|&i| points[i]).sum::<Vec3>() / 4.0;

    let mut faces: Vec<Face> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for skip in 0..4 {
        let mut tri = [0usize; 3];
        let mut k = 0;
        for (j, &idx) in simplex.iter().enumerate() {
            if j != skip {
                tri[k] = idx;
                k += 1;
            }
        }
        let mut face = Face::new(points, tri);
        if face.dist(&centroid) > 0.0 {
            tri.swap(1, 2);
            face = Face::new(points, tri);
        }
        let fi = faces.len();
        for e in 0..3 {
            edges.insert((tri[e], tri[(e + 1) % 3]), fi);
        }
        faces.push(face);
    }

    for (i, p) in points.iter().enumerate() {
        if simplex.contains(&i) {
            continue;
        }
        if let Some(f) = faces.iter_mut().find(|f| f.dist(p) > eps) {
            f.outside.push(i);
        }
    }

    let mut work: Vec<usize> = (0..faces.len())
        .filter(|&i| !faces[i].outside.is_empty())
        .collect();
    work.reverse();
    while let Some(start) = work.pop() {
        if !faces[start].alive || faces[start].outside.is_empty() {
            continue;
        }
        let eye = {
            let f = &faces[start];
            *f.outside
                .iter()
                .max_by(|&&a, &&b| f.dist(&points[a]).total_cmp(&f.dist(&points[b])))
                .expect("non-empty outside set")
        };
        let eye_p = points[eye];

        // Visible region: connected set of faces seeing the eye point.
        let mut visible = vec![start];
        let mut is_visible: HashMap<usize, bool> = HashMap::new();
        is_visible.insert(start, true);
        let mut stack = vec![start];
        while let Some(fi) = stack.pop() {
            let v = faces[fi].v;
            for e in 0..3 {
                let twin = *edges.get(&(v[(e + 1) % 3], v[e])).ok_or_else(inconsistent)?;
                if is_visible.contains_key(&twin) {
                    continue;
                }
                let vis = faces[twin].dist(&eye_p) > eps;
                is_visible.insert(twin, vis);
                if vis {
                    visible.push(twin);
                    stack.push(twin);
                }
            }
        }

        let mut horizon = Vec::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                let twin = *edges.get(&(b, a)).ok_or_else(inconsistent)?;
                if !is_visible.get(&twin).copied().ok_or_else(inconsistent)? {
                    horizon.push((a, b));
                }
            }
        }

        let mut orphans = Vec::new();
        for &fi in &visible {
            faces[fi].alive = false;
            orphans.append(&mut faces[fi].outside);
            let v = faces[fi].v;
            for e in 0..3 {
                edges.remove(&(v[e], v[(e + 1) % 3]));
            }
        }

        let first_new = faces.len();
        for &(a, b) in &horizon {
            let tri = [a, b, eye];
            let fi = faces.len();
            for e in 0..3 {
                if edges.insert((tri[e], tri[(e + 1) % 3]), fi).is_some() {
                    return Err(inconsistent());
                }
            }
            faces.push(Face::new(points, tri));
        }
        for p in orphans {
            if p == eye {
                continue;
            }
            let pt = points[p];
            let mut best: Option<(usize, f64)> = None;
            for (fi, f) in faces.iter().enumerate().skip(first_new) {
                let d = f.dist(&pt);
                if d > eps && best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((fi, d));
                }
            }
            if let Some((fi, _)) = best {
                faces[fi].outside.push(p);
            }
        }
        for fi in (first_new..faces.len()).rev() {
            if !faces[fi].outside.is_empty() {
                work.push(fi);
            }
        }
    }

    Ok(faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}

/// Raw hull triangles of `points` (indices into `points`, outward CCW),
/// without facet merging. Points within `eps` of a face count as inside.
pub fn hull_triangles(points: &[Vec3], eps: f64) -> Result<Vec<[usize; 3]>, PolytopeError> {
    quickhull(points, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v3;

    #[test]
    fn tetrahedron_has_four_outward_faces() {
        let pts = vec![
            v3(0.0, 0.0, 0.0),
            v3(1.0, 0.0, 0.0),
            v3(0.0, 1.0, 0.0),
            v3(0.0, 0.0, 1.0),
        ];
        let tris = quickhull(&pts, 1e-12).unwrap();
        assert_eq!(tris.len(), 4);
        let c = v3(0.25, 0.25, 0.25);
        for t in tris {
            let f = Face::new(&pts, t);
            assert!(f.dist(&c) < 0.0);
        }
    }

    #[test]
    fn planar_input_is_rejected() {
        let pts = vec![
            v3(0.0, 0.0, 0.0),
            v3(1.0, 0.0, 0.0),
            v3(0.0, 1.0, 0.0),
            v3(1.0, 1.0, 0.0),
        ];
        assert!(matches!(
            quickhull(&pts, 1e-9),
            Err(PolytopeError::DegenerateInput(_))
        ));
    }
}
