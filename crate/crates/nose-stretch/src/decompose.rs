use std::collections::HashMap;

use convex_core::{Halfspace, Polytope, Tolerances, Vec3};
use serde::Serialize;
use surface_measure::{
    measure_linear_combine, measure_of_with, DiscreteSurfaceMeasure, Orientation,
};

use crate::NoseError;

/// Boundary of `C` split with respect to an apex `O ∉ C`.
///
/// A facet is near when `O` lies strictly on its outer side; facets whose
/// plane contains `O` count as far. The cone surface `V` is made of the
/// triangles `(O, a, b)` over the silhouette edges, oriented outward.
#[derive(Clone, Debug, Serialize)]
pub struct NoseDecomposition {
    pub body: Polytope,
    pub apex: Vec3,
    pub near: Vec<usize>,
    pub far: Vec<usize>,
    /// Silhouette as a closed loop of vertex indices, each step `a → b`
    /// traversing the near side counter-clockwise.
    pub silhouette: Vec<usize>,
    /// Cone triangles `[a, b, O]`, outward.
    pub cone: Vec<[Vec3; 3]>,
    #[serde(skip)]
    tol: Tolerances,
}

pub fn decompose(c: &Polytope, apex: &Vec3) -> Result<NoseDecomposition, NoseError> {
    decompose_with(c, apex, &Tolerances::default())
}

pub fn decompose_with(
    c: &Polytope,
    apex: &Vec3,
    tol: &Tolerances,
) -> Result<NoseDecomposition, NoseError> {
    let eps = tol.strict * c.scale();
    let mut near = Vec::new();
    let mut far = Vec::new();
    for (i, d) in c.plane_distances(apex).enumerate() {
        if d > eps {
            near.push(i);
        } else {
            far.push(i);
        }
    }
    if near.is_empty() {
        return Err(NoseError::ApexInside);
    }
    let is_near: Vec<bool> = {
        let mut v = vec![false; c.facets().len()];
        for &i in &near {
            v[i] = true;
        }
        v
    };

    // directed silhouette edges a → b as traversed by the near facet
    let mut next: HashMap<usize, usize> = HashMap::new();
    for e in c.edges() {
        let (l, r) = (is_near[e.left], is_near[e.right]);
        if l == r {
            continue;
        }
        let (a, b) = if l { (e.a, e.b) } else { (e.b, e.a) };
        if next.insert(a, b).is_some() {
            return Err(NoseError::BadSilhouette);
        }
    }
    let start = *next.keys().min().ok_or(NoseError::BadSilhouette)?;
    let mut silhouette = vec![start];
    let mut cur = next[&start];
    while cur != start {
        silhouette.push(cur);
        cur = *next.get(&cur).ok_or(NoseError::BadSilhouette)?;
        if silhouette.len() > next.len() {
            return Err(NoseError::BadSilhouette);
        }
    }
    if silhouette.len() != next.len() {
        return Err(NoseError::BadSilhouette);
    }

    let v = c.vertices();
    let cone = (0..silhouette.len())
        .map(|i| {
            let a = silhouette[i];
            let b = silhouette[(i + 1) % silhouette.len()];
            [v[a], v[b], *apex]
        })
        .collect();
    Ok(NoseDecomposition {
        body: c.clone(),
        apex: *apex,
        near,
        far,
        silhouette,
        cone,
        tol: *tol,
    })
}

fn tri_normal(t: &[Vec3; 3]) -> Vec3 {
    (t[1] - t[0]).cross(&(t[2] - t[0]))
}

impl NoseDecomposition {
    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn near_measure(&self) -> DiscreteSurfaceMeasure {
        measure_of_with(&self.body, &self.near, Orientation::Outward, &self.tol)
    }

    pub fn far_measure(&self) -> DiscreteSurfaceMeasure {
        measure_of_with(&self.body, &self.far, Orientation::Outward, &self.tol)
    }

    pub fn body_measure(&self) -> DiscreteSurfaceMeasure {
        let all: Vec<usize> = (0..self.body.facets().len()).collect();
        measure_of_with(&self.body, &all, Orientation::Outward, &self.tol)
    }

    pub fn cone_measure(&self) -> DiscreteSurfaceMeasure {
        let mut m = DiscreteSurfaceMeasure::with_merge_angle(self.tol.normal_angle);
        for t in &self.cone {
            let n = tri_normal(t);
            m.add(n, 0.5 * n.norm());
        }
        m
    }

    /// Stretch direction `ν₀ = ν_V − ν_near`.
    pub fn nu0(&self) -> DiscreteSurfaceMeasure {
        measure_linear_combine(&[1.0, -1.0], &[&self.cone_measure(), &self.near_measure()])
    }

    pub fn area_near(&self) -> f64 {
        self.near.iter().map(|&i| self.body.facet_area(i)).sum()
    }

    pub fn area_far(&self) -> f64 {
        self.far.iter().map(|&i| self.body.facet_area(i)).sum()
    }

    pub fn area_cone(&self) -> f64 {
        self.cone.iter().map(|t| 0.5 * tri_normal(t).norm()).sum()
    }

    /// Planes through `O` and each silhouette edge.
    pub fn cone_halfspaces(&self) -> Vec<Halfspace> {
        self.cone
            .iter()
            .map(|t| {
                let n = tri_normal(t);
                Halfspace::new(n, n.dot(&self.apex))
            })
            .collect()
    }

    /// Largest signed distance of a body vertex above a cone plane; `≤ 0` up
    /// to rounding when every cone plane supports the body.
    pub fn cone_support_defect(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for h in self.cone_halfspaces() {
            for v in self.body.vertices() {
                worst = worst.max(h.signed_distance(v));
            }
        }
        worst
    }

    /// Near facets, as closed polygons.
    pub fn near_polygons(&self) -> Vec<Vec<Vec3>> {
        self.near
            .iter()
            .map(|&i| {
                self.body.facets()[i]
                    .vertices
                    .iter()
                    .map(|&v| self.body.vertices()[v])
                    .collect()
            })
            .collect()
    }
}
