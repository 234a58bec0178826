use serde::{Deserialize, Serialize};

use crate::geom::{bbox_diagonal, Vec3};
use crate::hull::quickhull;
use crate::lp::{chebyshev_center, is_bounded};
use crate::tol::Tolerances;
use crate::{hull3d_with, Polytope, PolytopeError};

/// Closed halfspace `{x : ⟨normal, x⟩ ≤ offset}` with unit normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec3,
    pub offset: f64,
}

impl Halfspace {
    /// Normalizes `normal`; the offset is rescaled to describe the same set.
    pub fn new(normal: Vec3, offset: f64) -> Self {
        let len = normal.norm();
        Self {
            normal: normal / len,
            offset: offset / len,
        }
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

pub fn intersect_halfspaces(hs: &[Halfspace]) -> Result<Polytope, PolytopeError> {
    intersect_halfspaces_with(hs, &Tolerances::default())
}

/// Vertex representation of `⋂ hs`, via polar duality about the Chebyshev
/// center.
pub fn intersect_halfspaces_with(
    hs: &[Halfspace],
    tol: &Tolerances,
) -> Result<Polytope, PolytopeError> {
    if hs.len() < 4 {
        return Err(PolytopeError::Unbounded);
    }
    if hs
        .iter()
        .any(|h| !h.offset.is_finite() || !h.normal.iter().all(|x| x.is_finite()) || h.normal.norm() == 0.0)
    {
        return Err(PolytopeError::DegenerateInput("non-finite halfspace".into()));
    }
    let hs: Vec<Halfspace> = hs.iter().map(|h| Halfspace::new(h.normal, h.offset)).collect();
    let offset_scale = hs.iter().map(|h| h.offset.abs()).fold(1.0, f64::max);
    let cap = 1e6 * offset_scale;
    let (p, r) = chebyshev_center(&hs, cap).ok_or(PolytopeError::Empty)?;
    if r >= cap * (1.0 - 1e-9) || !is_bounded(&hs) {
        return Err(PolytopeError::Unbounded);
    }
    if r <= tol.strict * offset_scale {
        return Err(PolytopeError::Empty);
    }

    let dual: Vec<Vec3> = hs
        .iter()
        .map(|h| h.normal / (h.offset - h.normal.dot(&p)))
        .collect();
    let dual_eps = tol.plane * bbox_diagonal(&dual);
    let tris = quickhull(&dual, dual_eps).map_err(|_| PolytopeError::Unbounded)?;

    let mut verts: Vec<Vec3> = Vec::with_capacity(tris.len());
    for t in &tris {
        let (q0, q1, q2) = (dual[t[0]], dual[t[1]], dual[t[2]]);
        let a = (q1 - q0).cross(&(q2 - q0));
        let beta = a.dot(&q0);
        let fallback = p + a / beta;
        let m = nalgebra::Matrix3::from_rows(&[
            hs[t[0]].normal.transpose(),
            hs[t[1]].normal.transpose(),
            hs[t[2]].normal.transpose(),
        ]);
        let rhs = Vec3::new(hs[t[0]].offset, hs[t[1]].offset, hs[t[2]].offset);
        let v = match m.lu().solve(&rhs) {
            Some(v) if v.iter().all(|x| x.is_finite()) && (v - fallback).norm() <= 1e-6 * (1.0 + fallback.norm()) => v,
            _ => fallback,
        };
        verts.push(v);
    }
    let scale = bbox_diagonal(&verts);
    let eps = tol.plane * scale;
    let mut uniq: Vec<Vec3> = Vec::new();
    for v in verts {
        if !uniq.iter().any(|u| (u - v).norm() <= eps) {
            uniq.push(v);
        }
    }
    hull3d_with(&uniq, tol)
}
