use std::fmt::Write as _;

use convex_core::fmt::g17;
use convex_core::geom::unit_angle;
use convex_core::{Polytope, Tolerances, Vec3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::PressureLaw;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("measure CSV line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub normal: Vec3,
    pub weight: f64,
}

/// Which side of a facet set the normals point to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Outward,
    Inward,
}

/// Finite signed atomic measure on `S²`. Atoms whose normals are closer than
/// the merge angle share one entry.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSurfaceMeasure {
    atoms: Vec<Atom>,
    merge_angle: f64,
}

impl DiscreteSurfaceMeasure {
    pub fn empty() -> Self {
        Self::with_merge_angle(Tolerances::default().normal_angle)
    }

    pub fn with_merge_angle(merge_angle: f64) -> Self {
        Self {
            atoms: Vec::new(),
            merge_angle,
        }
    }

    /// Builds a measure from `(normal, weight)` pairs; normals are normalized.
    pub fn from_pairs<I: IntoIterator<Item = (Vec3, f64)>>(pairs: I) -> Self {
        let mut m = Self::empty();
        for (n, w) in pairs {
            m.add(n, w);
        }
        m
    }

    pub fn add(&mut self, normal: Vec3, weight: f64) {
        let n = normal.normalize();
        if let Some(a) = self
            .atoms
            .iter_mut()
            .find(|a| unit_angle(&a.normal, &n) <= self.merge_angle)
        {
            a.weight += weight;
        } else {
            self.atoms.push(Atom { normal: n, weight });
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).sum()
    }

    /// Weight of the atom at `n`, or 0.
    pub fn weight_at(&self, n: &Vec3) -> f64 {
        let n = n.normalize();
        self.atoms
            .iter()
            .filter(|a| unit_angle(&a.normal, &n) <= self.merge_angle)
            .map(|a| a.weight)
            .sum()
    }

    /// `|Σ wᵢ nᵢ|`; zero for the boundary of a closed convex body.
    pub fn closure_defect(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.normal * a.weight)
            .sum::<Vec3>()
            .norm()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.weight *= c;
        }
        out
    }

    /// Largest atom-wise weight difference.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let diff = measure_linear_combine(&[1.0, -1.0], &[self, other]);
        diff.atoms.iter().map(|a| a.weight.abs()).fold(0.0, f64::max)
    }

    /// Rows `nx,ny,nz,weight` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("nx,ny,nz,weight\n");
        for a in &self.atoms {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                g17(a.normal.x),
                g17(a.normal.y),
                g17(a.normal.z),
                g17(a.weight)
            );
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, MeasureError> {
        let mut m = Self::empty();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("nx")) {
                continue;
            }
            let vals: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| MeasureError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            if vals.len() != 4 {
                return Err(MeasureError::Parse {
                    line: i + 1,
                    msg: format!("expected 4 fields, got {}", vals.len()),
                });
            }
            m.add(Vec3::new(vals[0], vals[1], vals[2]), vals[3]);
        }
        Ok(m)
    }
}

/// Surface-area measure of a set of facets of `c`.
pub fn measure_of(c: &Polytope, facets: &[usize], orientation: Orientation) -> DiscreteSurfaceMeasure {
    measure_of_with(c, facets, orientation, &Tolerances::default())
}

pub fn measure_of_with(
    c: &Polytope,
    facets: &[usize],
    orientation: Orientation,
    tol: &Tolerances,
) -> DiscreteSurfaceMeasure {
    let sign = match orientation {
        Orientation::Outward => 1.0,
        Orientation::Inward => -1.0,
    };
    let mut m = DiscreteSurfaceMeasure::with_merge_angle(tol.normal_angle);
    for &i in facets {
        m.add(c.facets()[i].normal * sign, c.facet_area(i));
    }
    m
}

/// `Σ f(nᵢ) wᵢ`.
pub fn eval_functional(law: &dyn PressureLaw, nu: &DiscreteSurfaceMeasure) -> f64 {
    nu.atoms.iter().map(|a| law.f(&a.normal) * a.weight).sum()
}

/// `Σ cₖ νₖ`, merging atoms across measures.
pub fn measure_linear_combine(
    coeffs: &[f64],
    measures: &[&DiscreteSurfaceMeasure],
) -> DiscreteSurfaceMeasure {
    assert_eq!(coeffs.len(), measures.len(), "one coefficient per measure");
    let angle = measures
        .iter()
        .map(|m| m.merge_angle)
        .fold(0.0, f64::max);
    let mut out = DiscreteSurfaceMeasure::with_merge_angle(angle);
    for (c, m) in coeffs.iter().zip(measures) {
        for a in &m.atoms {
            out.add(a.normal, c * a.weight);
        }
    }
    out
}
