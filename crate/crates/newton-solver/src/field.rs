//! Concave heightfields on a triangulated convex polygon and the P1
//! resistance functional `∬ g(∇u)`.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use convex_core::fmt::g17;
use convex_core::Tolerances;
use serde::{Deserialize, Serialize};
use surface_measure::PressureLaw;

use crate::concave::project_concave;
use crate::mesh::{Mesh, Omega, P2};
use crate::radial::RadialProfile;
use crate::SolverError;

#[derive(Clone, Debug)]
pub struct HeightField {
    pub omega: Omega,
    pub m: f64,
    pub mesh: Arc<Mesh>,
    pub values: Vec<f64>,
}

/// JSON sidecar written next to the OFF surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSidecar {
    pub omega: Vec<P2>,
    pub m: f64,
    pub topology_hash: String,
    pub seed: Option<u64>,
}

impl HeightField {
    pub fn new(
        omega: Omega,
        m: f64,
        mesh: Arc<Mesh>,
        values: Vec<f64>,
    ) -> Result<Self, SolverError> {
        let f = Self::new_unchecked(omega, m, mesh, values)?;
        f.validate(&Tolerances::default())?;
        Ok(f)
    }

    /// Shape checks only; no bound or concavity check.
    pub fn new_unchecked(
        omega: Omega,
        m: f64,
        mesh: Arc<Mesh>,
        values: Vec<f64>,
    ) -> Result<Self, SolverError> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(SolverError::InvalidField(format!("M = {m} must be positive")));
        }
        if values.len() != mesh.len() {
            return Err(SolverError::InvalidField(format!(
                "{} values for {} vertices",
                values.len(),
                mesh.len()
            )));
        }
        Ok(Self {
            omega,
            m,
            mesh,
            values,
        })
    }

    pub fn from_fn(
        omega: &Omega,
        m: f64,
        mesh: Arc<Mesh>,
        f: impl Fn(P2) -> f64,
    ) -> Result<Self, SolverError> {
        let values = mesh.points.iter().map(|p| f(*p)).collect();
        Self::new(omega.clone(), m, mesh, values)
    }

    /// `u(x) = φ(L·gauge(x))`: the profile laid along the gauge of `Ω`, so
    /// `∂Ω` maps to `r = L`. On a disc this is the rotational embedding.
    pub fn from_profile(
        omega: &Omega,
        mesh: Arc<Mesh>,
        profile: &RadialProfile,
    ) -> Result<Self, SolverError> {
        let values = mesh
            .level
            .iter()
            .map(|&t| profile.value_at(t * profile.l))
            .collect();
        Self::new(omega.clone(), profile.m, mesh, values)
    }

    pub fn concavity_scale(&self) -> f64 {
        self.m.max(self.omega.diameter())
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<(), SolverError> {
        let eps = tol.conc * self.concavity_scale();
        for (i, &v) in self.values.iter().enumerate() {
            if !v.is_finite() || v < -eps || v > self.m + eps {
                return Err(SolverError::InvalidField(format!(
                    "value {v} at vertex {i} outside [0, M]"
                )));
            }
        }
        let lcm = project_concave(&self.mesh.points, &self.values, self.m)?;
        let worst = lcm
            .iter()
            .zip(&self.values)
            .map(|(a, b)| a - b.clamp(0.0, self.m))
            .fold(0.0, f64::max);
        if worst > eps {
            return Err(SolverError::InvalidField(format!(
                "not concave: majorant exceeds values by {worst:.3e}"
            )));
        }
        Ok(())
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            omega: self.omega.clone(),
            m: self.m,
            mesh: Arc::clone(&self.mesh),
            values,
        }
    }

    pub fn gradients(&self) -> Vec<P2> {
        let ops = GradOps::new(&self.mesh);
        ops.gradients(&self.values)
    }

    /// Vertices within `top_rel·M` of `M`.
    pub fn top_set(&self, top_rel: f64) -> Vec<usize> {
        let cut = self.m * (1.0 - top_rel);
        (0..self.values.len())
            .filter(|&i| self.values[i] >= cut)
            .collect()
    }

    /// Graph surface as OFF text.
    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        let _ = writeln!(s, "{} {} 0", self.mesh.len(), self.mesh.triangles.len());
        for (p, v) in self.mesh.points.iter().zip(&self.values) {
            let _ = writeln!(s, "{} {} {}", g17(p[0]), g17(p[1]), g17(*v));
        }
        for t in &self.mesh.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn sidecar(&self, seed: Option<u64>) -> FieldSidecar {
        FieldSidecar {
            omega: self.omega.vertices().to_vec(),
            m: self.m,
            topology_hash: self.mesh.topology_hash(),
            seed,
        }
    }

    /// Writes `<stem>.off` and `<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str, seed: Option<u64>) -> Result<(), SolverError> {
        let io = |e: std::io::Error| SolverError::Io(e.to_string());
        std::fs::write(dir.join(format!("{stem}.off")), self.to_off()).map_err(io)?;
        let json = serde_json::to_string_pretty(&self.sidecar(seed))
            .map_err(|e| SolverError::Io(e.to_string()))?;
        std::fs::write(dir.join(format!("{stem}.json")), json + "\n").map_err(io)?;
        Ok(())
    }

    /// Reads a field written by [`HeightField::write`]. The mesh is rebuilt
    /// from the OFF file and checked against the sidecar hash.
    pub fn read(dir: &Path, stem: &str) -> Result<(Self, FieldSidecar), SolverError> {
        let io = |e: std::io::Error| SolverError::Io(e.to_string());
        let off = std::fs::read_to_string(dir.join(format!("{stem}.off"))).map_err(io)?;
        let json = std::fs::read_to_string(dir.join(format!("{stem}.json"))).map_err(io)?;
        let side: FieldSidecar =
            serde_json::from_str(&json).map_err(|e| SolverError::Io(e.to_string()))?;
        let omega = Omega::polygon(side.omega.clone())?;
        let (points, values, triangles) = parse_off(&off)?;
        let levels = points.iter().map(|p| omega.gauge(*p)).collect();
        let tol = 1e-9 * omega.diameter();
        let boundary = points
            .iter()
            .map(|p| omega.boundary_distance(*p) <= tol)
            .collect();
        let mesh = Mesh {
            points,
            triangles,
            boundary,
            level: levels,
            rings: 0,
        };
        if mesh.topology_hash() != side.topology_hash {
            return Err(SolverError::Io("topology hash mismatch".into()));
        }
        let f = HeightField::new(omega, side.m, Arc::new(mesh), values)?;
        Ok((f, side))
    }
}

fn parse_off(text: &str) -> Result<(Vec<P2>, Vec<f64>, Vec<[usize; 3]>), SolverError> {
    let bad = |m: &str| SolverError::Io(format!("OFF: {m}"));
    let mut toks = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_whitespace());
    if toks.next() != Some("OFF") {
        return Err(bad("missing header"));
    }
    let mut num = || -> Result<f64, SolverError> {
        toks.next()
            .ok_or_else(|| bad("truncated"))?
            .parse::<f64>()
            .map_err(|_| bad("bad number"))
    };
    let nv = num()? as usize;
    let nf = num()? as usize;
    let _ = num()?;
    let mut pts = Vec::with_capacity(nv);
    let mut vals = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (x, y, z) = (num()?, num()?, num()?);
        pts.push([x, y]);
        vals.push(z);
    }
    let mut tris = Vec::with_capacity(nf);
    for _ in 0..nf {
        if num()? as usize != 3 {
            return Err(bad("only triangles are supported"));
        }
        let t = [num()? as usize, num()? as usize, num()? as usize];
        if t.iter().any(|&i| i >= nv) {
            return Err(bad("face index out of range"));
        }
        tris.push(t);
    }
    Ok((pts, vals, tris))
}

/// Per-triangle P1 gradient operators and areas.
pub(crate) struct GradOps {
    pub tris: Vec<[usize; 3]>,
    /// Gradients of the three hat functions on each triangle.
    pub basis: Vec<[P2; 3]>,
    pub area: Vec<f64>,
    /// Lumped vertex masses.
    pub mass: Vec<f64>,
}

impl GradOps {
    pub fn new(mesh: &Mesh) -> Self {
        let mut basis = Vec::with_capacity(mesh.triangles.len());
        let mut area = Vec::with_capacity(mesh.triangles.len());
        let mut mass = vec![0.0; mesh.len()];
        for t in &mesh.triangles {
            let p: Vec<P2> = t.iter().map(|&i| mesh.points[i]).collect();
            let a2 = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
            let mut b = [[0.0; 2]; 3];
            for k in 0..3 {
                let (q1, q2) = (p[(k + 1) % 3], p[(k + 2) % 3]);
                b[k] = [(q1[1] - q2[1]) / a2, (q2[0] - q1[0]) / a2];
            }
            basis.push(b);
            area.push(0.5 * a2);
            for &i in t {
                mass[i] += a2 / 6.0;
            }
        }
        Self {
            tris: mesh.triangles.clone(),
            basis,
            area,
            mass,
        }
    }

    pub fn gradient_on(&self, t: usize, u: &[f64]) -> P2 {
        let b = &self.basis[t];
        let tri = self.tris[t];
        let mut g = [0.0; 2];
        for k in 0..3 {
            g[0] += b[k][0] * u[tri[k]];
            g[1] += b[k][1] * u[tri[k]];
        }
        g
    }

    pub fn gradients(&self, u: &[f64]) -> Vec<P2> {
        (0..self.tris.len()).map(|t| self.gradient_on(t, u)).collect()
    }

    pub fn objective(&self, law: &dyn PressureLaw, u: &[f64]) -> f64 {
        (0..self.tris.len())
            .map(|t| {
                let g = self.gradient_on(t, u);
                self.area[t] * law.g(g[0], g[1])
            })
            .sum()
    }

    /// `∂F/∂u_v` with `∇g` by central differences.
    pub fn objective_gradient(&self, law: &dyn PressureLaw, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for t in 0..self.tris.len() {
            let g = self.gradient_on(t, u);
            let dg = law_gradient(law, g);
            for k in 0..3 {
                let b = self.basis[t][k];
                out[self.tris[t][k]] += self.area[t] * (dg[0] * b[0] + dg[1] * b[1]);
            }
        }
        out
    }
}

pub(crate) fn law_gradient(law: &dyn PressureLaw, p: P2) -> P2 {
    let h = 1e-6 * (1.0 + p[0].abs().max(p[1].abs()));
    [
        (law.g(p[0] + h, p[1]) - law.g(p[0] - h, p[1])) / (2.0 * h),
        (law.g(p[0], p[1] + h) - law.g(p[0], p[1] - h)) / (2.0 * h),
    ]
}

/// `Σ_T g(∇u|_T)·area(T)`.
pub fn resistance_2d(law: &dyn PressureLaw, u: &HeightField) -> Result<f64, SolverError> {
    u.validate(&Tolerances::default())?;
    Ok(GradOps::new(&u.mesh).objective(law, &u.values))
}
