//! Pressure laws and the name-keyed registry that selects them at runtime.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use convex_core::Vec3;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LawError {
    #[error("unknown pressure law {0:?} (known: {1})")]
    Unknown(String, String),
    #[error("pressure table line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("pressure table: {0}")]
    Table(String),
}

/// Pressure `p(n)` on `S²`, the surface integrand `f(n) = p(n)·n₃` and the
/// heightfield integrand `g(X, Y) = p((−X, −Y, 1)/√(1 + X² + Y²))`.
pub trait PressureLaw: Send + Sync {
    fn name(&self) -> &str;

    fn p(&self, n: &Vec3) -> f64;

    fn f(&self, n: &Vec3) -> f64 {
        self.p(n) * n.z
    }

    fn g(&self, x: f64, y: f64) -> f64 {
        let s = (1.0 + x * x + y * y).sqrt();
        self.p(&Vec3::new(-x / s, -y / s, 1.0 / s))
    }
}

/// `p = (n₃)₊²`, `f = (n₃)₊³`, `g = 1/(1 + X² + Y²)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClassicalLaw;

impl PressureLaw for ClassicalLaw {
    fn name(&self) -> &str {
        "classical"
    }

    fn p(&self, n: &Vec3) -> f64 {
        n.z.max(0.0).powi(2)
    }

    fn f(&self, n: &Vec3) -> f64 {
        n.z.max(0.0).powi(3)
    }

    fn g(&self, x: f64, y: f64) -> f64 {
        1.0 / (1.0 + x * x + y * y)
    }
}

/// `f ≡ 1`: the functional is surface area. `p = 1/n₃` on the upper
/// hemisphere, where the heightfield form applies.
#[derive(Clone, Copy, Debug, Default)]
pub struct AreaLaw;

impl PressureLaw for AreaLaw {
    fn name(&self) -> &str {
        "area"
    }

    fn p(&self, n: &Vec3) -> f64 {
        1.0 / n.z
    }

    fn f(&self, _n: &Vec3) -> f64 {
        1.0
    }

    fn g(&self, x: f64, y: f64) -> f64 {
        (1.0 + x * x + y * y).sqrt()
    }
}

/// Pressure on the rear side only: `f = (−n₃)₊³`, zero on the upper hemisphere.
#[derive(Clone, Copy, Debug, Default)]
pub struct RearLaw;

impl PressureLaw for RearLaw {
    fn name(&self) -> &str {
        "rear"
    }

    fn p(&self, n: &Vec3) -> f64 {
        -(-n.z).max(0.0).powi(2)
    }

    fn f(&self, n: &Vec3) -> f64 {
        (-n.z).max(0.0).powi(3)
    }
}

/// Pressure sampled on a `(θ, φ)` grid (polar angle from `+z`, azimuth),
/// bilinearly interpolated. Azimuth wraps around `2π`.
#[derive(Clone, Debug)]
pub struct TabulatedLaw {
    name: String,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    values: Vec<f64>,
}

fn bracket(grid: &[f64], x: f64) -> (usize, f64) {
    if grid.len() == 1 || x <= grid[0] {
        return (0, 0.0);
    }
    let last = grid.len() - 1;
    if x >= grid[last] {
        return (last - 1, 1.0);
    }
    let i = grid.partition_point(|&g| g <= x) - 1;
    (i, (x - grid[i]) / (grid[i + 1] - grid[i]))
}

impl TabulatedLaw {
    /// Parses rows `theta,phi,p` (radians) covering a full tensor grid. A
    /// header row is allowed.
    pub fn from_csv(name: &str, text: &str) -> Result<Self, LawError> {
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split(',').map(str::trim).collect();
            if rows.is_empty() && toks.first().map_or(false, |t| t.parse::<f64>().is_err()) {
                continue;
            }
            if toks.len() != 3 {
                return Err(LawError::Parse {
                    line: i + 1,
                    msg: format!("expected theta,phi,p; got {} fields", toks.len()),
                });
            }
            let mut v = [0.0; 3];
            for (k, t) in toks.iter().enumerate() {
                v[k] = t.parse().map_err(|e| LawError::Parse {
                    line: i + 1,
                    msg: format!("{t:?}: {e}"),
                })?;
            }
            rows.push((v[0], v[1], v[2]));
        }
        let mut thetas: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut phis: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for g in [&mut thetas, &mut phis] {
            g.sort_by(f64::total_cmp);
            g.dedup();
        }
        if thetas.len() < 2 || phis.is_empty() {
            return Err(LawError::Table("need at least two polar angles".into()));
        }
        if thetas[0] < 0.0 || thetas[thetas.len() - 1] > PI + 1e-12 {
            return Err(LawError::Table("polar angles must lie in [0, π]".into()));
        }
        if phis[0] < 0.0 || phis[phis.len() - 1] >= 2.0 * PI {
            return Err(LawError::Table("azimuths must lie in [0, 2π)".into()));
        }
        let mut values = vec![f64::NAN; thetas.len() * phis.len()];
        for (t, p, v) in &rows {
            let i = thetas.partition_point(|x| x < t);
            let j = phis.partition_point(|x| x < p);
            values[i * phis.len() + j] = *v;
        }
        if values.iter().any(|v| v.is_nan()) || rows.len() != values.len() {
            return Err(LawError::Table(format!(
                "expected a full {}×{} grid without duplicates",
                thetas.len(),
                phis.len()
            )));
        }
        Ok(Self {
            name: name.to_string(),
            thetas,
            phis,
            values,
        })
    }

    /// Tabulates any law on a regular grid; used to build test tables.
    pub fn sample(name: &str, law: &dyn PressureLaw, n_theta: usize, n_phi: usize) -> Self {
        let thetas: Vec<f64> = (0..n_theta).map(|i| PI * i as f64 / (n_theta - 1) as f64).collect();
        let phis: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
        let mut values = Vec::with_capacity(n_theta * n_phi);
        for &t in &thetas {
            for &p in &phis {
                values.push(law.p(&Vec3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos())));
            }
        }
        Self {
            name: name.to_string(),
            thetas,
            phis,
            values,
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.phis.len() + j % self.phis.len()]
    }
}

impl PressureLaw for TabulatedLaw {
    fn name(&self) -> &str {
        &self.name
    }

    fn p(&self, n: &Vec3) -> f64 {
        let theta = n.z.clamp(-1.0, 1.0).acos();
        let mut phi = n.y.atan2(n.x);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        let (i, s) = bracket(&self.thetas, theta);
        let np = self.phis.len();
        let (j, t, j1) = if np == 1 {
            (0, 0.0, 0)
        } else if phi >= self.phis[np - 1] || phi < self.phis[0] {
            // wrap interval from the last azimuth to the first one plus 2π
            let lo = self.phis[np - 1];
            let hi = self.phis[0] + 2.0 * PI;
            let x = if phi < self.phis[0] { phi + 2.0 * PI } else { phi };
            (np - 1, (x - lo) / (hi - lo), 0)
        } else {
            let (j, t) = bracket(&self.phis, phi);
            (j, t, j + 1)
        };
        let i1 = (i + 1).min(self.thetas.len() - 1);
        (1.0 - s) * ((1.0 - t) * self.at(i, j) + t * self.at(i, j1))
            + s * ((1.0 - t) * self.at(i1, j) + t * self.at(i1, j1))
    }
}

/// Pressure laws selectable by name.
pub struct LawRegistry {
    laws: BTreeMap<String, Arc<dyn PressureLaw>>,
}

impl Default for LawRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl LawRegistry {
    pub fn empty() -> Self {
        Self {
            laws: BTreeMap::new(),
        }
    }

    /// `classical`, `area` and `rear`.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(ClassicalLaw));
        r.register(Arc::new(AreaLaw));
        r.register(Arc::new(RearLaw));
        r
    }

    /// Adds or replaces a law under its own name.
    pub fn register(&mut self, law: Arc<dyn PressureLaw>) {
        self.laws.insert(law.name().to_string(), law);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn PressureLaw>, LawError> {
        self.laws
            .get(name)
            .cloned()
            .ok_or_else(|| LawError::Unknown(name.to_string(), self.names().join(", ")))
    }

    pub fn names(&self) -> Vec<String> {
        self.laws.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn PressureLaw>> {
        self.laws.values()
    }
}
