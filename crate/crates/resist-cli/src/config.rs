//! Run configuration: JSON file, command-line overrides, and the small
//! grammars for domains, parameter grids and points.

use std::path::{Path, PathBuf};

use convex_core::Tolerances;
use newton_solver::{Bump, Omega, Solve2dOptions};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SEED_ENV: &str = "RESIST_SEED";

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    /// CSV table of a custom law, registered under `law`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law_table: Option<PathBuf>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// `disc:R:n` or `poly:x1,y1;x2,y2;…`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rings: Option<usize>,
    /// `a:step:b`, inclusive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub body: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apex: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    /// Forbidden-band half width for the slope check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Finite-difference step for the stretch derivative.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<bool>,
    /// Heightfield to probe, as the path of its `.off` file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bump: Option<Bump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<Solve2dOptions>,
}

macro_rules! take_over {
    ($dst:expr, $src:expr, $($f:ident),+) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )+
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(&mut self, over: &RunConfig) {
        take_over!(
            self, over, command, law, law_table, m, l, n, omega, rings, s, seed, out, body, apex, suite,
            delta, h, frames, verify, field, x0, taus, radius, bump, tolerances, solver
        );
    }

    /// Seed from the configuration, else `RESIST_SEED`, else 0.
    pub fn resolve_seed(&mut self) -> Result<u64, CliError> {
        if self.seed.is_none() {
            if let Ok(v) = std::env::var(SEED_ENV) {
                let s = v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?;
                self.seed = Some(s);
            }
        }
        Ok(*self.seed.get_or_insert(0))
    }

    pub fn tol(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    pub fn law_name(&self) -> &str {
        self.law.as_deref().unwrap_or("classical")
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("resist-out"))
    }
}

pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{what}: {s:?} is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("{what}: {s:?} is not finite")));
    }
    Ok(v)
}

/// `disc:R:n` (regular n-gon of circumradius R) or `poly:x1,y1;x2,y2;…`
/// (counter-clockwise convex polygon).
pub fn parse_omega(spec: &str) -> Result<Omega, CliError> {
    let bad = |msg: &str| CliError::Config(format!("omega {spec:?}: {msg}"));
    let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("expected disc:R:n or poly:x,y;…"))?;
    match kind {
        "disc" => {
            let (r, n) = rest.split_once(':').ok_or_else(|| bad("expected disc:R:n"))?;
            let r = positive("disc radius", number(r, "disc radius")?)?;
            let n: usize = n.trim().parse().map_err(|_| bad("side count must be an integer"))?;
            Omega::disc(r, n).map_err(|e| bad(&e.to_string()))
        }
        "poly" => {
            let pts = rest
                .split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    let (x, y) = p.split_once(',').ok_or_else(|| bad("points are x,y"))?;
                    Ok([number(x, "x")?, number(y, "y")?])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Omega::polygon(pts).map_err(|e| bad(&e.to_string()))
        }
        _ => Err(bad("unknown kind")),
    }
}

/// `a:step:b` inclusive of both ends, or a single value.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![number(v, "grid")?]),
        [a, step, b] => {
            let (a, step, b) = (number(a, "grid")?, number(step, "grid step")?, number(b, "grid")?);
            if step <= 0.0 || b < a {
                return Err(CliError::Config(format!("grid {spec:?}: need step > 0 and a <= b")));
            }
            let n = ((b - a) / step).round();
            if (a + n * step - b).abs() > 1e-9 * (1.0 + b.abs()) {
                return Err(CliError::Config(format!("grid {spec:?}: step does not divide b - a")));
            }
            let n = n as usize;
            Ok((0..=n).map(|i| if i == n { b } else { a + i as f64 * step }).collect())
        }
        _ => Err(CliError::Config(format!("grid {spec:?}: expected a:step:b"))),
    }
}

/// Comma-separated coordinates, exactly `N` of them.
pub fn parse_point<const N: usize>(spec: &str) -> Result<[f64; N], CliError> {
    let v = spec
        .split(',')
        .map(|s| number(s, "point"))
        .collect::<Result<Vec<_>, _>>()?;
    v.try_into()
        .map_err(|_| CliError::Config(format!("point {spec:?}: expected {N} coordinates")))
}

pub fn parse_list(spec: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',').map(|s| number(s, "list")).collect()
}
