use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_list, parse_point, RunConfig};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "resist", version, about = "Minimal-resistance bodies: solvers, nose stretching, verification")]
pub struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed (falls back to RESIST_SEED, then 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Pressure law by name: classical, area, rear, or a tabulated law.
    #[arg(long, global = true)]
    pub law: Option<String>,
    /// CSV samples "theta,phi,value" of a custom law named by --law.
    #[arg(long, global = true)]
    pub law_table: Option<PathBuf>,
    /// Exit 1 if the command's built-in checks fail.
    #[arg(long, global = true)]
    pub verify: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radially symmetric optimum on the disc of radius L.
    SolveRadial(SolveRadialArgs),
    /// Concave minimizer on a convex polygon.
    #[command(name = "solve-2d")]
    Solve2d(Solve2dArgs),
    /// Nose-stretch family of a polytope.
    Stretch(StretchArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// Second-variation probe at an interior point of a heightfield.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct SolveRadialArgs {
    #[arg(long = "M")]
    pub m: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Rings of the disc mesh used for the embedded checks.
    #[arg(long)]
    pub rings: Option<usize>,
    /// Half width of the forbidden slope band.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Solve2dArgs {
    /// disc:R:n or poly:x1,y1;x2,y2;…
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long = "M")]
    pub m: Option<f64>,
    #[arg(long)]
    pub rings: Option<usize>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub refine: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub no_polish: bool,
    #[arg(long)]
    pub symmetrize: bool,
}

#[derive(Debug, Args)]
pub struct StretchArgs {
    /// Polytope as .off or .obj.
    #[arg(long)]
    pub body: Option<PathBuf>,
    /// x,y,z
    #[arg(long)]
    pub apex: Option<String>,
    /// a:step:b, inclusive.
    #[arg(long)]
    pub s: Option<String>,
    /// Also write every family member as frame_NNN.off.
    #[arg(long)]
    pub frames: bool,
    /// Finite-difference step for the derivative check.
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: Option<String>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Domain of the built-in cap field when --field is absent.
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long = "M")]
    pub m: Option<f64>,
    #[arg(long)]
    pub rings: Option<usize>,
    /// Heightfield .off written by solve-2d (its .json sidecar must sit next to it).
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// x,y
    #[arg(long)]
    pub x0: Option<String>,
    /// Comma-separated τ values.
    #[arg(long)]
    pub taus: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// exponential or polynomial.
    #[arg(long)]
    pub bump: Option<String>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SolveRadial(_) => "solve-radial",
            Command::Solve2d(_) => "solve-2d",
            Command::Stretch(_) => "stretch",
            Command::Verify(_) => "verify",
            Command::Probe(_) => "probe",
        }
    }
}

impl Cli {
    /// Flag values as a configuration layer.
    pub fn overrides(&self) -> Result<RunConfig, CliError> {
        let mut c = RunConfig {
            command: Some(self.command.name().into()),
            out: self.out.clone(),
            seed: self.seed,
            law: self.law.clone(),
            law_table: self.law_table.clone(),
            verify: self.verify.then_some(true),
            ..Default::default()
        };
        match &self.command {
            Command::SolveRadial(a) => {
                (c.m, c.l, c.n, c.rings, c.delta) = (a.m, a.l, a.n, a.rings, a.delta);
            }
            Command::Solve2d(a) => {
                (c.omega, c.m, c.rings) = (a.omega.clone(), a.m, a.rings);
            }
            Command::Stretch(a) => {
                c.body = a.body.clone();
                c.apex = a.apex.as_deref().map(parse_point::<3>).transpose()?;
                (c.s, c.h) = (a.s.clone(), a.h);
                c.frames = a.frames.then_some(true);
            }
            Command::Verify(a) => c.suite = a.suite.clone(),
            Command::Probe(a) => {
                (c.omega, c.m, c.rings, c.field, c.radius) = (a.omega.clone(), a.m, a.rings, a.field.clone(), a.radius);
                c.x0 = a.x0.as_deref().map(parse_point::<2>).transpose()?;
                c.taus = a.taus.as_deref().map(parse_list).transpose()?;
                c.bump = a
                    .bump
                    .as_deref()
                    .map(|b| {
                        serde_json::from_value(serde_json::Value::String(b.into()))
                            .map_err(|_| CliError::Config(format!("unknown bump {b:?}")))
                    })
                    .transpose()?;
            }
        }
        Ok(c)
    }

    /// Applies solve-2d tuning flags on top of the configured solver options.
    pub fn apply_solver_flags(&self, c: &mut RunConfig) {
        let Command::Solve2d(a) = &self.command else {
            return;
        };
        if a.starts.is_none() && a.refine.is_none() && a.max_iter.is_none() && !a.no_polish && !a.symmetrize {
            return;
        }
        let o = c.solver.get_or_insert_with(Default::default);
        if let Some(v) = a.starts {
            o.random_starts = v;
        }
        if let Some(v) = a.refine {
            o.refine = v;
        }
        if let Some(v) = a.max_iter {
            o.max_iter = v;
        }
        if a.no_polish {
            o.polish = false;
        }
        if a.symmetrize {
            o.symmetrize = true;
        }
    }
}
