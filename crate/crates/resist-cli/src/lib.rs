//! Front end for the minimal-resistance solvers: argument and configuration
//! handling, subcommands, verification suites and artifact manifests.

pub mod cli;
pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod suites;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use cli::{Cli, Command};
pub use commands::Outcome;
pub use config::RunConfig;
pub use error::CliError;
pub use output::{Artifacts, FileEntry, MANIFEST};
pub use suites::{Check, SuiteContext, SuiteRegistry, SuiteReport, VerificationSuite};

/// What a successful run produced.
pub struct RunResult {
    pub outcome: Outcome,
    pub out_dir: PathBuf,
    pub files: Vec<FileEntry>,
    pub seed: u64,
}

/// Resolves the configuration layers of a parsed command line.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.overlay(&cli.overrides()?);
    cli.apply_solver_flags(&mut cfg);
    cfg.resolve_seed()?;
    Ok(cfg)
}

/// Runs a resolved configuration. Verification failures are reported as
/// errors for `verify`, and for other commands only when `verify` is set.
pub fn run(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let command = cfg
        .command
        .clone()
        .ok_or_else(|| CliError::Config("missing command".into()))?;
    let seed = cfg.seed.unwrap_or(0);
    let out_dir = cfg.out_dir();
    let mut art = Artifacts::create(&out_dir)?;
    let outcome = match command.as_str() {
        "solve-radial" => commands::solve_radial_cmd(cfg, &mut art)?,
        "solve-2d" => commands::solve_2d_cmd(cfg, seed, &mut art)?,
        "stretch" => commands::stretch_cmd(cfg, &mut art)?,
        "verify" => commands::verify_cmd(cfg, seed, &mut art)?,
        "probe" => commands::probe_cmd(cfg, &mut art)?,
        other => return Err(CliError::Config(format!("unknown command {other:?}"))),
    };
    let files = art.finish(&command, seed, cfg)?;
    let gated = command == "verify" || cfg.verify.unwrap_or(false);
    let failed: Vec<&str> = outcome
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if gated && !failed.is_empty() {
        return Err(CliError::Verification(format!("{}: {}", command, failed.join(", "))));
    }
    Ok(RunResult {
        outcome,
        out_dir,
        files,
        seed,
    })
}

/// Parses `args`, runs, prints a summary and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match resolve(&cli).and_then(|cfg| run(&cfg)) {
        Ok(r) => {
            for c in &r.outcome.checks {
                println!("{} {} {}", if c.passed { "ok  " } else { "FAIL" }, c.name, convex_core::fmt::g17(c.value));
            }
            println!("{}", r.outcome.summary);
            println!("wrote {} files to {}", r.files.len() + 1, r.out_dir.display());
            0
        }
        Err(e) => {
            eprintln!("resist: {e}");
            e.exit_code()
        }
    }
}
