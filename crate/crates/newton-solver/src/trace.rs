use std::fmt::Write as _;

use convex_core::fmt::g17;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Init,
    Lagrange,
    Gradient,
    Perturb,
    Raise,
    Lower,
    Apex,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Init => "init",
            StepKind::Lagrange => "lagrange",
            StepKind::Gradient => "gradient",
            StepKind::Perturb => "perturb",
            StepKind::Raise => "raise",
            StepKind::Lower => "lower",
            StepKind::Apex => "apex",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub objective: f64,
    pub step: StepKind,
}

/// Solver trace; every pushed row after the first must lower the objective.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn push(&mut self, objective: f64, step: StepKind) {
        let iteration = self.rows.len();
        self.rows.push(TraceRow {
            iteration,
            objective,
            step,
        });
    }

    pub fn last(&self) -> Option<f64> {
        self.rows.last().map(|r| r.objective)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].objective < w[0].objective)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,objective,step\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.iteration, g17(r.objective), r.step.as_str());
        }
        out
    }
}
