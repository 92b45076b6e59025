//! Command-line front end: dataset generation, prototype solving,
//! clustering, verification, MDS export and the bundled experiments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use flagirls::SolverConfig;

pub mod commands;
pub mod experiments;

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "FLAGIRLS_OUT_DIR";
pub(crate) const DEFAULT_OUT: &str = "flagirls-out";

#[derive(Debug, Parser)]
#[command(
    name = "flagirls",
    version,
    about = "Robust subspace prototypes on Grassmann manifolds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a prototype of a dataset directory.
    Prototype(commands::PrototypeArgs),
    /// LBG clustering with subspace prototypes as centers.
    Cluster(commands::ClusterArgs),
    /// Classical MDS of a dataset's pairwise distances.
    Mds(commands::MdsArgs),
    /// Generate a synthetic dataset directory.
    Synth(commands::SynthArgs),
    /// Probe a candidate prototype with random test points.
    Verify(commands::VerifyArgs),
    /// Run one of the bundled experiments.
    Experiment(experiments::ExperimentArgs),
}

/// Solver tolerances shared by several commands. Unset values keep the
/// library defaults (or an experiment's own defaults).
#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Gradient-descent step size.
    #[arg(long)]
    pub step_size: Option<f64>,
    /// Fraction of the Weiszfeld tangent taken per ℓ2-median update.
    #[arg(long)]
    pub weiszfeld_step: Option<f64>,
}

impl SolverArgs {
    pub fn apply(&self, cfg: &mut SolverConfig) {
        if let Some(v) = self.eps {
            cfg.eps = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.step_size {
            cfg.step_size = v;
        }
        if let Some(v) = self.weiszfeld_step {
            cfg.weiszfeld_step = v;
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArg {
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = DEFAULT_OUT)]
    pub out: PathBuf,
}

/// How a successful command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A solver stopped at its iteration cap. Results were still written.
    IterationCap,
    /// An experiment ran but at least one of its checks failed.
    ChecksFailed,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::IterationCap => 2,
            Outcome::ChecksFailed => 3,
        }
    }
}

pub fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Prototype(a) => commands::prototype(&a),
        Command::Cluster(a) => commands::cluster(&a),
        Command::Mds(a) => commands::mds(&a),
        Command::Synth(a) => commands::synth(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Experiment(a) => experiments::command(&a),
    }
}

pub(crate) fn solver_json(cfg: &SolverConfig) -> serde_json::Value {
    serde_json::json!({
        "r": cfg.r,
        "eps": cfg.eps,
        "delta": cfg.delta,
        "max_iters": cfg.max_iters,
        "init": cfg.init.describe(),
        "seed": cfg.init.seed(),
        "step_size": cfg.step_size,
        "weiszfeld_step": cfg.weiszfeld_step,
    })
}

pub(crate) fn write_json(
    path: &std::path::Path,
    value: &impl serde::Serialize,
) -> anyhow::Result<()> {
    use anyhow::Context;
    let text = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub(crate) fn write_text(path: &std::path::Path, text: &str) -> anyhow::Result<()> {
    use anyhow::Context;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
