//! Command-line runner for the `genbound` experiments.
//!
//! ```text
//! genbound oracle    --config configs/memorize.toml --out report.txt
//! genbound sgld      --config configs/reference_sgld.toml --out runs/ref.csv --workers 8
//! genbound crossover --config configs/crossover.toml --out crossover.csv
//! ```
//!
//! Exit codes: 0 ok, 1 failed checks or output error, 2 config error,
//! 3 enumeration overflow, 4 divergence.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod output;

use config::Config;

#[derive(Debug, Parser)]
#[command(name = "genbound", version, about = "Exact and Monte Carlo generalization bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file. Without it results go to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed, overriding the one in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, env = "GENBOUND_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Enumerate discrete problems and check every exact bound.
    Oracle,
    /// Monte Carlo estimates of the SGLD bounds.
    Sgld,
    /// Scan the f and g summands and locate where they cross.
    Crossover,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] genbound::Error),
    #[error("{diverged} of {total} trajectories diverged")]
    Divergence { diverged: usize, total: usize },
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use genbound::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::StateSpaceOverflow { .. }) => 3,
            CliError::Core(E::Diverged { .. }) | CliError::Divergence { .. } => 4,
            CliError::Core(E::Usage(_) | E::Distribution(_) | E::InvalidRange { .. }) => 2,
            CliError::Core(_) | CliError::Output(_) => 1,
        }
    }
}

/// Runs a parsed command line; returns stdout text and the exit code.
pub fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let cfg = Config::load(path)?;
    let seed = cfg.seed(cli.seed);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be >= 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let out = cli.out.as_deref();
    pool.install(|| match cli.command {
        Command::Oracle => commands::oracle(&cfg, seed, out),
        Command::Sgld => commands::sgld(&cfg, seed, out),
        Command::Crossover => commands::crossover(&cfg, out),
    })
}
