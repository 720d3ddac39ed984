//! `cfmac`: experiments on cooperation-facilitator coding.
//!
//! Exit codes: 0 success, 1 the experiment detected a failure, 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub mod commands;
pub mod output;

/// Root seed when neither `--seed` nor the environment provides one.
pub const DEFAULT_SEED: u64 = cfmac_core::bounds::sigma::DEFAULT_SEED;
pub const SEED_ENV: &str = "CFMAC_SEED";

#[derive(Debug, Parser)]
#[command(name = "cfmac", version, about = "Cooperation-facilitator MAC experiments")]
pub struct Cli {
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the constant-bit cooperation scheme on Dueck's MAC.
    DueckSim(SimArgs),
    /// Tabulate the dependence-constrained sum rate over a delta grid.
    Sigma1Curve(CurveArgs),
    /// Lower and upper bounds on the average-error sum-capacity.
    Bounds(BoundsArgs),
    /// Outer bound on the average-error sum-capacity of Dueck's MAC.
    OuterBound(OuterArgs),
    /// Extract a wringing set from a distribution over blocks.
    Wringing(WringingArgs),
    /// Square-root gain along the mixture toward a dependent input.
    SqrtLaw(SqrtArgs),
    /// Search random small channels for a square-root-gain witness.
    FindCstar(FindArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    Exhaustive,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Root seed; overrides CFMAC_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long, value_enum, default_value = "sample")]
    pub mode: SimMode,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Also write the phase-1 codebook, one codeword per line.
    #[arg(long)]
    pub dump_codebook: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 2)]
    pub u_size: usize,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub mac: PathBuf,
    /// Comma-separated delta values.
    #[arg(long, value_delimiter = ',', conflicts_with = "grid", required_unless_present = "grid")]
    pub deltas: Vec<f64>,
    /// Inclusive grid `start:stop:step`.
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub mac: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub cout1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub cout2: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OuterArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub grid_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WringingArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 2)]
    pub x1_size: usize,
    #[arg(long, default_value_t = 2)]
    pub x2_size: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SqrtArgs {
    #[arg(long)]
    pub mac: PathBuf,
    #[arg(long)]
    pub pind: PathBuf,
    #[arg(long)]
    pub pdep: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub deltas: Vec<f64>,
    #[arg(long, default_value_t = cfmac_core::bounds::cstar::DEFAULT_EPS_TILDE)]
    pub eps_tilde: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FindArgs {
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long, default_value_t = 500)]
    pub tries: usize,
    #[arg(long, default_value_t = 0.05)]
    pub min_margin: f64,
    /// Directory for `cstar_mac.json`, `pind.json` and `pdep.json`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Where the root seed came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    Env,
    Default,
}

pub fn resolve_seed(arg: &SeedArg) -> anyhow::Result<(u64, SeedSource)> {
    if let Some(s) = arg.seed {
        return Ok((s, SeedSource::Flag));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            let s = v.trim().parse().map_err(|_| anyhow::anyhow!("{SEED_ENV}={v:?} is not an unsigned integer"))?;
            Ok((s, SeedSource::Env))
        }
        Err(_) => Ok((DEFAULT_SEED, SeedSource::Default)),
    }
}

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// The experiment itself found a failure.
    Failure,
}

fn execute(cli: Cli) -> anyhow::Result<Outcome> {
    let run = move || match cli.command {
        Command::DueckSim(a) => commands::sim::run(&a),
        Command::Sigma1Curve(a) => commands::sigma::run_curve(&a),
        Command::Bounds(a) => commands::sigma::run_bounds(&a),
        Command::OuterBound(a) => commands::cstar::run_outer(&a),
        Command::Wringing(a) => commands::cstar::run_wringing(&a),
        Command::SqrtLaw(a) => commands::cstar::run_sqrt_law(&a),
        Command::FindCstar(a) => commands::cstar::run_find(&a),
    };
    match cli.workers {
        Some(0) => anyhow::bail!("--workers must be positive"),
        Some(w) => rayon::ThreadPoolBuilder::new().num_threads(w).build()?.install(run),
        None => run(),
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Failure) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}
