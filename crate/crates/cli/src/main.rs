//! `seqwit` — sequential entanglement-witnessing toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parameter
//! error, 3 internal inconsistency (analytic and simulated runs disagree).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser)]
#[command(
    name = "seqwit",
    version,
    about = "Sequential entanglement witnessing on a shared two-qubit state",
    long_about = "Diagnoses the shared initial state, runs the chain of unsharp-measuring \
                  observers, sweeps (theta, epsilon) grids into plot-ready CSV/JSON, and runs \
                  the seeded verification suites. All angles are in radians."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Diagnostics of one initial state: correlation tensor, positivity, PPT, CHSH
    StateInfo(StateInfoArgs),
    /// One full run: per-observer sharpness, witness value, and state diagnostics
    Sequence(SequenceArgs),
    /// Grid of observer counts over (theta, epsilon), written as CSV or JSON
    Sweep(SweepArgs),
    /// Seeded verification suites; exits 1 if any suite fails
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaScale {
    Log,
    Linear,
}

#[derive(Args)]
pub struct StateInfoArgs {
    /// State angle in radians, in (0, pi/4]
    #[arg(long)]
    pub theta: f64,
    /// Correlation weight on axes 2 and 3, in ((1-cos theta)/(2 sin theta), 1]
    #[arg(long)]
    pub alpha: f64,
    /// Asymmetric axis-3 weight, in (0, alpha); selects the asymmetric state
    #[arg(long)]
    pub beta: Option<f64>,
    /// Machine-readable output instead of the text report
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to a file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SequenceArgs {
    /// State angle in radians, in (0, pi/4]
    #[arg(long)]
    pub theta: f64,
    /// Correlation weight on axes 2 and 3, in ((1-cos theta)/(2 sin theta), 1]
    #[arg(long)]
    pub alpha: f64,
    /// Relative detection margin, > 0
    #[arg(long)]
    pub epsilon: f64,
    /// Cap on the number of observers
    #[arg(long, default_value_t = 1_000_000)]
    pub max_bobs: usize,
    /// Machine-readable output instead of the text table
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to a file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Smallest theta of the grid (radians)
    #[arg(long, default_value_t = 0.01)]
    pub theta_min: f64,
    /// Largest theta of the grid (radians)
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub theta_max: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 50)]
    pub theta_steps: usize,
    /// Grid spacing; the interesting regime is theta -> 0, so log is the default
    #[arg(long, value_enum, default_value_t = ThetaScale::Log)]
    pub theta_scale: ThetaScale,
    /// Comma-separated list of detection margins
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
    pub epsilons: Vec<f64>,
    /// Correlation weight on axes 2 and 3
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Cap on the number of observers per grid point
    #[arg(long, default_value_t = 1_000_000)]
    pub max_bobs: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to a file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Seed for the Monte-Carlo suites
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Sample count for the Monte-Carlo suites; 0 makes them vacuous
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(commands::run(cli.command));
}
