//! Command-line front end for pseudo-value survival modeling.
//!
//! Five subcommands cover the full workflow: `simulate` benchmark cohorts,
//! turn datasets into `pseudo` values, `fit` the Bayesian network, `predict`
//! survival curves for new subjects, and `evaluate` replicated studies.
//! Every subcommand takes `--config` (JSON settings file), `--seed`, and
//! `--out` (output directory); flags override file values, and the resolved
//! configuration is echoed into the output directory so any run can be
//! reproduced from its artifacts.

pub mod commands;
pub mod config;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{EncodingChoice, EstimatorChoice, EvalPipeline, PseudoVariant, WeightSource};

/// Pseudo-value survival modeling toolkit.
#[derive(Debug, Parser)]
#[command(name = "pseudosurv", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a benchmark cohort, its latent truth, and a 75/25 split.
    Simulate(SimulateArgs),
    /// Convert a right-censored dataset into pseudo survival values.
    Pseudo(PseudoArgs),
    /// Fit the Bayesian network to pseudo values and save a checkpoint.
    Fit(FitArgs),
    /// Predict survival curves with credible bands for new subjects.
    Predict(PredictArgs),
    /// Run a replicated simulation study and report bias, error, coverage.
    Evaluate(EvaluateArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON settings file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Benchmark scenario id, 1 through 7.
    #[arg(long)]
    pub case: Option<u8>,
    /// Override the scenario subject count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Calibrate the censoring parameter to the scenario target.
    #[arg(long, value_name = "BOOL")]
    pub calibrate: Option<bool>,
    /// Pilot sample size used by calibration.
    #[arg(long, value_name = "N")]
    pub pilot_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PseudoArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Input dataset CSV.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Pseudo-value construction.
    #[arg(long, value_enum)]
    pub variant: Option<PseudoVariant>,
    /// Survival estimator for the plain variant.
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorChoice>,
    /// Weight source for the weighted variants.
    #[arg(long, value_enum)]
    pub weights: Option<WeightSource>,
    /// Weight table CSV for the external source.
    #[arg(long, value_name = "PATH")]
    pub weight_file: Option<PathBuf>,
    /// Stratification columns (repeatable) for the stratified source.
    #[arg(long = "stratify-column", value_name = "NAME")]
    pub stratify_columns: Vec<String>,
    /// Quantile bins per stratification column.
    #[arg(long, value_name = "N")]
    pub stratify_bins: Option<usize>,
    /// Floor on the censoring survival before inversion.
    #[arg(long, value_name = "G")]
    pub g_floor: Option<f64>,
    /// Explicit evaluation grid; survival deciles of the input when absent.
    #[arg(long, value_name = "T1,T2,...", value_delimiter = ',')]
    pub grid: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Training dataset CSV.
    #[arg(long, value_name = "PATH")]
    pub dataset: Option<PathBuf>,
    /// Pseudo-value CSV produced by the pseudo subcommand.
    #[arg(long, value_name = "PATH")]
    pub pseudo: Option<PathBuf>,
    /// Time encoding of the network input.
    #[arg(long, value_enum)]
    pub encoding: Option<EncodingChoice>,
    /// Variational-inference iterations.
    #[arg(long, value_name = "N")]
    pub advi_iterations: Option<usize>,
    /// Mean-squared-error pre-fit iterations.
    #[arg(long, value_name = "N")]
    pub point_iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Fit checkpoint JSON.
    #[arg(long, value_name = "PATH")]
    pub artifact: Option<PathBuf>,
    /// CSV of new subjects (id plus covariate columns).
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Posterior draws per subject and grid point.
    #[arg(long, value_name = "N")]
    pub draws: Option<usize>,
    /// Also write an SVG survival-curve plot with 95 percent bands.
    #[arg(long)]
    pub plot: bool,
    /// Binary covariate splitting the plot into two curve groups.
    #[arg(long, value_name = "NAME")]
    pub stratify_by: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Benchmark scenario id, 1 through 7.
    #[arg(long)]
    pub case: Option<u8>,
    /// Override the scenario subject count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of replicates.
    #[arg(long, value_name = "R")]
    pub replicates: Option<usize>,
    /// Explicit per-replicate seeds; derived from the master seed when absent.
    #[arg(long, value_name = "S1,S2,...", value_delimiter = ',')]
    pub replicate_seeds: Vec<u64>,
    /// Pipeline flavor under evaluation.
    #[arg(long, value_enum)]
    pub pipeline: Option<EvalPipeline>,
    /// Posterior draws per held-out subject and grid point.
    #[arg(long, value_name = "N")]
    pub draws: Option<usize>,
    /// Worker threads for replicates; all cores when absent.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
    /// Variational-inference iterations.
    #[arg(long, value_name = "N")]
    pub advi_iterations: Option<usize>,
    /// Mean-squared-error pre-fit iterations.
    #[arg(long, value_name = "N")]
    pub point_iterations: Option<usize>,
}

/// Parses `std::env::args` and runs the chosen subcommand.
pub fn run() -> anyhow::Result<()> {
    dispatch(Cli::parse())
}

/// Runs the CLI on an explicit argument list (used by integration tests).
pub fn run_from<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    dispatch(Cli::try_parse_from(args)?)
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Pseudo(args) => commands::pseudo::run(args),
        Command::Fit(args) => commands::fit::run(args),
        Command::Predict(args) => commands::predict::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
    }
}
