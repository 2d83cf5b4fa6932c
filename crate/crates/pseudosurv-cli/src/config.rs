//! Subcommand configurations.
//!
//! Every subcommand resolves its settings in three layers: built-in
//! defaults, then an optional JSON config file, then command-line flags.
//! The resolved configuration is echoed into the output directory as
//! `config.json`, and re-running with `--config <that file>` reproduces the
//! outputs byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use pseudosurv::data::CsvSchema;
use pseudosurv::pipeline::{FitConfig, TimeEncoding};
use pseudosurv::pseudo::SurvivalEstimator;

/// Loads a config file when given, otherwise the type's defaults.
/// Unknown keys in the file are errors.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read config file '{}'", p.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("config file '{}' is invalid", p.display()))
        }
    }
}

/// Writes the resolved configuration into `out_dir/config.json`.
pub fn echo<T: Serialize>(out_dir: &Path, config: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(config)?;
    fs::write(out_dir.join("config.json"), text + "\n")
        .with_context(|| format!("cannot write config echo in '{}'", out_dir.display()))?;
    Ok(())
}

/// Replaces `slot` when a flag supplied a value.
pub fn apply<T>(slot: &mut T, flag: Option<T>) {
    if let Some(value) = flag {
        *slot = value;
    }
}

// ── Seed-derivation stages ──────────────────────────────────────────────────

/// Stage indexes for deriving stage seeds from a command seed. Replicate
/// seeds use small indexes (the replicate number), so stage constants are
/// far away from that range.
pub mod stage {
    /// Censoring-calibration pilot sample.
    pub const CALIBRATE: u64 = 1_000_000_007;
    /// Train/test split permutation.
    pub const SPLIT: u64 = 1_000_000_033;
    /// Model fit (pre-fit and variational run derive further from this).
    pub const FIT: u64 = 1_000_000_087;
    /// Posterior-predictive draws.
    pub const PREDICT: u64 = 1_000_000_093;
}

// ── Shared enums ────────────────────────────────────────────────────────────

/// Which pseudo-value construction to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PseudoVariant {
    /// Unweighted jackknife of the full-sample survival estimate.
    Plain,
    /// Weighted jackknife through the inverse-censoring-weighted hazard.
    Ipcw,
    /// Interval-conditional weighted jackknife.
    Conditional,
}

/// Survival estimator the plain jackknife differentiates through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorChoice {
    /// Product-limit estimate.
    ProductLimit,
    /// `exp(-L)` with `L` the cumulative-hazard estimate.
    ExpHazard,
}

impl EstimatorChoice {
    /// The library-side estimator.
    pub fn to_library(self) -> SurvivalEstimator {
        match self {
            EstimatorChoice::ProductLimit => SurvivalEstimator::ProductLimit,
            EstimatorChoice::ExpHazard => SurvivalEstimator::ExpCumHazard,
        }
    }
}

/// Time-encoding flag values, mirroring the library's encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingChoice {
    /// One network; the grid point enters as a one-hot block.
    OneHot,
    /// One independent network per grid point.
    PerTimepoint,
}

impl EncodingChoice {
    /// The library-side encoding.
    pub fn to_library(self) -> TimeEncoding {
        match self {
            EncodingChoice::OneHot => TimeEncoding::OneHot,
            EncodingChoice::PerTimepoint => TimeEncoding::PerTimepoint,
        }
    }
}

/// Where censoring weights come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightSource {
    /// All weights 1.
    Unit,
    /// One censoring-survival fit on the whole sample.
    Marginal,
    /// Censoring-survival fits within covariate strata.
    Stratified,
    /// A weight table loaded from a CSV file.
    External,
}

/// End-to-end pipeline flavor used by the `evaluate` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalPipeline {
    /// Plain jackknife through the product-limit estimate.
    Plain,
    /// Plain jackknife through the `exp(-L)` estimate.
    PlainExpHazard,
    /// Weighted jackknife, marginal censoring fit.
    IpcwMarginal,
    /// Weighted jackknife, stratified censoring fit.
    IpcwStratified,
    /// Weighted jackknife with the generator's closed-form censoring
    /// survival (available because `evaluate` simulates its own data).
    IpcwOracle,
}

// ── Per-subcommand configurations ───────────────────────────────────────────

/// Settings for `simulate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    /// Benchmark scenario id, 1 through 7.
    pub case: u8,
    /// Subject-count override; the scenario default applies when absent.
    pub n: Option<usize>,
    /// Master seed.
    pub seed: u64,
    /// Calibrate the censoring parameter to the scenario target first.
    pub calibrate: bool,
    /// Pilot sample size used by calibration.
    pub pilot_n: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            case: 1,
            n: None,
            seed: 0,
            calibrate: true,
            pilot_n: 100_000,
        }
    }
}

/// Settings for `pseudo`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PseudoConfig {
    /// Input dataset CSV.
    pub input: Option<PathBuf>,
    /// Column names of the input CSV.
    pub schema: CsvSchema,
    /// Master seed (accepted for interface uniformity; every pseudo-value
    /// construction is deterministic, so it has no effect here).
    pub seed: u64,
    /// Pseudo-value construction.
    pub variant: PseudoVariant,
    /// Survival estimator for the plain variant.
    pub estimator: EstimatorChoice,
    /// Weight source for the weighted variants.
    pub weights: WeightSource,
    /// Weight table CSV for the external source.
    pub weight_file: Option<PathBuf>,
    /// Covariate columns defining strata for the stratified source.
    pub stratify_columns: Vec<String>,
    /// Quantile bins per stratification column.
    pub stratify_bins: usize,
    /// Floor on the censoring survival before inversion.
    pub g_floor: f64,
    /// Explicit evaluation grid; survival deciles of the input when absent.
    pub grid: Option<Vec<f64>>,
}

impl Default for PseudoConfig {
    fn default() -> Self {
        PseudoConfig {
            input: None,
            schema: CsvSchema::default(),
            seed: 0,
            variant: PseudoVariant::Plain,
            estimator: EstimatorChoice::ProductLimit,
            weights: WeightSource::Marginal,
            weight_file: None,
            stratify_columns: Vec::new(),
            stratify_bins: 2,
            g_floor: 0.05,
            grid: None,
        }
    }
}

/// Settings for `fit`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitTaskConfig {
    /// Training dataset CSV (ids, times, events, covariates).
    pub dataset: Option<PathBuf>,
    /// Pseudo-value CSV produced by the `pseudo` subcommand.
    pub pseudo: Option<PathBuf>,
    /// Column names of the dataset CSV.
    pub schema: CsvSchema,
    /// Master seed.
    pub seed: u64,
    /// Model, optimizer, and prior settings.
    pub model: FitConfig,
}

impl Default for FitTaskConfig {
    fn default() -> Self {
        FitTaskConfig {
            dataset: None,
            pseudo: None,
            schema: CsvSchema::default(),
            seed: 0,
            model: FitConfig::default(),
        }
    }
}

/// Settings for `predict`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PredictConfig {
    /// Fit artifact JSON produced by the `fit` subcommand.
    pub artifact: Option<PathBuf>,
    /// CSV of new subjects: an id column plus covariate columns. Time and
    /// event columns are ignored when present, so dataset files work as-is.
    pub input: Option<PathBuf>,
    /// Column names of the input CSV.
    pub schema: CsvSchema,
    /// Master seed for the posterior draws.
    pub seed: u64,
    /// Posterior draws per subject and grid point.
    pub draws: usize,
    /// Also write an SVG survival-curve plot with 95 percent bands.
    pub plot: bool,
    /// Binary covariate whose two groups get separate averaged curves in
    /// the plot; a single overall curve when absent.
    pub stratify_by: Option<String>,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            artifact: None,
            input: None,
            schema: CsvSchema::default(),
            seed: 0,
            draws: 1000,
            plot: false,
            stratify_by: None,
        }
    }
}

/// Settings for `evaluate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateConfig {
    /// Benchmark scenario id, 1 through 7.
    pub case: u8,
    /// Subject-count override; the scenario default applies when absent.
    pub n: Option<usize>,
    /// Number of replicates.
    pub replicates: usize,
    /// Master seed.
    pub seed: u64,
    /// Explicit per-replicate seeds; derived from the master seed when
    /// absent. Must match `replicates` in length when given.
    pub replicate_seeds: Option<Vec<u64>>,
    /// Pipeline flavor under evaluation.
    pub pipeline: EvalPipeline,
    /// Covariate columns defining strata for the stratified pipeline.
    pub stratify_columns: Vec<String>,
    /// Quantile bins per stratification column.
    pub stratify_bins: usize,
    /// Floor on the censoring survival before inversion.
    pub g_floor: f64,
    /// Posterior draws per held-out subject and grid point.
    pub draws: usize,
    /// Pilot sample size used by censoring calibration.
    pub pilot_n: usize,
    /// Worker threads for replicates; all cores when absent.
    pub threads: Option<usize>,
    /// Model, optimizer, and prior settings.
    pub model: FitConfig,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        EvaluateConfig {
            case: 1,
            n: None,
            replicates: 20,
            seed: 0,
            replicate_seeds: None,
            pipeline: EvalPipeline::Plain,
            stratify_columns: vec!["z1".to_string()],
            stratify_bins: 2,
            g_floor: 0.05,
            draws: 1000,
            pilot_n: 100_000,
            threads: None,
            model: FitConfig::default(),
        }
    }
}
