//! Accuracy metrics for predicted survival curves against known truth.
//!
//! A simulation study produces, per replicate, posterior-predictive
//! summaries for held-out subjects on a replicate-specific grid of survival
//! quantiles. This module reduces each replicate to sufficient statistics
//! and aggregates replicates into bias, root mean squared error, empirical
//! coverage of the credible intervals, and median interval width per grid
//! index, averaging over subjects and replicates together.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::pipeline::{percentile, PosteriorPrediction};

/// Per-grid-index sufficient statistics for one replicate.
#[derive(Debug, Clone)]
pub struct ReplicateSummary {
    /// Evaluation grid of this replicate.
    pub grid: Vec<f64>,
    /// Sum of `predicted mean - true survival` over subjects, per index.
    pub sum_err: Vec<f64>,
    /// Sum of squared errors over subjects, per index.
    pub sum_sq_err: Vec<f64>,
    /// Subjects whose true survival fell inside the credible interval.
    pub covered: Vec<usize>,
    /// Credible interval widths, per index, one entry per subject.
    pub widths: Vec<Vec<f64>>,
    /// Held-out subjects in this replicate.
    pub n_subjects: usize,
}

/// Reduces one replicate to its sufficient statistics.
///
/// `truth` holds the true survival of subject `i` at grid point `j` in the
/// same layout as the prediction.
pub fn evaluate_replicate(
    pred: &PosteriorPrediction,
    truth: &[Vec<f64>],
) -> Result<ReplicateSummary> {
    let n = pred.n();
    let m = pred.grid().len();
    if truth.len() != n {
        return Err(Error::invalid(format!(
            "{} truth rows for {} predicted subjects",
            truth.len(),
            n
        )));
    }
    for (i, row) in truth.iter().enumerate() {
        if row.len() != m {
            return Err(Error::invalid(format!(
                "truth row {i} has {} entries, grid has {m}",
                row.len()
            )));
        }
    }

    let mut sum_err = vec![0.0; m];
    let mut sum_sq_err = vec![0.0; m];
    let mut covered = vec![0usize; m];
    let mut widths = vec![Vec::with_capacity(n); m];
    for i in 0..n {
        for j in 0..m {
            let err = pred.mean(i, j) - truth[i][j];
            sum_err[j] += err;
            sum_sq_err[j] += err * err;
            let (lo, hi) = (pred.lower(i, j), pred.upper(i, j));
            if lo <= truth[i][j] && truth[i][j] <= hi {
                covered[j] += 1;
            }
            widths[j].push(hi - lo);
        }
    }
    Ok(ReplicateSummary {
        grid: pred.grid().to_vec(),
        sum_err,
        sum_sq_err,
        covered,
        widths,
        n_subjects: n,
    })
}

/// Aggregated study metrics, one value per grid index.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetricReport {
    /// Elementwise mean of the replicate grids.
    pub grid: Vec<f64>,
    /// Mean of `predicted - true` over all subjects and replicates.
    pub bias: Vec<f64>,
    /// Root mean squared error over all subjects and replicates.
    pub rmse: Vec<f64>,
    /// Fraction of subject-replicate pairs whose truth fell inside the
    /// 95 percent credible interval.
    pub coverage: Vec<f64>,
    /// Median credible-interval width over all subjects and replicates.
    pub median_width: Vec<f64>,
    /// Replicates aggregated.
    pub n_replicates: usize,
    /// Subject-replicate pairs behind each grid index.
    pub n_observations: usize,
}

/// Combines replicate summaries into a study report.
///
/// All replicates must share the same grid length; grids themselves may
/// differ (each replicate estimates its own quantiles) and are averaged
/// elementwise for reporting. Iteration follows the input order, so the
/// result is identical for any fixed replicate order.
pub fn aggregate(summaries: &[ReplicateSummary]) -> Result<MetricReport> {
    if summaries.is_empty() {
        return Err(Error::invalid("no replicates to aggregate"));
    }
    let m = summaries[0].grid.len();
    for (r, s) in summaries.iter().enumerate() {
        if s.grid.len() != m {
            return Err(Error::invalid(format!(
                "replicate {r} has {} grid points, expected {m}",
                s.grid.len()
            )));
        }
    }

    let mut grid = vec![0.0; m];
    let mut bias = vec![0.0; m];
    let mut rmse = vec![0.0; m];
    let mut coverage = vec![0.0; m];
    let mut median_width = vec![0.0; m];
    let total: usize = summaries.iter().map(|s| s.n_subjects).sum();
    if total == 0 {
        return Err(Error::invalid("replicates contain no subjects"));
    }

    for j in 0..m {
        let mut err = 0.0;
        let mut sq = 0.0;
        let mut cov = 0usize;
        let mut widths: Vec<f64> = Vec::new();
        let mut g = 0.0;
        for s in summaries {
            err += s.sum_err[j];
            sq += s.sum_sq_err[j];
            cov += s.covered[j];
            widths.extend_from_slice(&s.widths[j]);
            g += s.grid[j];
        }
        grid[j] = g / summaries.len() as f64;
        bias[j] = err / total as f64;
        rmse[j] = (sq / total as f64).sqrt();
        coverage[j] = cov as f64 / total as f64;
        widths.sort_by(f64::total_cmp);
        median_width[j] = percentile(&widths, 0.5);
    }

    Ok(MetricReport {
        grid,
        bias,
        rmse,
        coverage,
        median_width,
        n_replicates: summaries.len(),
        n_observations: total,
    })
}

// ── Train/test split ────────────────────────────────────────────────────────

/// Splits `n` subjects into train and test index sets by a seeded
/// permutation. The training set holds `3 n / 4` subjects (integer
/// division); both halves keep ascending index order.
pub fn train_test_split(n: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 4 {
        return Err(Error::invalid("splitting needs at least 4 subjects"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let cut = n * 3 / 4;
    let mut train = order[..cut].to_vec();
    let mut test = order[cut..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

// ── Report output ───────────────────────────────────────────────────────────

/// Writes the report as CSV with one row per grid index.
pub fn write_metric_csv(path: &Path, report: &MetricReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "quantile_index",
        "time",
        "bias",
        "rmse",
        "coverage",
        "median_width",
        "n_observations",
    ])?;
    for j in 0..report.grid.len() {
        w.write_record([
            format!("{}", j + 1),
            format!("{}", report.grid[j]),
            format!("{}", report.bias[j]),
            format!("{}", report.rmse[j]),
            format!("{}", report.coverage[j]),
            format!("{}", report.median_width[j]),
            format!("{}", report.n_observations),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the report as pretty JSON.
pub fn write_metric_json(path: &Path, report: &MetricReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}
