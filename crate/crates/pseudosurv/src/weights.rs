//! Inverse-probability-of-censoring weights.
//!
//! A [`WeightTable`] stores one weight per (subject, event time) pair. The
//! reverse Kaplan-Meier providers set `W_i(u) = 1 / G_hat(u-)`, the inverse
//! of the estimated censoring survival just before `u`, evaluated marginally
//! or within the subject's stratum. `G_hat` is floored (default 0.05) so
//! weights stay bounded (default <= 20).

use std::collections::BTreeMap;
use std::path::Path;

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::km::{reverse_kaplan_meier, RiskTable};

/// How censoring weights are produced.
#[derive(Debug, Clone)]
pub enum CensoringModel {
    /// All weights 1 (no censoring adjustment).
    Unit,
    /// One reverse Kaplan-Meier fit on the whole sample.
    MarginalReverseKm,
    /// Reverse Kaplan-Meier within strata formed by quantile-binning the
    /// named covariate columns (a cross of `bins` bins per column).
    StratifiedReverseKm { columns: Vec<String>, bins: usize },
}

/// Options shared by the reverse Kaplan-Meier providers.
#[derive(Debug, Clone, Copy)]
pub struct WeightOptions {
    /// Floor applied to the censoring survival before inversion.
    pub g_floor: f64,
}

impl Default for WeightOptions {
    fn default() -> Self {
        WeightOptions { g_floor: 0.05 }
    }
}

/// Weights for every subject at every distinct event time of a dataset.
#[derive(Debug, Clone)]
pub struct WeightTable {
    event_times: Vec<f64>,
    /// Row-major `n x K` weights.
    weights: Vec<f64>,
    /// Subject count, kept explicitly so a table with zero event times (an
    /// all-censored sample) still knows how many subjects it covers.
    n: usize,
}

impl WeightTable {
    /// Builds a table after validating shape and values.
    pub fn new(event_times: Vec<f64>, weights: Vec<f64>, n: usize) -> Result<Self> {
        let k = event_times.len();
        if weights.len() != n * k {
            return Err(Error::invalid(format!(
                "weight table needs {n} x {k} = {} weights, got {}",
                n * k,
                weights.len()
            )));
        }
        for w in event_times.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::invalid(
                    "weight table event times must be strictly increasing",
                ));
            }
        }
        for (ix, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::invalid(format!(
                    "weight {w} at flat index {ix} must be finite and >= 0"
                )));
            }
        }
        Ok(WeightTable {
            event_times,
            weights,
            n,
        })
    }

    /// Distinct event times the table covers, increasing.
    pub fn event_times(&self) -> &[f64] {
        &self.event_times
    }

    /// Number of subjects covered.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight of subject `i` at event time index `k`.
    pub fn weight(&self, i: usize, k: usize) -> f64 {
        self.weights[i * self.event_times.len() + k]
    }

    /// All weights of subject `i`, one per event time.
    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.event_times.len();
        &self.weights[i * k..(i + 1) * k]
    }
}

/// Distinct event times of a dataset (the times a weight table must cover).
pub fn event_times(data: &SurvivalDataset) -> Vec<f64> {
    RiskTable::build(data.times(), data.events()).times
}

// ── Providers ───────────────────────────────────────────────────────────────

/// Computes censoring weights for all subjects at all event times of `data`.
pub fn censoring_weights(
    data: &SurvivalDataset,
    model: &CensoringModel,
    opts: &WeightOptions,
) -> Result<WeightTable> {
    if !(opts.g_floor > 0.0 && opts.g_floor <= 1.0) {
        return Err(Error::invalid(format!(
            "g_floor must lie in (0, 1], got {}",
            opts.g_floor
        )));
    }
    let times = event_times(data);
    let n = data.n();
    let k = times.len();
    let mut weights = vec![1.0; n * k];

    match model {
        CensoringModel::Unit => {}
        CensoringModel::MarginalReverseKm => {
            let g = reverse_kaplan_meier(data)?;
            let col: Vec<f64> = times
                .iter()
                .map(|&u| 1.0 / g.eval_left(u).max(opts.g_floor))
                .collect();
            for i in 0..n {
                weights[i * k..(i + 1) * k].copy_from_slice(&col);
            }
        }
        CensoringModel::StratifiedReverseKm { columns, bins } => {
            let strata = assign_strata(data, columns, *bins)?;
            let n_strata = strata.iter().max().map_or(0, |&s| s + 1);
            for s in 0..n_strata {
                let rows: Vec<usize> = (0..n).filter(|&i| strata[i] == s).collect();
                if rows.len() < 2 {
                    return Err(Error::Estimation(format!(
                        "stratum {s} has {} subject(s); each stratum needs at least 2",
                        rows.len()
                    )));
                }
                let sub = data.subset(&rows)?;
                let g = reverse_kaplan_meier(&sub)?;
                let col: Vec<f64> = times
                    .iter()
                    .map(|&u| 1.0 / g.eval_left(u).max(opts.g_floor))
                    .collect();
                for &i in &rows {
                    weights[i * k..(i + 1) * k].copy_from_slice(&col);
                }
            }
        }
    }
    WeightTable::new(times, weights, n)
}

/// Assigns each subject a stratum index from quantile bins of the named
/// columns. Tied cells share a bin, so discrete columns keep their levels.
fn assign_strata(data: &SurvivalDataset, columns: &[String], bins: usize) -> Result<Vec<usize>> {
    if columns.is_empty() {
        return Err(Error::invalid("stratified weights need at least one column"));
    }
    if bins < 2 {
        return Err(Error::invalid("stratified weights need bins >= 2"));
    }
    let col_ix: Vec<usize> = columns
        .iter()
        .map(|c| data.cov_index(c))
        .collect::<Result<Vec<_>>>()?;

    let n = data.n();
    let mut keys: Vec<Vec<usize>> = vec![Vec::with_capacity(col_ix.len()); n];
    for &c in &col_ix {
        let mut sorted: Vec<f64> = (0..n).map(|i| data.covariate_row(i)[c]).collect();
        sorted.sort_by(f64::total_cmp);
        let mut edges: Vec<f64> = (1..bins)
            .map(|j| {
                let idx = ((j as f64 / bins as f64) * n as f64).ceil() as usize;
                sorted[idx.clamp(1, n) - 1]
            })
            .collect();
        edges.dedup();
        for (i, key) in keys.iter_mut().enumerate() {
            let x = data.covariate_row(i)[c];
            key.push(edges.partition_point(|&e| e < x));
        }
    }
    let mut lookup: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(n);
    for key in keys {
        let next = lookup.len();
        out.push(*lookup.entry(key).or_insert(next));
    }
    Ok(out)
}

// ── External weight files ───────────────────────────────────────────────────

/// Loads an externally computed weight table from a CSV with columns
/// `id,time,weight`. Every (subject, event time) pair of `data` must appear.
pub fn load_weight_table(path: impl AsRef<Path>, data: &SurvivalDataset) -> Result<WeightTable> {
    let path = path.as_ref();
    let times = event_times(data);
    let n = data.n();
    let k = times.len();

    let mut row_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, id) in data.ids().iter().enumerate() {
        row_of.insert(id.as_str(), i);
    }

    let mut reader = csv::Reader::from_path(path).map_err(|e| {
        Error::invalid(format!("cannot open weight file '{}': {e}", path.display()))
    })?;
    let headers = reader.headers()?.clone();
    let need = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::invalid(format!("weight file is missing column '{name}'")))
    };
    let (id_c, time_c, w_c) = (need("id")?, need("time")?, need("weight")?);

    let mut weights = vec![f64::NAN; n * k];
    for (row_ix, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = row_ix + 1;
        let id = record
            .get(id_c)
            .ok_or_else(|| Error::invalid(format!("weight file row {row_no}: missing id")))?;
        let &i = row_of.get(id.trim()).ok_or_else(|| {
            Error::invalid(format!("weight file row {row_no}: unknown id '{id}'"))
        })?;
        let parse = |c: usize, what: &str| -> Result<f64> {
            record
                .get(c)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::invalid(format!("weight file row {row_no}: unparseable {what}"))
                })
        };
        let t = parse(time_c, "time")?;
        let w = parse(w_c, "weight")?;
        let tk = times
            .partition_point(|&u| u < t)
            .min(k.saturating_sub(1));
        if k == 0 || times[tk] != t {
            return Err(Error::invalid(format!(
                "weight file row {row_no}: time {t} is not an event time of the dataset"
            )));
        }
        weights[i * k + tk] = w;
    }

    let mut missing = Vec::new();
    for i in 0..n {
        for tk in 0..k {
            if weights[i * k + tk].is_nan() {
                missing.push(format!("({}, {})", data.ids()[i], times[tk]));
                if missing.len() >= 5 {
                    break;
                }
            }
        }
        if missing.len() >= 5 {
            break;
        }
    }
    if !missing.is_empty() {
        return Err(Error::invalid(format!(
            "weight file '{}' does not cover all (id, event time) pairs; first missing: {}",
            path.display(),
            missing.join(", ")
        )));
    }
    WeightTable::new(times, weights, n)
}

/// Writes a weight table as `id,time,weight` rows (subject-major order).
pub fn write_weight_table(
    path: impl AsRef<Path>,
    data: &SurvivalDataset,
    table: &WeightTable,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(["id", "time", "weight"])?;
    for i in 0..data.n() {
        for (tk, &t) in table.event_times().iter().enumerate() {
            writer.write_record(&[
                data.ids()[i].clone(),
                format!("{t}"),
                format!("{}", table.weight(i, tk)),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}
