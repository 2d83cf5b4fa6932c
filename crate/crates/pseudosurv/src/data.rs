//! Right-censored survival datasets and their CSV schema.
//!
//! A dataset holds, per subject: a unique id, an observed time `T_i >= 0`,
//! an event indicator (`true` = event, `false` = right-censored), and a
//! fixed-width covariate row. Covariates are stored row-major.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

/// A validated right-censored survival dataset.
#[derive(Debug, Clone)]
pub struct SurvivalDataset {
    ids: Vec<String>,
    times: Vec<f64>,
    events: Vec<bool>,
    covariates: Vec<f64>,
    cov_names: Vec<String>,
}

impl SurvivalDataset {
    /// Builds a dataset from columns, validating shapes and values.
    pub fn new(
        ids: Vec<String>,
        times: Vec<f64>,
        events: Vec<bool>,
        covariates: Vec<f64>,
        cov_names: Vec<String>,
    ) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::invalid("dataset has no subjects"));
        }
        if times.len() != n || events.len() != n {
            return Err(Error::invalid(format!(
                "column lengths differ: {} ids, {} times, {} events",
                n,
                times.len(),
                events.len()
            )));
        }
        let d = cov_names.len();
        if covariates.len() != n * d {
            return Err(Error::invalid(format!(
                "expected {} covariate cells ({} subjects x {} columns), got {}",
                n * d,
                n,
                d,
                covariates.len()
            )));
        }
        for (i, &t) in times.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::invalid(format!(
                    "time for subject '{}' (row {i}) is {t}, must be finite and >= 0",
                    ids[i]
                )));
            }
        }
        for (i, &x) in covariates.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::invalid(format!(
                    "covariate cell {} of subject row {} is not finite",
                    i % d.max(1),
                    i / d.max(1)
                )));
            }
        }
        let mut seen = HashSet::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if !seen.insert(id.as_str()) {
                return Err(Error::invalid(format!("duplicate id '{id}' at row {i}")));
            }
        }
        Ok(SurvivalDataset {
            ids,
            times,
            events,
            covariates,
            cov_names,
        })
    }

    /// Number of subjects.
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    /// Number of covariate columns.
    pub fn cov_dim(&self) -> usize {
        self.cov_names.len()
    }

    /// Subject ids in row order.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Observed times in row order.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Event indicators in row order.
    pub fn events(&self) -> &[bool] {
        &self.events
    }

    /// Covariate column names.
    pub fn cov_names(&self) -> &[String] {
        &self.cov_names
    }

    /// Covariate row for subject `i`.
    pub fn covariate_row(&self, i: usize) -> &[f64] {
        let d = self.cov_dim();
        &self.covariates[i * d..(i + 1) * d]
    }

    /// Index of a covariate column by name.
    pub fn cov_index(&self, name: &str) -> Result<usize> {
        self.cov_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::invalid(format!("no covariate column named '{name}'")))
    }

    /// True when no subject is censored.
    pub fn fully_observed(&self) -> bool {
        self.events.iter().all(|&e| e)
    }

    /// Largest observed time.
    pub fn max_time(&self) -> f64 {
        self.times.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// New dataset keeping only the given subject rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let d = self.cov_dim();
        let mut ids = Vec::with_capacity(rows.len());
        let mut times = Vec::with_capacity(rows.len());
        let mut events = Vec::with_capacity(rows.len());
        let mut covs = Vec::with_capacity(rows.len() * d);
        for &r in rows {
            if r >= self.n() {
                return Err(Error::invalid(format!(
                    "subset row {r} out of range for {} subjects",
                    self.n()
                )));
            }
            ids.push(self.ids[r].clone());
            times.push(self.times[r]);
            events.push(self.events[r]);
            covs.extend_from_slice(self.covariate_row(r));
        }
        SurvivalDataset::new(ids, times, events, covs, self.cov_names.clone())
    }
}

// ── CSV schema and IO ───────────────────────────────────────────────────────

/// Maps CSV header names to dataset roles.
///
/// An empty `covariates` list means "every column not otherwise mapped, in
/// header order".
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSchema {
    /// Optional id column; row numbers are used when absent.
    pub id: Option<String>,
    /// Observed-time column.
    pub time: String,
    /// Event-indicator column (values must parse to 0 or 1).
    pub event: String,
    /// Covariate columns; empty means all remaining columns.
    #[serde(default)]
    pub covariates: Vec<String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            id: Some("id".to_string()),
            time: "time".to_string(),
            event: "event".to_string(),
            covariates: Vec::new(),
        }
    }
}

fn header_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::invalid(format!("CSV is missing required column '{name}'")))
}

/// Loads a dataset from a headered CSV file using `schema`.
///
/// Every mapped cell must be present and parseable; offending rows are
/// collected and reported together (1-based data row numbers).
pub fn load_dataset(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<SurvivalDataset> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| {
        Error::invalid(format!("cannot open dataset '{}': {e}", path.display()))
    })?;
    let headers = reader.headers()?.clone();

    let id_col = schema.id.as_deref().map(|c| header_index(&headers, c)).transpose()?;
    let time_col = header_index(&headers, &schema.time)?;
    let event_col = header_index(&headers, &schema.event)?;

    let cov_cols: Vec<usize> = if schema.covariates.is_empty() {
        (0..headers.len())
            .filter(|&i| Some(i) != id_col && i != time_col && i != event_col)
            .collect()
    } else {
        schema
            .covariates
            .iter()
            .map(|c| header_index(&headers, c))
            .collect::<Result<Vec<_>>>()?
    };
    let cov_names: Vec<String> = cov_cols.iter().map(|&i| headers[i].to_string()).collect();

    let mut ids = Vec::new();
    let mut times = Vec::new();
    let mut events = Vec::new();
    let mut covs = Vec::new();
    let mut bad_rows: Vec<String> = Vec::new();

    for (row_ix, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = row_ix + 1;
        let mut row_err = |msg: String| bad_rows.push(format!("row {row_no}: {msg}"));

        let id = match id_col {
            Some(c) => match record.get(c) {
                Some(s) if !s.trim().is_empty() => s.trim().to_string(),
                _ => {
                    row_err("missing id".to_string());
                    continue;
                }
            },
            None => row_no.to_string(),
        };

        let parse_f64 = |cell: Option<&str>, what: &str| -> std::result::Result<f64, String> {
            let s = cell.ok_or_else(|| format!("missing {what}"))?.trim();
            if s.is_empty() {
                return Err(format!("blank {what}"));
            }
            s.parse::<f64>().map_err(|_| format!("unparseable {what} '{s}'"))
        };

        let time = match parse_f64(record.get(time_col), "time") {
            Ok(t) => t,
            Err(m) => {
                row_err(m);
                continue;
            }
        };
        let event = match parse_f64(record.get(event_col), "event") {
            Ok(v) if v == 0.0 => false,
            Ok(v) if v == 1.0 => true,
            Ok(v) => {
                row_err(format!("event value {v} not in {{0, 1}}"));
                continue;
            }
            Err(m) => {
                row_err(m);
                continue;
            }
        };
        let mut row_covs = Vec::with_capacity(cov_cols.len());
        let mut cov_ok = true;
        for (&c, name) in cov_cols.iter().zip(&cov_names) {
            match parse_f64(record.get(c), &format!("covariate '{name}'")) {
                Ok(v) => row_covs.push(v),
                Err(m) => {
                    row_err(m);
                    cov_ok = false;
                    break;
                }
            }
        }
        if !cov_ok {
            continue;
        }

        ids.push(id);
        times.push(time);
        events.push(event);
        covs.extend_from_slice(&row_covs);
    }

    if !bad_rows.is_empty() {
        return Err(Error::invalid(format!(
            "dataset '{}' has {} bad row(s): {}",
            path.display(),
            bad_rows.len(),
            bad_rows.join("; ")
        )));
    }
    SurvivalDataset::new(ids, times, events, covs, cov_names)
}

/// Writes a dataset as a headered CSV (`id,time,event,<covariates...>`).
pub fn write_dataset(path: impl AsRef<Path>, data: &SurvivalDataset) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header = vec!["id".to_string(), "time".to_string(), "event".to_string()];
    header.extend(data.cov_names().iter().cloned());
    writer.write_record(&header)?;
    for i in 0..data.n() {
        let mut row = vec![
            data.ids()[i].clone(),
            format!("{}", data.times()[i]),
            if data.events()[i] { "1" } else { "0" }.to_string(),
        ];
        for &x in data.covariate_row(i) {
            row.push(format!("{x}"));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn toy() -> SurvivalDataset {
        SurvivalDataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![1.0, 2.0, 3.0],
            vec![true, false, true],
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            vec!["x1".into(), "x2".into()],
        )
        .unwrap()
    }

    #[test]
    fn accessors_work() {
        let d = toy();
        assert_eq!(d.n(), 3);
        assert_eq!(d.cov_dim(), 2);
        assert_eq!(d.covariate_row(1), &[0.3, 0.4]);
        assert!(!d.fully_observed());
        assert_eq!(d.max_time(), 3.0);
    }

    #[test]
    fn rejects_duplicate_ids() {
        let err = SurvivalDataset::new(
            vec!["a".into(), "a".into()],
            vec![1.0, 2.0],
            vec![true, true],
            vec![],
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate id"));
    }

    #[test]
    fn rejects_negative_time() {
        let err = SurvivalDataset::new(
            vec!["a".into()],
            vec![-1.0],
            vec![true],
            vec![],
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("finite and >= 0"));
    }

    #[test]
    fn subset_keeps_order() {
        let d = toy();
        let s = d.subset(&[2, 0]).unwrap();
        assert_eq!(s.ids(), &["c".to_string(), "a".to_string()]);
        assert_eq!(s.covariate_row(0), &[0.5, 0.6]);
    }

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        write_dataset(&path, &toy()).unwrap();
        let back = load_dataset(&path, &CsvSchema::default()).unwrap();
        assert_eq!(back.ids(), toy().ids());
        assert_eq!(back.times(), toy().times());
        assert_eq!(back.events(), toy().events());
        assert_eq!(back.covariate_row(2), toy().covariate_row(2));
    }

    #[test]
    fn blank_cell_reports_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "id,time,event,x1").unwrap();
        writeln!(f, "a,1.0,1,0.5").unwrap();
        writeln!(f, "b,2.0,1,").unwrap();
        writeln!(f, "c,oops,1,0.5").unwrap();
        drop(f);
        let err = load_dataset(&path, &CsvSchema::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2"), "missing row 2 in: {msg}");
        assert!(msg.contains("row 3"), "missing row 3 in: {msg}");
        assert!(msg.contains("blank covariate"), "msg: {msg}");
    }

    #[test]
    fn event_must_be_binary() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        std::fs::write(&path, "id,time,event,x1\na,1.0,2,0.5\n").unwrap();
        let err = load_dataset(&path, &CsvSchema::default()).unwrap_err();
        assert!(err.to_string().contains("not in {0, 1}"));
    }

    #[test]
    fn covariates_default_to_remaining_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "id,time,event,x1,x2\na,1.0,1,0.5,0.7\n").unwrap();
        let d = load_dataset(&path, &CsvSchema::default()).unwrap();
        assert_eq!(d.cov_names(), &["x1".to_string(), "x2".to_string()]);
    }

    #[test]
    fn missing_column_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "id,when,event,x1\na,1.0,1,0.5\n").unwrap();
        let err = load_dataset(&path, &CsvSchema::default()).unwrap_err();
        assert!(err.to_string().contains("missing required column 'time'"));
    }
}
