//! `predict`: posterior survival curves for new subjects from a checkpoint.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use pseudosurv::data::CsvSchema;
use pseudosurv::pipeline::{posterior_predict, write_prediction_csv, FitArtifact, PosteriorPrediction};

use crate::config::{self, PredictConfig};
use crate::plot::{survival_svg, CurveGroup};
use crate::PredictArgs;

pub fn run(args: PredictArgs) -> Result<()> {
    let mut cfg: PredictConfig = config::load(args.common.config.as_deref())?;
    config::apply(&mut cfg.seed, args.common.seed);
    if args.artifact.is_some() {
        cfg.artifact = args.artifact;
    }
    if args.input.is_some() {
        cfg.input = args.input;
    }
    config::apply(&mut cfg.draws, args.draws);
    if args.plot {
        cfg.plot = true;
    }
    if args.stratify_by.is_some() {
        cfg.stratify_by = args.stratify_by;
        cfg.plot = true;
    }

    let out = &args.common.out;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory '{}'", out.display()))?;
    config::echo(out, &cfg)?;

    let artifact_path = cfg
        .artifact
        .as_deref()
        .ok_or_else(|| anyhow::anyhow!("no checkpoint: pass --artifact or set it in the config"))?;
    let input = cfg
        .input
        .as_deref()
        .ok_or_else(|| anyhow::anyhow!("no input subjects: pass --input or set it in the config"))?;
    let artifact = FitArtifact::load(artifact_path)
        .with_context(|| format!("cannot load checkpoint '{}'", artifact_path.display()))?;

    let (ids, names, rows) = read_subjects(input, &cfg.schema)?;
    if rows.first().map(Vec::len).unwrap_or(0) != artifact.standardizer.dim() {
        bail!(
            "checkpoint expects {} covariates, '{}' provides {} ({})",
            artifact.standardizer.dim(),
            input.display(),
            rows.first().map(Vec::len).unwrap_or(0),
            names.join(",")
        );
    }

    let pred = posterior_predict(&artifact, &ids, &rows, cfg.draws, cfg.seed)?;
    let csv_path = out.join("prediction.csv");
    write_prediction_csv(&csv_path, &pred)?;

    if cfg.plot {
        let groups = curve_groups(&pred, cfg.stratify_by.as_deref(), &names, &rows)?;
        fs::write(out.join("plot.svg"), survival_svg(&groups))?;
    }

    println!(
        "predict: {} subjects x {} grid points ({} draws) to {}",
        pred.n(),
        pred.grid().len(),
        cfg.draws,
        csv_path.display()
    );
    Ok(())
}

/// Reads new subjects from a CSV: an id column (row numbers when missing)
/// plus covariate columns. Time and event columns are skipped if present, so
/// files written by `simulate` can be fed in directly.
fn read_subjects(
    path: &Path,
    schema: &CsvSchema,
) -> Result<(Vec<String>, Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open subjects file '{}'", path.display()))?;
    let headers = reader.headers()?.clone();
    let position = |name: &str| headers.iter().position(|h| h == name);

    let id_col = schema.id.as_deref().and_then(position);
    let cov_cols: Vec<(usize, String)> = if schema.covariates.is_empty() {
        let skip = [
            schema.id.clone().unwrap_or_default(),
            schema.time.clone(),
            schema.event.clone(),
        ];
        headers
            .iter()
            .enumerate()
            .filter(|(_, h)| !skip.iter().any(|s| s == h))
            .map(|(i, h)| (i, h.to_string()))
            .collect()
    } else {
        schema
            .covariates
            .iter()
            .map(|name| {
                position(name)
                    .map(|i| (i, name.clone()))
                    .ok_or_else(|| anyhow::anyhow!("subjects file is missing column '{name}'"))
            })
            .collect::<Result<_>>()?
    };
    if cov_cols.is_empty() {
        bail!("subjects file '{}' has no covariate columns", path.display());
    }

    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (ix, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = ix + 1;
        ids.push(match id_col {
            Some(c) => record
                .get(c)
                .ok_or_else(|| anyhow::anyhow!("row {row_no}: missing id"))?
                .trim()
                .to_string(),
            None => format!("{row_no}"),
        });
        let mut row = Vec::with_capacity(cov_cols.len());
        for (c, name) in &cov_cols {
            let cell = record
                .get(*c)
                .ok_or_else(|| anyhow::anyhow!("row {row_no}: missing column '{name}'"))?;
            let value: f64 = cell.trim().parse().map_err(|_| {
                anyhow::anyhow!("row {row_no}: '{name}' value '{cell}' is not a number")
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("subjects file '{}' has no rows", path.display());
    }
    let names = cov_cols.into_iter().map(|(_, n)| n).collect();
    Ok((ids, names, rows))
}

/// Splits predictions into plot groups: one per value of a binary
/// stratifier, or a single overall group. Curves are pointwise averages of
/// the subjects' means and interval bounds.
fn curve_groups(
    pred: &PosteriorPrediction,
    stratify_by: Option<&str>,
    names: &[String],
    rows: &[Vec<f64>],
) -> Result<Vec<CurveGroup>> {
    let grid = pred.grid().to_vec();
    let groups: Vec<(String, Vec<usize>)> = match stratify_by {
        None => vec![("all subjects".to_string(), (0..pred.n()).collect())],
        Some(column) => {
            let c = names
                .iter()
                .position(|n| n == column)
                .ok_or_else(|| anyhow::anyhow!("stratifier '{column}' is not a covariate"))?;
            let mut values: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            if values.len() != 2 {
                bail!(
                    "stratifier '{column}' must be binary, found {} distinct values",
                    values.len()
                );
            }
            values
                .iter()
                .map(|&v| {
                    let members = (0..pred.n()).filter(|&i| rows[i][c] == v).collect();
                    (format!("{column} = {v}"), members)
                })
                .collect()
        }
    };

    Ok(groups
        .into_iter()
        .map(|(label, members)| {
            let nf = members.len() as f64;
            let avg = |f: &dyn Fn(usize, usize) -> f64| -> Vec<f64> {
                (0..grid.len())
                    .map(|j| members.iter().map(|&i| f(i, j)).sum::<f64>() / nf)
                    .collect()
            };
            CurveGroup {
                label,
                grid: grid.clone(),
                mean: avg(&|i, j| pred.mean(i, j)),
                lower: avg(&|i, j| pred.lower(i, j)),
                upper: avg(&|i, j| pred.upper(i, j)),
            }
        })
        .collect())
}
