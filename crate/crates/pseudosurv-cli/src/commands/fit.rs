//! `fit`: train the Bayesian network on pseudo values, save a checkpoint.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use pseudosurv::data::load_dataset;
use pseudosurv::pipeline::fit_survival_model;
use pseudosurv::pseudo::read_pseudo_csv;

use crate::config::{self, FitTaskConfig};
use crate::FitArgs;

pub fn run(args: FitArgs) -> Result<()> {
    let mut cfg: FitTaskConfig = config::load(args.common.config.as_deref())?;
    config::apply(&mut cfg.seed, args.common.seed);
    if args.dataset.is_some() {
        cfg.dataset = args.dataset;
    }
    if args.pseudo.is_some() {
        cfg.pseudo = args.pseudo;
    }
    config::apply(
        &mut cfg.model.encoding,
        args.encoding.map(|e| e.to_library()),
    );
    config::apply(&mut cfg.model.advi.iterations, args.advi_iterations);
    config::apply(&mut cfg.model.point.iterations, args.point_iterations);

    let out = &args.common.out;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory '{}'", out.display()))?;
    config::echo(out, &cfg)?;

    let dataset_path = cfg
        .dataset
        .as_deref()
        .ok_or_else(|| anyhow::anyhow!("no dataset: pass --dataset or set it in the config"))?;
    let pseudo_path = cfg
        .pseudo
        .as_deref()
        .ok_or_else(|| anyhow::anyhow!("no pseudo file: pass --pseudo or set it in the config"))?;
    let data = load_dataset(dataset_path, &cfg.schema)
        .with_context(|| format!("cannot load dataset '{}'", dataset_path.display()))?;
    let pseudo = read_pseudo_csv(pseudo_path)
        .with_context(|| format!("cannot load pseudo values '{}'", pseudo_path.display()))?;

    let outcome = fit_survival_model(&data, &pseudo, &cfg.model, cfg.seed)?;
    let artifact_path = out.join("artifact.json");
    outcome.artifact.save(&artifact_path)?;
    write_traces(&out.join("elbo_trace.csv"), "elbo", &outcome.elbo_traces)?;
    write_traces(&out.join("point_loss.csv"), "loss", &outcome.point_loss_traces)?;

    let total_iters: usize = outcome.elbo_traces.iter().map(Vec::len).sum();
    println!(
        "fit: {} state(s), {} variational iterations recorded, checkpoint at {}",
        outcome.artifact.states.len(),
        total_iters,
        artifact_path.display()
    );
    Ok(())
}

/// Writes per-state optimizer traces as `state,iteration,<value>` rows.
fn write_traces(path: &Path, value_name: &str, traces: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write '{}'", path.display()))?;
    w.write_record(["state", "iteration", value_name])?;
    for (s, trace) in traces.iter().enumerate() {
        for (i, v) in trace.iter().enumerate() {
            w.write_record([format!("{s}"), format!("{i}"), format!("{v}")])?;
        }
    }
    w.flush()?;
    Ok(())
}
