//! `evaluate`: replicated simulate-fit-predict studies with aggregate
//! bias, error, coverage, and interval-width reporting.

use std::fs;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use pseudosurv::metrics::{
    aggregate, evaluate_replicate, train_test_split, write_metric_csv, write_metric_json,
    ReplicateSummary,
};
use pseudosurv::pipeline::{fit_survival_model, posterior_predict};
use pseudosurv::pseudo::{ipcw_pseudo, jackknife_pseudo_with, SurvivalEstimator};
use pseudosurv::rng::derive_seed;
use pseudosurv::sim::{simulate, true_survival};
use pseudosurv::weights::{censoring_weights, CensoringModel, WeightOptions};

use crate::config::{self, stage, EvalPipeline, EvaluateConfig};
use crate::EvaluateArgs;

pub fn run(args: EvaluateArgs) -> Result<()> {
    let mut cfg: EvaluateConfig = config::load(args.common.config.as_deref())?;
    config::apply(&mut cfg.seed, args.common.seed);
    config::apply(&mut cfg.case, args.case);
    if args.n.is_some() {
        cfg.n = args.n;
    }
    config::apply(&mut cfg.replicates, args.replicates);
    if !args.replicate_seeds.is_empty() {
        cfg.replicate_seeds = Some(args.replicate_seeds);
    }
    config::apply(&mut cfg.pipeline, args.pipeline);
    config::apply(&mut cfg.draws, args.draws);
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    config::apply(&mut cfg.model.advi.iterations, args.advi_iterations);
    config::apply(&mut cfg.model.point.iterations, args.point_iterations);

    let out = &args.common.out;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory '{}'", out.display()))?;
    config::echo(out, &cfg)?;

    if cfg.replicates == 0 {
        bail!("evaluate needs at least one replicate");
    }
    let seeds: Vec<u64> = match &cfg.replicate_seeds {
        Some(list) => {
            if list.len() != cfg.replicates {
                bail!(
                    "{} replicate seeds for {} replicates",
                    list.len(),
                    cfg.replicates
                );
            }
            list.clone()
        }
        None => (0..cfg.replicates as u64)
            .map(|r| derive_seed(cfg.seed, r))
            .collect(),
    };

    // Replicates run in parallel; results are collected by replicate index,
    // so the aggregate never depends on scheduling.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .context("cannot build worker pool")?;
    let results: Vec<Result<ReplicateSummary>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| run_replicate(&cfg, seed))
            .collect()
    });
    let mut summaries = Vec::with_capacity(results.len());
    for (r, result) in results.into_iter().enumerate() {
        summaries.push(result.with_context(|| format!("replicate {r} failed"))?);
    }

    let report = aggregate(&summaries)?;
    write_metric_csv(&out.join("metric_report.csv"), &report)?;
    write_metric_json(&out.join("metric_report.json"), &report)?;

    let mean_abs_bias =
        report.bias.iter().map(|b| b.abs()).sum::<f64>() / report.bias.len() as f64;
    let mean_coverage = report.coverage.iter().sum::<f64>() / report.coverage.len() as f64;
    println!(
        "evaluate: {} replicates, mean |bias| {:.4}, mean coverage {:.3}, report at {}",
        report.n_replicates,
        mean_abs_bias,
        mean_coverage,
        out.join("metric_report.csv").display()
    );
    Ok(())
}

/// One replicate: simulate, split, pseudo values, fit, predict held-out
/// subjects, and score against the closed-form truth.
fn run_replicate(cfg: &EvaluateConfig, seed: u64) -> Result<ReplicateSummary> {
    let scenario = super::build_scenario(cfg.case, cfg.n, true, cfg.pilot_n, seed)?;
    let sim = simulate(&scenario, seed)?;
    let data = &sim.dataset;

    let (train_ix, test_ix) = train_test_split(data.n(), derive_seed(seed, stage::SPLIT))?;
    let train = data.subset(&train_ix)?;
    let test = data.subset(&test_ix)?;
    let grid = super::decile_grid(&train)?;

    let opts = WeightOptions { g_floor: cfg.g_floor };
    let pseudo = match cfg.pipeline {
        EvalPipeline::Plain => {
            jackknife_pseudo_with(&train, &grid, SurvivalEstimator::ProductLimit)?
        }
        EvalPipeline::PlainExpHazard => {
            jackknife_pseudo_with(&train, &grid, SurvivalEstimator::ExpCumHazard)?
        }
        EvalPipeline::IpcwMarginal => {
            let table = censoring_weights(&train, &CensoringModel::MarginalReverseKm, &opts)?;
            ipcw_pseudo(&train, &grid, &table)?
        }
        EvalPipeline::IpcwStratified => {
            let model = CensoringModel::StratifiedReverseKm {
                columns: cfg.stratify_columns.clone(),
                bins: cfg.stratify_bins,
            };
            let table = censoring_weights(&train, &model, &opts)?;
            ipcw_pseudo(&train, &grid, &table)?
        }
        EvalPipeline::IpcwOracle => {
            let table = super::oracle_weight_table(&scenario, &train, cfg.g_floor)?;
            ipcw_pseudo(&train, &grid, &table)?
        }
    };

    let outcome = fit_survival_model(&train, &pseudo, &cfg.model, derive_seed(seed, stage::FIT))?;
    let test_rows: Vec<Vec<f64>> = (0..test.n()).map(|i| test.covariate_row(i).to_vec()).collect();
    let pred = posterior_predict(
        &outcome.artifact,
        test.ids(),
        &test_rows,
        cfg.draws,
        derive_seed(seed, stage::PREDICT),
    )?;

    let truth: Vec<Vec<f64>> = test_rows
        .iter()
        .map(|row| {
            grid.points()
                .iter()
                .map(|&t| true_survival(&scenario, row, t))
                .collect()
        })
        .collect();
    Ok(evaluate_replicate(&pred, &truth)?)
}
