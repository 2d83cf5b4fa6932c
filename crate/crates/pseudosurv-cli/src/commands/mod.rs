//! Subcommand implementations plus the pipeline pieces they share.

pub mod evaluate;
pub mod fit;
pub mod predict;
pub mod pseudo;
pub mod simulate;

use anyhow::{bail, Context, Result};

use pseudosurv::data::SurvivalDataset;
use pseudosurv::grid::{decile_probs, survival_quantiles, TimeGrid};
use pseudosurv::km::kaplan_meier;
use pseudosurv::rng::derive_seed;
use pseudosurv::sim::{
    calibrate_censoring, case_config, true_survival, CalibrationOptions, CensoringKind, SimConfig,
};
use pseudosurv::weights::{event_times, WeightTable};

use crate::config::stage;

/// Resolves a benchmark scenario: case defaults, optional subject-count
/// override, and censoring calibration seeded from the command seed.
pub fn build_scenario(
    case: u8,
    n_override: Option<usize>,
    calibrate: bool,
    pilot_n: usize,
    seed: u64,
) -> Result<SimConfig> {
    let mut scenario = case_config(case)?;
    if let Some(n) = n_override {
        if n == 0 {
            bail!("subject-count override must be positive");
        }
        scenario.n = n;
    }
    if calibrate {
        let options = CalibrationOptions {
            pilot_n,
            ..CalibrationOptions::default()
        };
        scenario = calibrate_censoring(&scenario, &options, derive_seed(seed, stage::CALIBRATE))
            .context("censoring calibration failed")?;
    }
    Ok(scenario)
}

/// Survival-decile evaluation grid of a dataset (unattainable deciles are
/// dropped, as reported by the quantile routine).
pub fn decile_grid(data: &SurvivalDataset) -> Result<TimeGrid> {
    let km = kaplan_meier(data)?;
    let q = survival_quantiles(&km, &decile_probs())?;
    Ok(q.grid)
}

/// Weight table from the generator's closed-form censoring survival.
///
/// Random censoring is exponential or from the event-time family with its
/// own scale; both have a continuous survival function `G`, so the left
/// limit at an event time equals the value there. The administrative cap
/// censors everyone at the same time beyond the evaluation horizon and does
/// not enter the weights.
pub fn oracle_weight_table(
    scenario: &SimConfig,
    data: &SurvivalDataset,
    g_floor: f64,
) -> Result<WeightTable> {
    if !(g_floor > 0.0 && g_floor <= 1.0) {
        bail!("g_floor must lie in (0, 1], got {g_floor}");
    }
    let times = event_times(data);
    let n = data.n();
    let mut weights = Vec::with_capacity(n * times.len());
    // The covariate-dependent mechanism draws from the event-time family
    // with the baseline shape (no group shift), which is exactly the truth
    // of a proportional-hazards copy of the scenario with the censoring
    // scale in place of the event scale.
    let censoring_truth = |row: &[f64], u: f64| -> f64 {
        match scenario.censoring {
            CensoringKind::Exponential { rate } => (-rate * u).exp(),
            CensoringKind::CovariateDependent { scale } => {
                let copy = SimConfig {
                    b: scale,
                    nonproportional: false,
                    ..scenario.clone()
                };
                true_survival(&copy, row, u)
            }
        }
    };
    for i in 0..n {
        let row = data.covariate_row(i);
        for &u in &times {
            let g = censoring_truth(row, u).max(g_floor);
            weights.push(1.0 / g);
        }
    }
    Ok(WeightTable::new(times, weights, n)?)
}
