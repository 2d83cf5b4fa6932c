//! `pseudo`: turn a right-censored dataset into pseudo survival values.

use std::fs;

use anyhow::{bail, Context, Result};

use pseudosurv::data::{load_dataset, SurvivalDataset};
use pseudosurv::grid::TimeGrid;
use pseudosurv::pseudo::{
    conditional_ipcw_pseudo, ipcw_pseudo, jackknife_pseudo_with, write_conditional_pseudo_csv,
    write_pseudo_csv,
};
use pseudosurv::weights::{
    censoring_weights, load_weight_table, CensoringModel, WeightOptions, WeightTable,
};

use crate::config::{self, PseudoConfig, PseudoVariant, WeightSource};
use crate::PseudoArgs;

pub fn run(args: PseudoArgs) -> Result<()> {
    let mut cfg: PseudoConfig = config::load(args.common.config.as_deref())?;
    config::apply(&mut cfg.seed, args.common.seed);
    if args.input.is_some() {
        cfg.input = args.input;
    }
    config::apply(&mut cfg.variant, args.variant);
    config::apply(&mut cfg.estimator, args.estimator);
    config::apply(&mut cfg.weights, args.weights);
    if args.weight_file.is_some() {
        cfg.weight_file = args.weight_file;
    }
    if !args.stratify_columns.is_empty() {
        cfg.stratify_columns = args.stratify_columns;
    }
    config::apply(&mut cfg.stratify_bins, args.stratify_bins);
    config::apply(&mut cfg.g_floor, args.g_floor);
    if !args.grid.is_empty() {
        cfg.grid = Some(args.grid);
    }

    let out = &args.common.out;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory '{}'", out.display()))?;
    config::echo(out, &cfg)?;

    let input = cfg
        .input
        .as_deref()
        .ok_or_else(|| anyhow::anyhow!("no input dataset: pass --input or set it in the config"))?;
    let data = load_dataset(input, &cfg.schema)
        .with_context(|| format!("cannot load dataset '{}'", input.display()))?;

    let grid = match &cfg.grid {
        Some(points) => TimeGrid::new(points.clone())?,
        None => super::decile_grid(&data)?,
    };

    let path = out.join("pseudo.csv");
    let rows_written = match cfg.variant {
        PseudoVariant::Plain => {
            let pseudo = jackknife_pseudo_with(&data, &grid, cfg.estimator.to_library())?;
            write_pseudo_csv(&path, &pseudo)?;
            data.n() * grid.len()
        }
        PseudoVariant::Ipcw => {
            let table = weight_table(&cfg, &data)?;
            let pseudo = ipcw_pseudo(&data, &grid, &table)?;
            write_pseudo_csv(&path, &pseudo)?;
            data.n() * grid.len()
        }
        PseudoVariant::Conditional => {
            let table = weight_table(&cfg, &data)?;
            let pseudo = conditional_ipcw_pseudo(&data, &grid, &table)?;
            let rows: usize = pseudo.intervals.iter().map(|iv| iv.ids.len()).sum();
            write_conditional_pseudo_csv(&path, &pseudo)?;
            rows
        }
    };

    println!(
        "pseudo: wrote {rows_written} values over {} grid points to {}",
        grid.len(),
        path.display()
    );
    Ok(())
}

/// Builds the weight table the weighted variants asked for.
fn weight_table(cfg: &PseudoConfig, data: &SurvivalDataset) -> Result<WeightTable> {
    let opts = WeightOptions { g_floor: cfg.g_floor };
    let model = match cfg.weights {
        WeightSource::Unit => CensoringModel::Unit,
        WeightSource::Marginal => CensoringModel::MarginalReverseKm,
        WeightSource::Stratified => {
            if cfg.stratify_columns.is_empty() {
                bail!("the stratified weight source needs at least one column in stratify_columns");
            }
            CensoringModel::StratifiedReverseKm {
                columns: cfg.stratify_columns.clone(),
                bins: cfg.stratify_bins,
            }
        }
        WeightSource::External => {
            let path = cfg.weight_file.as_deref().ok_or_else(|| {
                anyhow::anyhow!("the external weight source needs --weight-file")
            })?;
            return load_weight_table(path, data)
                .with_context(|| format!("cannot load weight table '{}'", path.display()));
        }
    };
    Ok(censoring_weights(data, &model, &opts)?)
}
