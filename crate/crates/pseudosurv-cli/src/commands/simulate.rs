//! `simulate`: generate a benchmark cohort and split it for training.

use std::fs;

use anyhow::{Context, Result};

use pseudosurv::data::write_dataset;
use pseudosurv::metrics::train_test_split;
use pseudosurv::rng::derive_seed;
use pseudosurv::sim::{simulate, write_latent_csv};

use crate::config::{self, stage, SimulateConfig};
use crate::SimulateArgs;

pub fn run(args: SimulateArgs) -> Result<()> {
    let mut cfg: SimulateConfig = config::load(args.common.config.as_deref())?;
    config::apply(&mut cfg.seed, args.common.seed);
    config::apply(&mut cfg.case, args.case);
    if args.n.is_some() {
        cfg.n = args.n;
    }
    config::apply(&mut cfg.calibrate, args.calibrate);
    config::apply(&mut cfg.pilot_n, args.pilot_n);

    let out = &args.common.out;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory '{}'", out.display()))?;
    config::echo(out, &cfg)?;

    let scenario =
        super::build_scenario(cfg.case, cfg.n, cfg.calibrate, cfg.pilot_n, cfg.seed)?;
    let sim = simulate(&scenario, cfg.seed)?;
    let data = &sim.dataset;

    write_dataset(out.join("dataset.csv"), data)?;
    write_latent_csv(&out.join("latent.csv"), &sim)?;

    let (train, test) = train_test_split(data.n(), derive_seed(cfg.seed, stage::SPLIT))?;
    write_dataset(out.join("train.csv"), &data.subset(&train)?)?;
    write_dataset(out.join("test.csv"), &data.subset(&test)?)?;

    let censored = data.events().iter().filter(|&&e| !e).count();
    println!(
        "simulate: case {} wrote {} subjects ({:.1}% censored) to {}; split {} train / {} test",
        cfg.case,
        data.n(),
        100.0 * censored as f64 / data.n() as f64,
        out.display(),
        train.len(),
        test.len(),
    );
    Ok(())
}
