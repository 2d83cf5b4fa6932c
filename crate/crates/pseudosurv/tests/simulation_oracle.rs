//! Monte Carlo oracle for the synthetic data generator.
//!
//! The closed-form survival function and the sampling path are implemented
//! separately (inverse transform vs direct evaluation); large-sample
//! agreement between the two pins the generator's wiring, and realized
//! censoring fractions pin the calibration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use pseudosurv::sim::{
    calibrate_censoring, case_config, covariate_link, simulate, true_survival,
    true_survival_time, CalibrationOptions, SimConfig,
};

/// Draws event times for a fixed covariate row by inverse transform and
/// returns the empirical survival at each requested time.
fn empirical_survival(
    config: &SimConfig,
    covariates: &[f64],
    times: &[f64],
    draws: usize,
    seed: u64,
) -> Vec<f64> {
    let f = covariate_link(config.rho, covariates);
    let a = if config.nonproportional {
        config.a + covariates[covariates.len() - 1]
    } else {
        config.a
    };
    let e = (config.beta * f).exp();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut above = vec![0usize; times.len()];
    for _ in 0..draws {
        let u = 1.0 - rng.gen::<f64>();
        let t_star = config.b * (-u.ln() / e).exp_m1().powf(1.0 / a);
        for (k, &t) in times.iter().enumerate() {
            if t_star > t {
                above[k] += 1;
            }
        }
    }
    above.iter().map(|&c| c as f64 / draws as f64).collect()
}

#[test]
fn closed_form_survival_matches_monte_carlo_at_deciles() {
    let config = case_config(1).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(61);
    let draws = 1_000_000;
    for profile in 0..3 {
        let covariates: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut rng)).collect();
        let levels: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        let times: Vec<f64> = levels
            .iter()
            .map(|&q| true_survival_time(&config, &covariates, q).unwrap())
            .collect();
        let empirical = empirical_survival(&config, &covariates, &times, draws, 1000 + profile);
        for (k, (&level, &emp)) in levels.iter().zip(&empirical).enumerate() {
            let closed = true_survival(&config, &covariates, times[k]);
            assert!(
                (closed - level).abs() < 1e-12,
                "inverse broke at level {level}"
            );
            assert!(
                (emp - level).abs() < 0.005,
                "profile {profile} decile {k}: Monte Carlo {emp} vs {level}"
            );
        }
    }
}

#[test]
fn nonproportional_group_survival_matches_monte_carlo() {
    let mut config = case_config(6).unwrap();
    config.n = 10;
    // Fixed profile in group z2 = 1: the shape becomes a + 1.
    let covariates = vec![0.5, -0.3, 0.8, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0];
    let times = [0.5, 1.0, 2.0, 4.0];
    let emp = empirical_survival(&config, &covariates, &times, 400_000, 5);
    for (k, &t) in times.iter().enumerate() {
        let closed = true_survival(&config, &covariates, t);
        assert!(
            (emp[k] - closed).abs() < 0.005,
            "t={t}: Monte Carlo {} vs closed form {closed}",
            emp[k]
        );
    }
}

#[test]
fn calibrated_scenarios_hit_their_censoring_targets() {
    // Light pilot for speed; the acceptance suite runs the full size.
    let options = CalibrationOptions {
        pilot_n: 40_000,
        tolerance: 0.01,
    };
    for case in [1u8, 2, 7] {
        let mut config = case_config(case).unwrap();
        config.n = 40_000;
        let calibrated = calibrate_censoring(&config, &options, 17).unwrap();
        let sim = simulate(&calibrated, 9090).unwrap();
        let censored =
            sim.dataset.events().iter().filter(|&&e| !e).count() as f64 / config.n as f64;
        assert!(
            (censored - config.target_censoring).abs() <= 0.02,
            "case {case}: realized {censored} vs target {}",
            config.target_censoring
        );
    }
}

#[test]
fn covariate_dependent_censoring_actually_depends_on_covariates() {
    // Split subjects by the median of f(X): under exponential censoring the
    // censoring times are independent of the link; under the dependent
    // mechanism, subjects with larger f(X) are censored earlier.
    let options = CalibrationOptions {
        pilot_n: 20_000,
        tolerance: 0.01,
    };
    let mut config = case_config(7).unwrap();
    config.n = 20_000;
    let calibrated = calibrate_censoring(&config, &options, 3).unwrap();
    let sim = simulate(&calibrated, 77).unwrap();

    let mut fs: Vec<f64> = sim.latent.iter().map(|l| l.f_x).collect();
    fs.sort_by(f64::total_cmp);
    let median = fs[fs.len() / 2];
    let (mut lo_sum, mut lo_n, mut hi_sum, mut hi_n) = (0.0, 0usize, 0.0, 0usize);
    for l in &sim.latent {
        // Compare raw censoring draws, not observed times, to avoid
        // confounding with the event process.
        let c = l.c.min(100.0);
        if l.f_x <= median {
            lo_sum += c;
            lo_n += 1;
        } else {
            hi_sum += c;
            hi_n += 1;
        }
    }
    let lo_mean = lo_sum / lo_n as f64;
    let hi_mean = hi_sum / hi_n as f64;
    assert!(
        hi_mean < lo_mean,
        "high-link group should censor earlier: {hi_mean} vs {lo_mean}"
    );

    // Exponential censoring shows no such split.
    let mut exp_config = case_config(2).unwrap();
    exp_config.n = 20_000;
    let exp_cal = calibrate_censoring(
        &exp_config,
        &options,
        3,
    )
    .unwrap();
    let exp_sim = simulate(&exp_cal, 77).unwrap();
    let mut fs2: Vec<f64> = exp_sim.latent.iter().map(|l| l.f_x).collect();
    fs2.sort_by(f64::total_cmp);
    let median2 = fs2[fs2.len() / 2];
    let (mut lo2, mut ln2, mut hi2, mut hn2) = (0.0, 0usize, 0.0, 0usize);
    for l in &exp_sim.latent {
        let c = l.c.min(100.0);
        if l.f_x <= median2 {
            lo2 += c;
            ln2 += 1;
        } else {
            hi2 += c;
            hn2 += 1;
        }
    }
    let ratio = (lo2 / ln2 as f64) / (hi2 / hn2 as f64);
    assert!(
        (ratio - 1.0).abs() < 0.05,
        "exponential censoring should be link-free, ratio {ratio}"
    );
}

#[test]
fn case_five_appends_noise_covariates_without_changing_truth() {
    let c1 = case_config(1).unwrap();
    let c5 = case_config(5).unwrap();
    assert_eq!(c5.d, 50);
    // Truth depends only on the first three covariates and the link matrix.
    let covs_short: Vec<f64> = vec![0.7, -0.4, 1.1];
    let mut covs_long = covs_short.clone();
    covs_long.extend(std::iter::repeat(9.9).take(47));
    let s1 = true_survival(&c1, &covs_short, 2.0);
    let s5 = true_survival(&c5, &covs_long, 2.0);
    assert!((s1 - s5).abs() < 1e-15);
}
