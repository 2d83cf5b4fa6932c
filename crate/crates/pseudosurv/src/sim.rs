//! Synthetic right-censored survival data with known ground truth.
//!
//! Event times follow a log-logistic-type family whose survival function is
//! `S(t | X) = (1 + (t / b)^a)^(-exp(beta f(X)))` with
//! `f(X) = exp(X' V X)` computed from the first three continuous covariates
//! and `V = 0.05 [[1, rho, rho^2], [rho, 1, rho], [rho^2, rho, 1]]`.
//! Censoring is exponential, or drawn from the same family as the events so
//! that it depends on the covariates. Every subject owns an independent
//! counter-based random stream, so subject `i` receives identical draws
//! regardless of the sample size.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};

/// Censoring mechanism.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "param")]
pub enum CensoringKind {
    /// `C ~ Exponential(rate)`, independent of the covariates.
    Exponential {
        /// Hazard rate of the censoring distribution.
        rate: f64,
    },
    /// `C` from the event-time family with its own scale but the same
    /// covariate link, so censoring depends on `X`.
    CovariateDependent {
        /// Scale of the censoring distribution (analog of `b`).
        scale: f64,
    },
}

/// Full description of one simulation scenario.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Number of subjects.
    pub n: usize,
    /// Number of continuous standard-normal covariates (at least 3).
    pub d: usize,
    /// Correlation parameter of the covariate link matrix `V`.
    pub rho: f64,
    /// Event-time shape.
    pub a: f64,
    /// Event-time scale.
    pub b: f64,
    /// Coefficient on `f(X)` in the exponent.
    pub beta: f64,
    /// Administrative censoring time.
    pub admin_cap: f64,
    /// Censoring mechanism with its current parameter.
    pub censoring: CensoringKind,
    /// Overall censored fraction the scenario aims for (events lost to
    /// either the censoring draw or the administrative cap).
    pub target_censoring: f64,
    /// When true, a binary group indicator `z2` is appended and the shape
    /// becomes `a + z2`, so the two groups have non-proportional hazards.
    pub nonproportional: bool,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("simulation needs n >= 1"));
        }
        if self.d < 3 {
            return Err(Error::invalid(
                "the covariate link uses the first three covariates, need d >= 3",
            ));
        }
        if !(self.a > 0.0) || !(self.b > 0.0) || !(self.admin_cap > 0.0) {
            return Err(Error::invalid("a, b, and admin_cap must be positive"));
        }
        if !(0.0..1.0).contains(&self.target_censoring) {
            return Err(Error::invalid("target_censoring must lie in [0, 1)"));
        }
        match self.censoring {
            CensoringKind::Exponential { rate } => {
                if !(rate >= 0.0) {
                    return Err(Error::invalid("censoring rate must be nonnegative"));
                }
            }
            CensoringKind::CovariateDependent { scale } => {
                if !(scale > 0.0) {
                    return Err(Error::invalid("censoring scale must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Covariate names in dataset order: `x1..xd`, `z1`, and `z2` when the
    /// scenario is non-proportional.
    pub fn cov_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.d).map(|i| format!("x{i}")).collect();
        names.push("z1".to_string());
        if self.nonproportional {
            names.push("z2".to_string());
        }
        names
    }

    /// Total covariate count.
    pub fn cov_dim(&self) -> usize {
        self.d + 1 + usize::from(self.nonproportional)
    }
}

/// The seven benchmark scenarios.
///
/// | case | n    | d  | rho  | censoring          | target | hazards |
/// |------|------|----|------|--------------------|--------|---------|
/// | 1    | 5000 | 10 | 0.50 | exponential        | 20%    | prop.   |
/// | 2    | 5000 | 10 | 0.50 | exponential        | 40%    | prop.   |
/// | 3    | 2000 | 10 | 0.50 | exponential        | 20%    | prop.   |
/// | 4    | 5000 | 10 | 0.95 | exponential        | 20%    | prop.   |
/// | 5    | 5000 | 50 | 0.50 | exponential        | 20%    | prop.   |
/// | 6    | 5000 | 10 | 0.50 | exponential        | 20%    | non-pr. |
/// | 7    | 5000 | 10 | 0.50 | covariate-dep.     | 40%    | prop.   |
///
/// The censoring parameter is a placeholder; run [`calibrate_censoring`] to
/// hit the target fraction.
pub fn case_config(case: u8) -> Result<SimConfig> {
    let base = SimConfig {
        n: 5000,
        d: 10,
        rho: 0.5,
        a: 1.1,
        b: 0.8,
        beta: 0.1,
        admin_cap: 15.0,
        censoring: CensoringKind::Exponential { rate: 0.05 },
        target_censoring: 0.2,
        nonproportional: false,
    };
    let config = match case {
        1 => base,
        2 => SimConfig {
            target_censoring: 0.4,
            ..base
        },
        3 => SimConfig { n: 2000, ..base },
        4 => SimConfig { rho: 0.95, ..base },
        5 => SimConfig { d: 50, ..base },
        6 => SimConfig {
            nonproportional: true,
            ..base
        },
        7 => SimConfig {
            censoring: CensoringKind::CovariateDependent { scale: 1.0 },
            target_censoring: 0.4,
            ..base
        },
        other => {
            return Err(Error::invalid(format!(
                "unknown scenario {other}, cases run 1 through 7"
            )))
        }
    };
    Ok(config)
}

// ── Ground truth ────────────────────────────────────────────────────────────

/// `f(X) = exp(X' V X)` over the first three covariates.
pub fn covariate_link(rho: f64, covariates: &[f64]) -> f64 {
    let (x1, x2, x3) = (covariates[0], covariates[1], covariates[2]);
    let quad = 0.05
        * (x1 * x1
            + x2 * x2
            + x3 * x3
            + 2.0 * rho * x1 * x2
            + 2.0 * rho * x2 * x3
            + 2.0 * rho * rho * x1 * x3);
    quad.exp()
}

fn effective_shape(config: &SimConfig, covariates: &[f64]) -> f64 {
    if config.nonproportional {
        config.a + covariates[covariates.len() - 1]
    } else {
        config.a
    }
}

/// True survival probability `S(t | X)`.
pub fn true_survival(config: &SimConfig, covariates: &[f64], t: f64) -> f64 {
    let f = covariate_link(config.rho, covariates);
    let a = effective_shape(config, covariates);
    let e = (config.beta * f).exp();
    (-e * (t / config.b).powf(a).ln_1p()).exp()
}

/// Inverse of [`true_survival`] in `t`: the time at which `S(t | X) = level`.
pub fn true_survival_time(config: &SimConfig, covariates: &[f64], level: f64) -> Result<f64> {
    if !(0.0 < level && level < 1.0) {
        return Err(Error::invalid("survival level must lie in (0, 1)"));
    }
    let f = covariate_link(config.rho, covariates);
    let a = effective_shape(config, covariates);
    let e = (config.beta * f).exp();
    Ok(config.b * (-level.ln() / e).exp_m1().powf(1.0 / a))
}

/// Event time with survival level `u`: `T* = b (expm1(-ln(u) e^{-beta f}))^{1/a}`.
fn event_time(u: f64, f: f64, a: f64, b: f64, beta: f64) -> f64 {
    b * (-u.ln() * (-beta * f).exp()).exp_m1().powf(1.0 / a)
}

// ── Simulation ──────────────────────────────────────────────────────────────

/// Unobserved per-subject quantities kept alongside the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentRecord {
    /// Uncensored event time.
    pub t_star: f64,
    /// Censoring time (administrative cap not applied).
    pub c: f64,
    /// Covariate link value `f(X)`.
    pub f_x: f64,
}

/// A simulated cohort: the observed dataset plus its latent truth.
#[derive(Debug, Clone)]
pub struct SimulatedData {
    /// Observed times, events, and covariates.
    pub dataset: SurvivalDataset,
    /// One latent record per subject, same order as the dataset.
    pub latent: Vec<LatentRecord>,
}

/// Raw random draws for one subject, before any transformation.
struct SubjectDraw {
    covariates: Vec<f64>,
    f_x: f64,
    u_event: f64,
    u_cens: f64,
}

/// Draw order per subject: `x1..xd`, `z1`, `z2` (when present), event
/// uniform, censoring uniform. Changing this order changes every dataset.
fn draw_subject(rng: &mut ChaCha12Rng, config: &SimConfig) -> SubjectDraw {
    let mut covariates = Vec::with_capacity(config.cov_dim());
    for _ in 0..config.d {
        let x: f64 = StandardNormal.sample(rng);
        covariates.push(x);
    }
    covariates.push(f64::from(rng.gen::<f64>() < 0.5));
    if config.nonproportional {
        covariates.push(f64::from(rng.gen::<f64>() < 0.5));
    }
    let f_x = covariate_link(config.rho, &covariates);
    // 1 - gen() lies in (0, 1]; u = 1 maps to an event at time zero.
    let u_event = 1.0 - rng.gen::<f64>();
    let u_cens = rng.gen::<f64>();
    SubjectDraw {
        covariates,
        f_x,
        u_event,
        u_cens,
    }
}

fn censoring_time(config: &SimConfig, draw: &SubjectDraw) -> f64 {
    match config.censoring {
        CensoringKind::Exponential { rate } => {
            if rate == 0.0 {
                f64::INFINITY
            } else {
                -(1.0 - draw.u_cens).ln() / rate
            }
        }
        CensoringKind::CovariateDependent { scale } => {
            let u = 1.0 - draw.u_cens;
            event_time(u, draw.f_x, config.a, scale, config.beta)
        }
    }
}

/// Generates one cohort. Deterministic for a fixed seed; subject `i` draws
/// from stream `i` of the seeded generator, so prefixes agree across sample
/// sizes.
pub fn simulate(config: &SimConfig, seed: u64) -> Result<SimulatedData> {
    config.validate()?;
    let n = config.n;
    let mut ids = Vec::with_capacity(n);
    let mut times = Vec::with_capacity(n);
    let mut events = Vec::with_capacity(n);
    let mut covariates = Vec::with_capacity(n * config.cov_dim());
    let mut latent = Vec::with_capacity(n);

    for i in 0..n {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let draw = draw_subject(&mut rng, config);
        let a = effective_shape(config, &draw.covariates);
        let t_star = event_time(draw.u_event, draw.f_x, a, config.b, config.beta);
        let c = censoring_time(config, &draw);
        let horizon = c.min(config.admin_cap);
        let observed = t_star.min(horizon);
        let event = t_star <= horizon;

        ids.push(format!("{}", i + 1));
        times.push(observed);
        events.push(event);
        covariates.extend_from_slice(&draw.covariates);
        latent.push(LatentRecord {
            t_star,
            c,
            f_x: draw.f_x,
        });
    }

    let dataset = SurvivalDataset::new(ids, times, events, covariates, config.cov_names())?;
    Ok(SimulatedData { dataset, latent })
}

// ── Censoring calibration ───────────────────────────────────────────────────

/// Calibration settings: pilot sample size and the acceptable gap between
/// the achieved and requested censored fraction.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationOptions {
    /// Pilot draws used to estimate the censored fraction.
    pub pilot_n: usize,
    /// Acceptable absolute gap to the target fraction.
    pub tolerance: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            pilot_n: 100_000,
            tolerance: 0.01,
        }
    }
}

/// Finds the censoring parameter whose censored fraction matches
/// `config.target_censoring`.
///
/// A single pilot sample is drawn once and reused for every candidate
/// parameter (common random numbers), which makes the censored fraction
/// monotone in the parameter and the bisection deterministic. Returns a copy
/// of the configuration with the calibrated parameter filled in.
pub fn calibrate_censoring(
    config: &SimConfig,
    options: &CalibrationOptions,
    seed: u64,
) -> Result<SimConfig> {
    config.validate()?;
    if options.pilot_n < 1000 {
        return Err(Error::invalid("calibration needs at least 1000 pilot draws"));
    }
    let target = config.target_censoring;

    // Pilot draws: event time and the raw censoring uniform per subject.
    struct Pilot {
        t_star: f64,
        u_cens: f64,
        f_x: f64,
    }
    let pilots: Vec<Pilot> = (0..options.pilot_n)
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let draw = draw_subject(&mut rng, config);
            let a = effective_shape(config, &draw.covariates);
            Pilot {
                t_star: event_time(draw.u_event, draw.f_x, a, config.b, config.beta),
                u_cens: draw.u_cens,
                f_x: draw.f_x,
            }
        })
        .collect();

    let censored_fraction = |param: f64| -> f64 {
        let mut censored = 0usize;
        for p in &pilots {
            let c = match config.censoring {
                CensoringKind::Exponential { .. } => {
                    if param == 0.0 {
                        f64::INFINITY
                    } else {
                        -(1.0 - p.u_cens).ln() / param
                    }
                }
                CensoringKind::CovariateDependent { .. } => {
                    event_time(1.0 - p.u_cens, p.f_x, config.a, param, config.beta)
                }
            };
            if p.t_star > c.min(config.admin_cap) {
                censored += 1;
            }
        }
        censored as f64 / pilots.len() as f64
    };

    // The fraction rises with the exponential rate and falls with the
    // covariate-dependent scale; `rising` tracks which way to bisect.
    let rising = matches!(config.censoring, CensoringKind::Exponential { .. });
    let floor = censored_fraction(if rising { 0.0 } else { f64::MAX.sqrt() });
    if target < floor - options.tolerance {
        return Err(Error::Simulation(format!(
            "administrative censoring alone exceeds the target: {floor:.3} > {target:.3}"
        )));
    }

    let mut lo = 1e-9;
    let mut hi = 1.0;
    for _ in 0..60 {
        let f = censored_fraction(hi);
        let past = if rising { f >= target } else { f <= target };
        if past {
            break;
        }
        hi *= 2.0;
    }

    let mut best = hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = censored_fraction(mid);
        if (f - target).abs() <= options.tolerance {
            best = mid;
            break;
        }
        // Move toward the smaller parameter when the fraction overshoots in
        // the rising case or undershoots in the falling case.
        let shrink = if rising { f > target } else { f < target };
        if shrink {
            hi = mid;
        } else {
            lo = mid;
        }
        best = mid;
    }
    let achieved = censored_fraction(best);
    if (achieved - target).abs() > options.tolerance {
        return Err(Error::Simulation(format!(
            "calibration stalled at censored fraction {achieved:.4} for target {target:.4}"
        )));
    }

    let censoring = match config.censoring {
        CensoringKind::Exponential { .. } => CensoringKind::Exponential { rate: best },
        CensoringKind::CovariateDependent { .. } => {
            CensoringKind::CovariateDependent { scale: best }
        }
    };
    Ok(SimConfig {
        censoring,
        ..config.clone()
    })
}

// ── Latent CSV ──────────────────────────────────────────────────────────────

/// Writes the latent truth as CSV: `id,t_star,c,f_x`.
pub fn write_latent_csv(path: &Path, sim: &SimulatedData) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["id", "t_star", "c", "f_x"])?;
    for (id, rec) in sim.dataset.ids().iter().zip(&sim.latent) {
        w.write_record([
            id.clone(),
            format!("{}", rec.t_star),
            format!("{}", rec.c),
            format!("{}", rec.f_x),
        ])?;
    }
    w.flush()?;
    Ok(())
}
