//! Survival-curve regression through jackknife pseudo values.
//!
//! The crate converts right-censored survival data into per-subject pseudo
//! survival probabilities and fits a Bayesian feed forward network to them
//! with mean-field variational inference, yielding posterior-predictive
//! survival curves with credible bands for new covariate profiles.
//!
//! The flow, module by module:
//!
//! 1. [`data`] loads the cohort; [`km`] estimates the marginal survival and
//!    censoring-survival curves; [`grid`] picks evaluation times from
//!    survival quantiles.
//! 2. [`pseudo`] turns the cohort into jackknife pseudo values: plain
//!    product-limit, inverse-probability-of-censoring weighted (with
//!    censoring models from [`weights`] and the weighted hazard from
//!    [`hazard`]), or conditional-on-interval variants.
//! 3. [`network`], [`train`], [`autodiff`], and [`advi`] define the
//!    regression network, its mean-squared-error pre-fit, the reverse-mode
//!    tape both rely on, and the variational engine; [`pipeline`] wires
//!    those into fit artifacts and posterior prediction.
//! 4. [`sim`] generates benchmark cohorts with known ground truth and
//!    [`metrics`] scores predictions against that truth.
//!
//! Every random procedure takes an explicit seed and is bit-reproducible;
//! [`rng::derive_seed`] fans a master seed out to independent sub-seeds.

pub mod advi;
pub mod autodiff;
pub mod data;
pub mod error;
pub mod grid;
pub mod hazard;
pub mod km;
pub mod metrics;
pub mod network;
pub mod pipeline;
pub mod pseudo;
pub mod rng;
pub mod sim;
pub mod step;
pub mod train;
pub mod weights;

pub use error::{Error, Result};
