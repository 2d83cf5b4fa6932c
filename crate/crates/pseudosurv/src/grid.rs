//! Evaluation time grids and survival-quantile grid construction.

use crate::error::{Error, Result};
use crate::step::{StepFunction, StepKind};

/// A strictly increasing grid of positive evaluation times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// Validates positivity and strict ordering.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("time grid is empty"));
        }
        for &p in &points {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::invalid(format!(
                    "time grid point {p} must be finite and > 0"
                )));
            }
        }
        for w in points.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::invalid(format!(
                    "time grid must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(TimeGrid { points })
    }

    /// Grid points, increasing.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when the grid has no points (never, post-validation).
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A quantile-derived grid plus the requested probabilities that had to be
/// dropped (level not attainable, or colliding on the same knot).
#[derive(Debug, Clone)]
pub struct QuantileGrid {
    /// The resulting strictly increasing grid.
    pub grid: TimeGrid,
    /// Probabilities that produced no grid point.
    pub dropped: Vec<f64>,
}

/// Default decile probabilities 0.1, 0.2, ..., 0.9.
pub fn decile_probs() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// Times at which `survival` first drops to `1 - p` or below, for each `p`.
///
/// Probabilities whose level is never reached are dropped, as are duplicates
/// when two probabilities land on the same knot; dropped probabilities are
/// reported in the result. Errors if no probability is attainable.
pub fn survival_quantiles(survival: &StepFunction, probs: &[f64]) -> Result<QuantileGrid> {
    if survival.kind() != StepKind::Survival {
        return Err(Error::invalid(
            "survival_quantiles expects a survival-kind step function",
        ));
    }
    if probs.is_empty() {
        return Err(Error::invalid("no quantile probabilities given"));
    }
    for w in probs.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::invalid("quantile probabilities must be strictly increasing"));
        }
    }
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for &p in probs {
        if !(0.0 < p && p < 1.0) {
            return Err(Error::invalid(format!(
                "quantile probability {p} must lie strictly inside (0, 1)"
            )));
        }
        let level = 1.0 - p;
        // Values are non-increasing: find the first knot at or below `level`.
        let values = survival.values();
        let ix = values.partition_point(|&v| v > level);
        if ix == values.len() {
            dropped.push(p);
            continue;
        }
        let t = survival.knots()[ix];
        if points.last().is_some_and(|&last| last >= t) {
            dropped.push(p);
            continue;
        }
        points.push(t);
    }
    if points.is_empty() {
        return Err(Error::Estimation(
            "no quantile probability is attainable from this survival function".into(),
        ));
    }
    Ok(QuantileGrid {
        grid: TimeGrid::new(points)?,
        dropped,
    })
}
