//! Right-continuous step functions over time.
//!
//! Survival estimators and cumulative hazards are both represented as
//! [`StepFunction`]s: a value before the first knot, then a constant value
//! from each knot (inclusive) to the next. Survival-kind functions start at
//! 1 and are non-increasing within [0, 1]; hazard-kind functions start at 0
//! and are non-decreasing.

use crate::error::{Error, Result};

/// Shape constraint enforced by a [`StepFunction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Starts at 1, non-increasing, values in [0, 1].
    Survival,
    /// Starts at 0, non-decreasing, values >= 0.
    CumulativeHazard,
}

/// A right-continuous step function with sorted knots.
///
/// `eval(t)` returns the value at the rightmost knot `<= t`, or the initial
/// value when `t` precedes every knot. `eval_left(t)` returns the left limit,
/// i.e. the value just before `t`.
#[derive(Debug, Clone)]
pub struct StepFunction {
    kind: StepKind,
    knots: Vec<f64>,
    values: Vec<f64>,
    initial: f64,
}

impl StepFunction {
    /// Builds a survival-kind step function starting at 1.
    pub fn survival(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(StepKind::Survival, knots, values, 1.0)
    }

    /// Builds a cumulative-hazard-kind step function starting at 0.
    pub fn cumulative_hazard(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(StepKind::CumulativeHazard, knots, values, 0.0)
    }

    fn new(kind: StepKind, knots: Vec<f64>, values: Vec<f64>, initial: f64) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::invalid(format!(
                "step function has {} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        for w in knots.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::invalid(format!(
                    "step function knots must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "step function value at knot index {i}"
                )));
            }
            let ok = match kind {
                StepKind::Survival => (0.0..=1.0).contains(&v),
                StepKind::CumulativeHazard => v >= 0.0,
            };
            if !ok {
                return Err(Error::invalid(format!(
                    "step function value {v} at knot index {i} violates {kind:?} range"
                )));
            }
        }
        let mut prev = initial;
        for (i, &v) in values.iter().enumerate() {
            let ok = match kind {
                StepKind::Survival => v <= prev,
                StepKind::CumulativeHazard => v >= prev,
            };
            if !ok {
                return Err(Error::invalid(format!(
                    "step function violates {kind:?} monotonicity at knot index {i}"
                )));
            }
            prev = v;
        }
        Ok(StepFunction {
            kind,
            knots,
            values,
            initial,
        })
    }

    /// Shape constraint of this function.
    pub fn kind(&self) -> StepKind {
        self.kind
    }

    /// Sorted knot locations.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Values taken from each knot (inclusive) onward.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value before the first knot.
    pub fn initial(&self) -> f64 {
        self.initial
    }

    /// Value at `t` (right-continuous: the rightmost knot `<= t` wins).
    pub fn eval(&self, t: f64) -> f64 {
        match self.knots.partition_point(|&k| k <= t) {
            0 => self.initial,
            i => self.values[i - 1],
        }
    }

    /// Left limit at `t`: the value just before `t` (rightmost knot `< t`).
    pub fn eval_left(&self, t: f64) -> f64 {
        match self.knots.partition_point(|&k| k < t) {
            0 => self.initial,
            i => self.values[i - 1],
        }
    }
}
