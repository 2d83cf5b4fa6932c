//! Product-limit (Kaplan-Meier) estimation.
//!
//! Ties between events and censorings at the same time are resolved as
//! events first: a subject censored at `t` still counts as at risk for the
//! events at `t`. With no censoring at all, the estimate is computed directly
//! from risk-set counts as `#(T > t) / n`, which makes it equal the empirical
//! survival function exactly (bit for bit), not just up to product rounding.

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::step::StepFunction;

/// Distinct jump times with their event counts and at-risk counts.
///
/// `d[k]` is the number of counted indicators firing exactly at `times[k]`,
/// and `n_risk[k]` is the number of subjects with `T_j >= times[k]`.
#[derive(Debug, Clone)]
pub struct RiskTable {
    /// Distinct times with at least one counted indicator, increasing.
    pub times: Vec<f64>,
    /// Counted indicators at each time.
    pub d: Vec<u64>,
    /// Subjects at risk (T >= time) at each time.
    pub n_risk: Vec<u64>,
}

impl RiskTable {
    /// Builds the table counting subjects with `indicator[i] == true`.
    pub fn build(times: &[f64], indicator: &[bool]) -> RiskTable {
        let n = times.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

        let mut out = RiskTable {
            times: Vec::new(),
            d: Vec::new(),
            n_risk: Vec::new(),
        };
        let mut i = 0;
        while i < n {
            let t = times[order[i]];
            let mut j = i;
            let mut events = 0u64;
            while j < n && times[order[j]] == t {
                if indicator[order[j]] {
                    events += 1;
                }
                j += 1;
            }
            if events > 0 {
                out.times.push(t);
                out.d.push(events);
                out.n_risk.push((n - i) as u64);
            }
            i = j;
        }
        out
    }

    /// Number of jump times.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when there are no jump times.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn product_limit(table: &RiskTable, total: usize, fully_observed: bool) -> Result<StepFunction> {
    let mut values = Vec::with_capacity(table.len());
    if fully_observed {
        for k in 0..table.len() {
            values.push((table.n_risk[k] - table.d[k]) as f64 / total as f64);
        }
    } else {
        let mut s = 1.0;
        for k in 0..table.len() {
            s *= 1.0 - table.d[k] as f64 / table.n_risk[k] as f64;
            values.push(s);
        }
    }
    StepFunction::survival(table.times.clone(), values)
}

/// Kaplan-Meier estimate of the survival function `S(t) = P(T > t)`.
///
/// Knots sit at the distinct event times; the value from the last knot
/// onward stays at the final product.
pub fn kaplan_meier(data: &SurvivalDataset) -> Result<StepFunction> {
    let table = RiskTable::build(data.times(), data.events());
    product_limit(&table, data.n(), data.fully_observed())
}

/// Reverse Kaplan-Meier estimate of the censoring survival `G(t) = P(C > t)`,
/// obtained by swapping the roles of events and censorings.
pub fn reverse_kaplan_meier(data: &SurvivalDataset) -> Result<StepFunction> {
    let flipped: Vec<bool> = data.events().iter().map(|&e| !e).collect();
    let table = RiskTable::build(data.times(), &flipped);
    let no_censoring = flipped.iter().all(|&e| e);
    product_limit(&table, data.n(), no_censoring)
}

/// Nelson-Aalen estimate of the cumulative hazard with unit weights.
pub fn nelson_aalen(data: &SurvivalDataset) -> Result<StepFunction> {
    let table = RiskTable::build(data.times(), data.events());
    let mut values = Vec::with_capacity(table.len());
    let mut acc = 0.0;
    for k in 0..table.len() {
        if table.n_risk[k] == 0 {
            return Err(Error::Estimation(format!(
                "empty risk set at event time {}",
                table.times[k]
            )));
        }
        acc += table.d[k] as f64 / table.n_risk[k] as f64;
        values.push(acc);
    }
    StepFunction::cumulative_hazard(table.times.clone(), values)
}
