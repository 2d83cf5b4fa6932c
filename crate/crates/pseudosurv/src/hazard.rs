//! Weighted cumulative-hazard estimation.
//!
//! The weighted Nelson-Aalen estimator accumulates, at each distinct event
//! time `u`, the weighted event count over the weighted at-risk total:
//!
//! ```text
//! dL(u) = sum_{i: T_i = u, event} W_i(u) / sum_{j: T_j >= u} W_j(u)
//! ```
//!
//! and the matching survival estimate is `exp(-L(t))`.

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::step::{StepFunction, StepKind};
use crate::weights::WeightTable;

/// Weighted Nelson-Aalen cumulative hazard with per-subject weights.
///
/// The weight table must cover exactly the distinct event times of `data`.
pub fn ipcw_nelson_aalen(data: &SurvivalDataset, weights: &WeightTable) -> Result<StepFunction> {
    let times = crate::weights::event_times(data);
    if weights.event_times() != times.as_slice() || weights.n() != data.n() {
        return Err(Error::invalid(
            "weight table does not match the dataset's subjects and event times",
        ));
    }
    let mut values = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for (k, &u) in times.iter().enumerate() {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..data.n() {
            if data.times()[j] >= u {
                let w = weights.weight(j, k);
                den += w;
                if data.times()[j] == u && data.events()[j] {
                    num += w;
                }
            }
        }
        if !(den > 0.0) {
            return Err(Error::Estimation(format!(
                "zero weighted risk set at event time {u}"
            )));
        }
        acc += num / den;
        values.push(acc);
    }
    StepFunction::cumulative_hazard(times, values)
}

/// Survival estimate `exp(-L(t))` from a cumulative hazard.
pub fn ipcw_survival(hazard: &StepFunction) -> Result<StepFunction> {
    if hazard.kind() != StepKind::CumulativeHazard {
        return Err(Error::invalid(
            "ipcw_survival expects a cumulative-hazard step function",
        ));
    }
    let values = hazard.values().iter().map(|&l| (-l).exp()).collect();
    StepFunction::survival(hazard.knots().to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{censoring_weights, CensoringModel, WeightOptions};

    fn dataset(times: &[f64], events: &[bool]) -> SurvivalDataset {
        let ids = (0..times.len()).map(|i| format!("s{i}")).collect();
        SurvivalDataset::new(ids, times.to_vec(), events.to_vec(), vec![], vec![]).unwrap()
    }

    #[test]
    fn unit_weights_reduce_to_nelson_aalen() {
        let d = dataset(&[1.0, 2.0, 3.0], &[true; 3]);
        let w = censoring_weights(&d, &CensoringModel::Unit, &WeightOptions::default()).unwrap();
        let h = ipcw_nelson_aalen(&d, &w).unwrap();
        assert!((h.eval(3.0) - (1.0 / 3.0 + 0.5 + 1.0)).abs() < 1e-15);
        let s = ipcw_survival(&h).unwrap();
        assert!((s.eval(3.0) - (-(1.0 / 3.0 + 0.5 + 1.0f64)).exp()).abs() < 1e-15);
        assert!((s.eval(3.0) - 0.1598797460796939).abs() < 1e-12);
    }

    #[test]
    fn marginal_weights_match_hand_computation() {
        // times [1c, 2, 3, 4c, 5, 6] with censorings at 1 and 4:
        // G = 5/6 on [1, 4), 5/9 from 4 on; weights 1.2 at u in {2, 3} and
        // 1.8 at u in {5, 6}; increments 0.2, 0.25, 0.5, 1.0.
        let d = dataset(
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            &[false, true, true, false, true, true],
        );
        let w =
            censoring_weights(&d, &CensoringModel::MarginalReverseKm, &WeightOptions::default())
                .unwrap();
        let h = ipcw_nelson_aalen(&d, &w).unwrap();
        let expect = [0.2, 0.45, 0.95, 1.95];
        for (k, &t) in [2.0, 3.0, 5.0, 6.0].iter().enumerate() {
            assert!(
                (h.eval(t) - expect[k]).abs() < 1e-12,
                "L({t}) = {}, want {}",
                h.eval(t),
                expect[k]
            );
        }
        assert!((h.eval(4.5) - 0.45).abs() < 1e-12);
    }

    #[test]
    fn survival_requires_hazard_kind() {
        let s = StepFunction::survival(vec![1.0], vec![0.5]).unwrap();
        assert!(ipcw_survival(&s).is_err());
    }
}
