//! Jackknife pseudo-observations for survival probabilities.
//!
//! For a survival estimate `S` computed from `n` subjects, the pseudo value
//! of subject `i` at time `t` is
//!
//! ```text
//! P_i(t) = n * S(t) - (n - 1) * S_minus_i(t)
//! ```
//!
//! where `S_minus_i` refits the estimator with subject `i` removed. Pseudo
//! values may fall outside [0, 1] and are never clipped. Three variants are
//! provided:
//!
//! * [`jackknife_pseudo`]: Kaplan-Meier path, computed by an incremental
//!   leave-one-out algorithm in `O(n (m + log n))` for `m` grid points
//!   instead of `n` refits.
//! * [`ipcw_pseudo`]: inverse-censoring-weighted path using the weighted
//!   cumulative hazard and `S = exp(-L)`; leave-one-out refits re-use the
//!   full-data weights.
//! * [`conditional_ipcw_pseudo`]: the IPCW jackknife applied per grid
//!   interval within the interval's risk set.
//!
//! With no censoring at all, the Kaplan-Meier pseudo value collapses
//! algebraically to the indicator `I(T_i > t)`; that case is computed from
//! risk-set counts so the identity holds exactly. Elsewhere the running
//! products use compensated (double-double) arithmetic, keeping the
//! incremental path within ~1e-14 of exact refits.

use std::path::Path;

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::km::RiskTable;
use crate::weights::{censoring_weights, CensoringModel, WeightOptions, WeightTable};

/// Which survival estimator the plain jackknife differentiates through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurvivalEstimator {
    /// Kaplan-Meier product-limit estimate.
    ProductLimit,
    /// `exp(-L)` with `L` the Nelson-Aalen cumulative hazard.
    ExpCumHazard,
}

/// Pseudo values for every subject at every grid point.
#[derive(Debug, Clone)]
pub struct PseudoValueMatrix {
    /// Subject ids, one per row.
    pub ids: Vec<String>,
    /// Evaluation grid, one column per point.
    pub grid: TimeGrid,
    /// Row-major `n x m` pseudo values.
    pub values: Vec<f64>,
}

impl PseudoValueMatrix {
    /// Pseudo value of subject row `i` at grid column `j`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.len() + j]
    }

    /// All pseudo values of subject row `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.grid.len();
        &self.values[i * m..(i + 1) * m]
    }

    /// Column means, one per grid point.
    pub fn column_means(&self) -> Vec<f64> {
        let n = self.ids.len();
        let m = self.grid.len();
        let mut out = vec![0.0; m];
        for i in 0..n {
            for j in 0..m {
                out[j] += self.value(i, j);
            }
        }
        for v in &mut out {
            *v /= n as f64;
        }
        out
    }
}

// ── Compensated products ────────────────────────────────────────────────────

/// Double-double accumulator for long products of factors in [-1, 1].
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Multiplies by a plain f64, carrying the rounding error exactly.
    fn mul(self, f: f64) -> Dd {
        let p = self.hi * f;
        let e = self.hi.mul_add(f, -p);
        Dd {
            hi: p,
            lo: self.lo.mul_add(f, e),
        }
    }

    /// Multiplies two accumulators (lo x lo term dropped).
    fn mul_dd(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Dd {
            hi: p,
            lo: self.hi * o.lo + self.lo * o.hi + e,
        }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

// ── Kaplan-Meier jackknife ──────────────────────────────────────────────────

/// Jackknife pseudo values through the Kaplan-Meier estimator.
pub fn jackknife_pseudo(data: &SurvivalDataset, grid: &TimeGrid) -> Result<PseudoValueMatrix> {
    jackknife_pseudo_with(data, grid, SurvivalEstimator::ProductLimit)
}

/// Jackknife pseudo values through the chosen survival estimator.
pub fn jackknife_pseudo_with(
    data: &SurvivalDataset,
    grid: &TimeGrid,
    estimator: SurvivalEstimator,
) -> Result<PseudoValueMatrix> {
    if data.n() < 2 {
        return Err(Error::invalid(
            "jackknife pseudo values need at least 2 subjects",
        ));
    }
    match estimator {
        SurvivalEstimator::ProductLimit => {
            if data.fully_observed() {
                Ok(indicator_pseudo(data, grid))
            } else {
                km_jackknife(data, grid)
            }
        }
        SurvivalEstimator::ExpCumHazard => {
            let unit = censoring_weights(data, &CensoringModel::Unit, &WeightOptions::default())?;
            ipcw_pseudo(data, grid, &unit)
        }
    }
}

/// With zero censoring the jackknife telescopes to `I(T_i > t_j)` exactly.
fn indicator_pseudo(data: &SurvivalDataset, grid: &TimeGrid) -> PseudoValueMatrix {
    let m = grid.len();
    let mut values = Vec::with_capacity(data.n() * m);
    for i in 0..data.n() {
        for &t in grid.points() {
            values.push(if data.times()[i] > t { 1.0 } else { 0.0 });
        }
    }
    PseudoValueMatrix {
        ids: data.ids().to_vec(),
        grid: grid.clone(),
        values,
    }
}

fn km_jackknife(data: &SurvivalDataset, grid: &TimeGrid) -> Result<PseudoValueMatrix> {
    let n = data.n();
    let nf = n as f64;
    let m = grid.len();
    let table = RiskTable::build(data.times(), data.events());
    let k = table.len();

    // Per event time l (0-based): the full-data factor, the factor with one
    // at-risk subject removed, and the factor when the removed subject is one
    // of the events. Factors that no leave-one-out estimate can consume
    // (risk set of one, or everyone at risk dying) are parked at 1.
    let mut orig = Vec::with_capacity(k);
    let mut reduced = Vec::with_capacity(k);
    let mut adj = Vec::with_capacity(k);
    for l in 0..k {
        let d = table.d[l] as f64;
        let nr = table.n_risk[l] as f64;
        orig.push(1.0 - d / nr);
        if table.n_risk[l] == 1 {
            reduced.push(1.0);
            adj.push(1.0);
        } else {
            reduced.push(if table.d[l] == table.n_risk[l] {
                1.0
            } else {
                1.0 - d / (nr - 1.0)
            });
            adj.push(1.0 - (d - 1.0) / (nr - 1.0));
        }
    }

    // Prefix products: s_full[j] after j factors, b[j] with every risk set
    // reduced by one.
    let mut s_full = Vec::with_capacity(k + 1);
    let mut b = Vec::with_capacity(k + 1);
    s_full.push(1.0);
    b.push(Dd::ONE);
    let mut acc_full = Dd::ONE;
    for l in 0..k {
        acc_full = acc_full.mul(orig[l]);
        s_full.push(acc_full.value());
        b.push(b[l].mul(reduced[l]));
    }

    // Number of event times at or before each subject's observed time.
    let r: Vec<usize> = (0..n)
        .map(|i| table.times.partition_point(|&u| u <= data.times()[i]))
        .collect();

    let mut values = vec![0.0; n * m];
    for (j, &t) in grid.points().iter().enumerate() {
        let big_j = table.times.partition_point(|&u| u <= t);
        // suf[x] = product of original factors over event indices x..big_j.
        let mut suf = vec![Dd::ONE; big_j + 1];
        for x in (0..big_j).rev() {
            suf[x] = suf[x + 1].mul(orig[x]);
        }
        let full_term = nf * s_full[big_j];
        for i in 0..n {
            let ri = r[i];
            let loo = if data.events()[i] && ri <= big_j && ri > 0 {
                b[ri - 1].mul(adj[ri - 1]).mul_dd(suf[ri])
            } else {
                let x = ri.min(big_j);
                b[x].mul_dd(suf[x])
            };
            values[i * m + j] = full_term - (nf - 1.0) * loo.value();
        }
    }
    Ok(PseudoValueMatrix {
        ids: data.ids().to_vec(),
        grid: grid.clone(),
        values,
    })
}

// ── IPCW jackknife ──────────────────────────────────────────────────────────

/// Weighted per-event-time sums shared by the IPCW paths.
struct WeightedIncrements {
    times: Vec<f64>,
    num: Vec<f64>,
    den: Vec<f64>,
    /// prefix[l] = sum of the first l increments.
    prefix: Vec<f64>,
}

impl WeightedIncrements {
    fn build(data: &SurvivalDataset, weights: &WeightTable) -> Result<Self> {
        let times = crate::weights::event_times(data);
        if weights.event_times() != times.as_slice() || weights.n() != data.n() {
            return Err(Error::invalid(
                "weight table does not match the dataset's subjects and event times",
            ));
        }
        let k = times.len();
        let mut num = vec![0.0; k];
        let mut den = vec![0.0; k];
        for (l, &u) in times.iter().enumerate() {
            for j in 0..data.n() {
                if data.times()[j] >= u {
                    let w = weights.weight(j, l);
                    den[l] += w;
                    if data.times()[j] == u && data.events()[j] {
                        num[l] += w;
                    }
                }
            }
            if !(den[l] > 0.0) {
                return Err(Error::Estimation(format!(
                    "zero weighted risk set at event time {u}"
                )));
            }
        }
        let mut prefix = Vec::with_capacity(k + 1);
        prefix.push(0.0);
        for l in 0..k {
            prefix.push(prefix[l] + num[l] / den[l]);
        }
        Ok(WeightedIncrements {
            times,
            num,
            den,
            prefix,
        })
    }
}

/// Jackknife pseudo values through the weighted `exp(-L)` estimator.
///
/// Leave-one-out refits drop the subject from the event and risk sums but
/// keep every other subject's weight fixed at its full-data value.
pub fn ipcw_pseudo(
    data: &SurvivalDataset,
    grid: &TimeGrid,
    weights: &WeightTable,
) -> Result<PseudoValueMatrix> {
    if data.n() < 2 {
        return Err(Error::invalid("IPCW pseudo values need at least 2 subjects"));
    }
    let inc = WeightedIncrements::build(data, weights)?;
    let n = data.n();
    let nf = n as f64;
    let m = grid.len();
    let grid_prefix: Vec<usize> = grid
        .points()
        .iter()
        .map(|&t| inc.times.partition_point(|&u| u <= t))
        .collect();
    let max_prefix = grid_prefix.iter().copied().max().unwrap_or(0);

    let mut values = vec![0.0; n * m];
    for i in 0..n {
        let ti = data.times()[i];
        let ri = inc.times.partition_point(|&u| u <= ti);
        // Adjusted partial sums at each grid boundary, walking event times
        // once per subject.
        let mut adj_at = vec![0.0; m];
        let mut s = 0.0;
        let mut l = 0;
        let walk_to = ri.min(max_prefix);
        for (j, &gp) in grid_prefix.iter().enumerate() {
            while l < gp.min(walk_to) {
                let w = weights.weight(i, l);
                let own = if data.events()[i] && inc.times[l] == ti {
                    w
                } else {
                    0.0
                };
                let den = inc.den[l] - w;
                let num = inc.num[l] - own;
                if den > 0.0 {
                    s += num / den;
                } else if num > 0.0 {
                    return Err(Error::Estimation(format!(
                        "leave-one-out refit for subject '{}' has a zero weighted \
                         risk set at event time {}",
                        data.ids()[i],
                        inc.times[l]
                    )));
                }
                l += 1;
            }
            adj_at[j] = s;
        }
        for j in 0..m {
            let gp = grid_prefix[j];
            let full = (-inc.prefix[gp]).exp();
            let cut = ri.min(gp);
            let loo_sum = adj_at[j] + (inc.prefix[gp] - inc.prefix[cut]);
            let loo = (-loo_sum).exp();
            values[i * m + j] = nf * full - (nf - 1.0) * loo;
        }
    }
    Ok(PseudoValueMatrix {
        ids: data.ids().to_vec(),
        grid: grid.clone(),
        values,
    })
}

// ── Conditional IPCW jackknife ──────────────────────────────────────────────

/// Pseudo values for one grid interval, restricted to its risk set.
#[derive(Debug, Clone)]
pub struct IntervalPseudo {
    /// Conditioning time (0 for the first interval).
    pub origin: f64,
    /// Interval endpoint the conditional survival targets.
    pub target: f64,
    /// Ids of the subjects in the interval's risk set.
    pub ids: Vec<String>,
    /// One pseudo value per risk-set subject.
    pub values: Vec<f64>,
}

/// Conditional pseudo-value output plus the intervals that were dropped
/// because the risk set had fewer than 2 subjects.
#[derive(Debug, Clone)]
pub struct ConditionalPseudo {
    /// One entry per retained interval, in grid order.
    pub intervals: Vec<IntervalPseudo>,
    /// Grid indices of dropped intervals (index of the interval's endpoint).
    pub dropped: Vec<usize>,
}

/// Interval-wise IPCW jackknife: for each grid interval `(t_j, t_{j+1}]`
/// (with `t_0 = 0`), subjects still at risk at `t_j` get a pseudo value for
/// the conditional survival at `t_{j+1}`, using the risk-set size as the
/// jackknife multiplier. Full-data weights are re-used throughout.
pub fn conditional_ipcw_pseudo(
    data: &SurvivalDataset,
    grid: &TimeGrid,
    weights: &WeightTable,
) -> Result<ConditionalPseudo> {
    let inc = WeightedIncrements::build(data, weights)?;
    let mut intervals = Vec::new();
    let mut dropped = Vec::new();

    for j in 0..grid.len() {
        let origin = if j == 0 { 0.0 } else { grid.points()[j - 1] };
        let target = grid.points()[j];
        let members: Vec<usize> = (0..data.n())
            .filter(|&i| data.times()[i] >= origin)
            .collect();
        let rsize = members.len();
        if rsize < 2 {
            dropped.push(j);
            continue;
        }
        let rf = rsize as f64;
        // Event-time window (origin, target].
        let lo = inc.times.partition_point(|&u| u <= origin);
        let hi = inc.times.partition_point(|&u| u <= target);
        let base_sum = inc.prefix[hi] - inc.prefix[lo];
        let base = (-base_sum).exp();

        let mut ids = Vec::with_capacity(rsize);
        let mut values = Vec::with_capacity(rsize);
        for &i in &members {
            let ti = data.times()[i];
            let ri = inc.times.partition_point(|&u| u <= ti);
            let cut = ri.min(hi);
            let mut s = 0.0;
            for l in lo..hi {
                if l < cut {
                    let w = weights.weight(i, l);
                    let own = if data.events()[i] && inc.times[l] == ti {
                        w
                    } else {
                        0.0
                    };
                    let den = inc.den[l] - w;
                    let num = inc.num[l] - own;
                    if den > 0.0 {
                        s += num / den;
                    } else if num > 0.0 {
                        return Err(Error::Estimation(format!(
                            "conditional refit for subject '{}' has a zero weighted \
                             risk set at event time {}",
                            data.ids()[i],
                            inc.times[l]
                        )));
                    }
                } else {
                    s += inc.num[l] / inc.den[l];
                }
            }
            ids.push(data.ids()[i].clone());
            values.push(rf * base - (rf - 1.0) * (-s).exp());
        }
        intervals.push(IntervalPseudo {
            origin,
            target,
            ids,
            values,
        });
    }
    Ok(ConditionalPseudo { intervals, dropped })
}

// ── CSV IO ──────────────────────────────────────────────────────────────────

/// Writes a pseudo-value matrix as `id,time,pseudo_value` rows.
pub fn write_pseudo_csv(path: impl AsRef<Path>, pseudo: &PseudoValueMatrix) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(["id", "time", "pseudo_value"])?;
    for (i, id) in pseudo.ids.iter().enumerate() {
        for (j, &t) in pseudo.grid.points().iter().enumerate() {
            writer.write_record(&[id.clone(), format!("{t}"), format!("{}", pseudo.value(i, j))])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Writes conditional pseudo values with the same columns; each subject
/// appears once per interval it is at risk in, with `time` the endpoint.
pub fn write_conditional_pseudo_csv(
    path: impl AsRef<Path>,
    pseudo: &ConditionalPseudo,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(["id", "time", "pseudo_value"])?;
    for interval in &pseudo.intervals {
        for (id, &v) in interval.ids.iter().zip(&interval.values) {
            writer.write_record(&[id.clone(), format!("{}", interval.target), format!("{v}")])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Reads a pseudo-value matrix written by [`write_pseudo_csv`].
///
/// Every subject must carry the same strictly increasing time sequence.
pub fn read_pseudo_csv(path: impl AsRef<Path>) -> Result<PseudoValueMatrix> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| {
        Error::invalid(format!("cannot open pseudo file '{}': {e}", path.display()))
    })?;
    let headers = reader.headers()?.clone();
    let need = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::invalid(format!("pseudo file is missing column '{name}'")))
    };
    let (id_c, t_c, v_c) = (need("id")?, need("time")?, need("pseudo_value")?);

    let mut ids: Vec<String> = Vec::new();
    let mut rows: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for (row_ix, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = row_ix + 1;
        let get = |c: usize, what: &str| -> Result<&str> {
            record
                .get(c)
                .ok_or_else(|| Error::invalid(format!("pseudo file row {row_no}: missing {what}")))
        };
        let id = get(id_c, "id")?.trim().to_string();
        let t: f64 = get(t_c, "time")?
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("pseudo file row {row_no}: unparseable time")))?;
        let v: f64 = get(v_c, "pseudo_value")?.trim().parse().map_err(|_| {
            Error::invalid(format!("pseudo file row {row_no}: unparseable pseudo_value"))
        })?;
        if ids.last().map(String::as_str) != Some(id.as_str()) {
            if ids.contains(&id) {
                return Err(Error::invalid(format!(
                    "pseudo file rows for id '{id}' are not contiguous"
                )));
            }
            ids.push(id);
            rows.push((Vec::new(), Vec::new()));
        }
        let last = rows.last_mut().expect("row pushed above");
        last.0.push(t);
        last.1.push(v);
    }
    if ids.is_empty() {
        return Err(Error::invalid("pseudo file has no data rows"));
    }
    let grid_times = rows[0].0.clone();
    for (ix, (times, _)) in rows.iter().enumerate() {
        if times != &grid_times {
            return Err(Error::invalid(format!(
                "pseudo file: id '{}' has a different time grid",
                ids[ix]
            )));
        }
    }
    let mut values = Vec::with_capacity(ids.len() * grid_times.len());
    for (_, vs) in &rows {
        values.extend_from_slice(vs);
    }
    Ok(PseudoValueMatrix {
        ids,
        grid: TimeGrid::new(grid_times)?,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(times: &[f64], events: &[bool]) -> SurvivalDataset {
        let ids = (0..times.len()).map(|i| format!("s{i}")).collect();
        SurvivalDataset::new(ids, times.to_vec(), events.to_vec(), vec![], vec![]).unwrap()
    }

    fn grid(points: &[f64]) -> TimeGrid {
        TimeGrid::new(points.to_vec()).unwrap()
    }

    #[test]
    fn no_censoring_collapses_to_indicator_exactly() {
        let d = dataset(&[1.0, 2.0, 3.0, 4.0, 5.0], &[true; 5]);
        let g = grid(&[1.5, 3.5]);
        let p = jackknife_pseudo(&d, &g).unwrap();
        for i in 0..5 {
            for (j, &t) in g.points().iter().enumerate() {
                let want = if d.times()[i] > t { 1.0 } else { 0.0 };
                assert_eq!(p.value(i, j), want, "subject {i} at t={t}");
            }
        }
        // Column means equal the empirical survival exactly.
        let means = p.column_means();
        assert_eq!(means[0], 4.0 / 5.0);
        assert_eq!(means[1], 2.0 / 5.0);
    }

    #[test]
    fn censored_three_subject_case_matches_hand_refits() {
        // times [1, 2c, 3], t = 2.5: full KM = 2/3. Leave-one-out refits:
        // drop subject 0 -> [2c, 3] has no event by 2.5, S = 1;
        // drop subject 1 -> [1, 3] has S = 1/2;
        // drop subject 2 -> [1, 2c] has S = 1/2.
        // Pseudo = 3 * 2/3 - 2 * S_loo = [0, 1, 1].
        let d = dataset(&[1.0, 2.0, 3.0], &[true, false, true]);
        let p = jackknife_pseudo(&d, &grid(&[2.5])).unwrap();
        assert!((p.value(0, 0) - 0.0).abs() < 1e-14);
        assert!((p.value(1, 0) - 1.0).abs() < 1e-14);
        assert!((p.value(2, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_subject_pseudo_can_leave_unit_interval() {
        // times [1c, 2]: at t = 2.5 the pseudo values are 0 and -1... the
        // censored subject's refit keeps S = 1, the event subject's drops to 0.
        let d = dataset(&[1.0, 2.0], &[false, true]);
        let p = jackknife_pseudo(&d, &grid(&[2.5])).unwrap();
        assert!((p.value(0, 0) - 0.0).abs() < 1e-14);
        assert!((p.value(1, 0) - -1.0).abs() < 1e-14);
    }

    #[test]
    fn grid_point_before_first_event_gives_one() {
        let d = dataset(&[1.0, 2.0, 3.0], &[true, false, true]);
        let p = jackknife_pseudo(&d, &grid(&[0.5])).unwrap();
        for i in 0..3 {
            assert_eq!(p.value(i, 0), 1.0);
        }
    }

    #[test]
    fn rejects_single_subject() {
        let d = dataset(&[1.0], &[true]);
        assert!(jackknife_pseudo(&d, &grid(&[0.5])).is_err());
    }

    #[test]
    fn unit_weight_ipcw_equals_exp_path_plain_exactly() {
        let d = dataset(
            &[1.0, 2.0, 2.0, 3.0, 4.5, 5.0, 6.0],
            &[true, false, true, true, false, true, true],
        );
        let g = grid(&[1.5, 3.5, 5.5]);
        let unit = censoring_weights(&d, &CensoringModel::Unit, &WeightOptions::default()).unwrap();
        let a = ipcw_pseudo(&d, &g, &unit).unwrap();
        let b = jackknife_pseudo_with(&d, &g, SurvivalEstimator::ExpCumHazard).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn conditional_first_interval_matches_marginal_ipcw() {
        let d = dataset(
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            &[false, true, true, false, true, true],
        );
        let g = grid(&[3.5]);
        let w =
            censoring_weights(&d, &CensoringModel::MarginalReverseKm, &WeightOptions::default())
                .unwrap();
        let marginal = ipcw_pseudo(&d, &g, &w).unwrap();
        let cond = conditional_ipcw_pseudo(&d, &g, &w).unwrap();
        assert_eq!(cond.intervals.len(), 1);
        assert!(cond.dropped.is_empty());
        let iv = &cond.intervals[0];
        assert_eq!(iv.origin, 0.0);
        assert_eq!(iv.ids.len(), 6);
        for i in 0..6 {
            assert!(
                (iv.values[i] - marginal.value(i, 0)).abs() < 1e-12,
                "subject {i}: {} vs {}",
                iv.values[i],
                marginal.value(i, 0)
            );
        }
    }

    #[test]
    fn conditional_drops_thin_risk_sets() {
        let d = dataset(&[1.0, 1.5, 2.0], &[true, true, true]);
        let g = grid(&[1.8, 5.0, 6.0]);
        let w = censoring_weights(&d, &CensoringModel::Unit, &WeightOptions::default()).unwrap();
        let cond = conditional_ipcw_pseudo(&d, &g, &w).unwrap();
        // Risk sets: [0, 1.8] has 3 subjects, (1.8, 5] has 1, (5, 6] has 0.
        assert_eq!(cond.intervals.len(), 1);
        assert_eq!(cond.dropped, vec![1, 2]);
    }

    #[test]
    fn pseudo_csv_roundtrip() {
        let d = dataset(&[1.0, 2.0, 3.0], &[true, false, true]);
        let g = grid(&[1.5, 2.5]);
        let p = jackknife_pseudo(&d, &g).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_pseudo_csv(&path, &p).unwrap();
        let back = read_pseudo_csv(&path).unwrap();
        assert_eq!(back.ids, p.ids);
        assert_eq!(back.grid.points(), p.grid.points());
        assert_eq!(back.values, p.values);
    }
}
