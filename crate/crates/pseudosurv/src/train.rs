//! Adam optimizer and the frequentist mean-squared-error pre-fit used to
//! initialize variational means.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::autodiff::Tape;
use crate::error::{Error, Result};
use crate::network::NetworkArchitecture;

/// Adam with bias-corrected first and second moments.
#[derive(Debug, Clone)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    /// Step size.
    pub lr: f64,
    /// First-moment decay (0.9).
    pub beta1: f64,
    /// Second-moment decay (0.999).
    pub beta2: f64,
    /// Denominator fuzz (1e-8).
    pub eps: f64,
}

impl Adam {
    /// Fresh optimizer state for `dim` coordinates.
    pub fn new(dim: usize, lr: f64) -> Self {
        Adam {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    fn update(&mut self, params: &mut [f64], grad: &[f64], sign: f64) {
        assert_eq!(params.len(), self.m.len(), "Adam dimension mismatch");
        assert_eq!(grad.len(), self.m.len(), "Adam dimension mismatch");
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let mhat = self.m[i] / b1t;
            let vhat = self.v[i] / b2t;
            params[i] += sign * self.lr * mhat / (vhat.sqrt() + self.eps);
        }
    }

    /// One descent step (minimization) in place.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.update(params, grad, -1.0);
    }

    /// One ascent step (maximization) in place.
    pub fn step_ascent(&mut self, params: &mut [f64], grad: &[f64]) {
        self.update(params, grad, 1.0);
    }
}

/// Settings for the mean-squared-error pre-fit.
///
/// The default budget is deliberately light: the pre-fit only has to orient
/// the output scale before the variational stage refines it. Long pre-fits
/// imprint per-subject noise into the initialization, and the
/// bounded-travel variational optimizer then cannot undo it.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointFitConfig {
    /// Full-batch Adam iterations.
    pub iterations: usize,
    /// Adam step size.
    pub learning_rate: f64,
    /// Standard deviation of the normal parameter initialization.
    pub init_sd: f64,
}

impl Default for PointFitConfig {
    fn default() -> Self {
        PointFitConfig {
            iterations: 25,
            learning_rate: 0.01,
            init_sd: 0.1,
        }
    }
}

/// Result of [`point_fit`]: fitted parameters plus the loss trace
/// (`trace[k]` is the MSE before step `k`; the last entry is the final MSE).
#[derive(Debug, Clone)]
pub struct PointFit {
    /// Flat fitted parameters.
    pub params: Vec<f64>,
    /// `iterations + 1` mean-squared-error values.
    pub loss_trace: Vec<f64>,
}

/// Fits network parameters by full-batch Adam on mean squared error.
///
/// Initialization draws every parameter from `N(0, init_sd^2)` using the
/// given seed, so identical inputs and seeds reproduce bit-identical fits.
/// Zero iterations returns the initialization unchanged.
pub fn point_fit(
    arch: &NetworkArchitecture,
    inputs: &[Vec<f64>],
    targets: &[f64],
    config: &PointFitConfig,
    seed: u64,
) -> Result<PointFit> {
    if inputs.is_empty() {
        return Err(Error::invalid("point_fit needs at least one training row"));
    }
    if inputs.len() != targets.len() {
        return Err(Error::invalid(format!(
            "{} input rows but {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    if arch.output_dim() != 1 {
        return Err(Error::invalid("point_fit expects a single-output network"));
    }
    for (i, row) in inputs.iter().enumerate() {
        if row.len() != arch.input_dim() {
            return Err(Error::invalid(format!(
                "input row {i} has {} features, network expects {}",
                row.len(),
                arch.input_dim()
            )));
        }
    }

    let dim = arch.param_count();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let init = Normal::new(0.0, config.init_sd)
        .map_err(|e| Error::invalid(format!("bad init_sd: {e}")))?;
    let mut params: Vec<f64> = (0..dim).map(|_| init.sample(&mut rng)).collect();

    let mut adam = Adam::new(dim, config.learning_rate);
    let mut tape = Tape::new();
    let mut loss_trace = Vec::with_capacity(config.iterations + 1);

    for iter in 0..=config.iterations {
        tape.reset();
        let vars: Vec<_> = params.iter().map(|&p| tape.var(p)).collect();
        let mut sq_terms = Vec::with_capacity(inputs.len());
        for (row, &y) in inputs.iter().zip(targets) {
            let pred = arch.forward_tape(&mut tape, &vars, row)?;
            let resid = tape.add_const(pred, -y);
            sq_terms.push(tape.square(resid));
        }
        let loss = tape.mean(&sq_terms);
        let loss_val = tape.value(loss);
        if !loss_val.is_finite() {
            return Err(Error::Fit(format!(
                "non-finite training loss at iteration {iter}"
            )));
        }
        loss_trace.push(loss_val);
        if iter == config.iterations {
            break;
        }
        let grads = tape.gradient(loss)?;
        let g: Vec<f64> = vars.iter().map(|v| grads[v.index()]).collect();
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Fit(format!(
                "non-finite gradient at iteration {iter}"
            )));
        }
        adam.step(&mut params, &g);
    }

    Ok(PointFit { params, loss_trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_rows(n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let inputs: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let x = i as f64 / n as f64 - 0.5;
                vec![x, x * x]
            })
            .collect();
        let targets: Vec<f64> = inputs.iter().map(|r| 0.3 + 0.4 * r[0]).collect();
        (inputs, targets)
    }

    #[test]
    fn zero_iterations_returns_initialization() {
        let arch = NetworkArchitecture::default_for_input(2).unwrap();
        let (inputs, targets) = toy_rows(10);
        let cfg = PointFitConfig {
            iterations: 0,
            ..PointFitConfig::default()
        };
        let a = point_fit(&arch, &inputs, &targets, &cfg, 7).unwrap();
        let b = point_fit(&arch, &inputs, &targets, &cfg, 7).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.loss_trace.len(), 1);
    }

    #[test]
    fn constant_targets_are_learned() {
        let arch = NetworkArchitecture::default_for_input(2).unwrap();
        let (inputs, _) = toy_rows(24);
        let targets = vec![0.62; 24];
        let cfg = PointFitConfig {
            iterations: 600,
            ..PointFitConfig::default()
        };
        let fit = point_fit(&arch, &inputs, &targets, &cfg, 3).unwrap();
        let mut scratch = crate::network::Scratch::default();
        for row in &inputs {
            let y = arch.forward(&fit.params, row, &mut scratch).unwrap();
            assert!((y - 0.62).abs() < 0.01, "prediction {y}");
        }
    }

    #[test]
    fn loss_trace_shows_steady_progress() {
        // Adam is not monotone step to step; check the trend instead.
        let arch = NetworkArchitecture::default_for_input(2).unwrap();
        let (inputs, targets) = toy_rows(32);
        let cfg = PointFitConfig {
            iterations: 120,
            ..PointFitConfig::default()
        };
        let fit = point_fit(&arch, &inputs, &targets, &cfg, 11).unwrap();
        assert_eq!(fit.loss_trace.len(), 121);
        assert!(
            fit.loss_trace[60] < 0.5 * fit.loss_trace[0],
            "little progress by iteration 60: {} -> {}",
            fit.loss_trace[0],
            fit.loss_trace[60]
        );
        assert!(
            fit.loss_trace[120] < fit.loss_trace[60],
            "no progress in the back half"
        );
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let arch = NetworkArchitecture::default_for_input(2).unwrap();
        let (inputs, targets) = toy_rows(16);
        let cfg = PointFitConfig {
            iterations: 50,
            ..PointFitConfig::default()
        };
        let a = point_fit(&arch, &inputs, &targets, &cfg, 42).unwrap();
        let b = point_fit(&arch, &inputs, &targets, &cfg, 42).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.loss_trace, b.loss_trace);
        let c = point_fit(&arch, &inputs, &targets, &cfg, 43).unwrap();
        assert_ne!(a.params, c.params);
    }

    #[test]
    fn shape_errors_are_reported() {
        let arch = NetworkArchitecture::default_for_input(2).unwrap();
        let cfg = PointFitConfig::default();
        assert!(point_fit(&arch, &[], &[], &cfg, 0).is_err());
        assert!(point_fit(&arch, &[vec![1.0]], &[0.5], &cfg, 0).is_err());
        assert!(point_fit(&arch, &[vec![1.0, 2.0]], &[0.5, 0.1], &cfg, 0).is_err());
    }
}
