//! Feed-forward network architecture, flat parameter layout, and forward
//! evaluation (plain and on the autodiff tape).
//!
//! Parameters live in one flat vector: for each layer, the weight matrix in
//! row-major (output, input) order, then the bias vector. The default
//! regression architecture is `[d_in, 8, 4, 1]` with `tanh`, `tanh`,
//! `sigmoid` activations, so outputs land in (0, 1).

use serde::{Deserialize, Serialize};

use crate::autodiff::{logistic, Tape, Var};
use crate::error::{Error, Result};

/// Supported layer activations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Sigmoid,
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => logistic(x),
            Activation::Identity => x,
        }
    }

    fn apply_tape(self, tape: &mut Tape, v: Var) -> Var {
        match self {
            Activation::Tanh => tape.tanh(v),
            Activation::Sigmoid => tape.sigmoid(v),
            Activation::Identity => v,
        }
    }
}

/// Layer sizes plus one activation per layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkArchitecture {
    layer_sizes: Vec<usize>,
    activations: Vec<Activation>,
}

/// Reusable forward-pass buffers.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

/// One layer's parameters viewed inside the flat vector.
#[derive(Debug, Clone, Copy)]
pub struct LayerView<'a> {
    /// Row-major (output, input) weight matrix.
    pub w: &'a [f64],
    /// One bias per output unit.
    pub b: &'a [f64],
    /// Input width.
    pub n_in: usize,
    /// Output width.
    pub n_out: usize,
}

impl NetworkArchitecture {
    /// Validates sizes and pairs each layer with an activation.
    pub fn new(layer_sizes: Vec<usize>, activations: Vec<Activation>) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::invalid(
                "network needs at least an input and an output layer",
            ));
        }
        if layer_sizes.iter().any(|&s| s == 0) {
            return Err(Error::invalid("network layer sizes must be positive"));
        }
        if activations.len() != layer_sizes.len() - 1 {
            return Err(Error::invalid(format!(
                "expected {} activations for {} layers, got {}",
                layer_sizes.len() - 1,
                layer_sizes.len(),
                activations.len()
            )));
        }
        Ok(NetworkArchitecture {
            layer_sizes,
            activations,
        })
    }

    /// Default regression network `[d_in, 8, 4, 1]` with tanh, tanh, sigmoid.
    pub fn default_for_input(d_in: usize) -> Result<Self> {
        NetworkArchitecture::new(
            vec![d_in, 8, 4, 1],
            vec![Activation::Tanh, Activation::Tanh, Activation::Sigmoid],
        )
    }

    /// Layer sizes including input and output widths.
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    /// One activation per non-input layer.
    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    /// Input width.
    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    /// Output width.
    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().expect("validated non-empty")
    }

    /// Total number of weights and biases.
    pub fn param_count(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| (w[0] + 1) * w[1])
            .sum()
    }

    /// Splits a flat parameter vector into per-layer views.
    pub fn layers<'a>(&self, params: &'a [f64]) -> Result<Vec<LayerView<'a>>> {
        if params.len() != self.param_count() {
            return Err(Error::invalid(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        let mut out = Vec::with_capacity(self.layer_sizes.len() - 1);
        let mut off = 0;
        for w in self.layer_sizes.windows(2) {
            let (n_in, n_out) = (w[0], w[1]);
            let wlen = n_in * n_out;
            out.push(LayerView {
                w: &params[off..off + wlen],
                b: &params[off + wlen..off + wlen + n_out],
                n_in,
                n_out,
            });
            off += wlen + n_out;
        }
        Ok(out)
    }

    /// Packs per-layer weights and biases back into a flat vector.
    ///
    /// Inverse of [`NetworkArchitecture::layers`].
    pub fn pack(&self, layers: &[(Vec<f64>, Vec<f64>)]) -> Result<Vec<f64>> {
        if layers.len() != self.layer_sizes.len() - 1 {
            return Err(Error::invalid("wrong number of layers to pack"));
        }
        let mut flat = Vec::with_capacity(self.param_count());
        for (l, (w, b)) in layers.iter().enumerate() {
            let (n_in, n_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            if w.len() != n_in * n_out || b.len() != n_out {
                return Err(Error::invalid(format!("layer {l} has wrong shapes")));
            }
            flat.extend_from_slice(w);
            flat.extend_from_slice(b);
        }
        Ok(flat)
    }

    /// Plain forward pass for a single-output network.
    pub fn forward(&self, params: &[f64], x: &[f64], scratch: &mut Scratch) -> Result<f64> {
        if x.len() != self.input_dim() {
            return Err(Error::invalid(format!(
                "input has {} features, network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        if self.output_dim() != 1 {
            return Err(Error::invalid("forward expects a single-output network"));
        }
        let layers = self.layers(params)?;
        scratch.a.clear();
        scratch.a.extend_from_slice(x);
        for (layer, &act) in layers.iter().zip(&self.activations) {
            scratch.b.clear();
            for j in 0..layer.n_out {
                let row = &layer.w[j * layer.n_in..(j + 1) * layer.n_in];
                let mut v = layer.b[j];
                for (wi, xi) in row.iter().zip(&scratch.a) {
                    v += wi * xi;
                }
                scratch.b.push(act.apply(v));
            }
            std::mem::swap(&mut scratch.a, &mut scratch.b);
        }
        Ok(scratch.a[0])
    }

    /// Forward pass on the tape: `param_vars` must hold `param_count()`
    /// variables in flat layout; the input row enters as constants.
    pub fn forward_tape(&self, tape: &mut Tape, param_vars: &[Var], x: &[f64]) -> Result<Var> {
        if param_vars.len() != self.param_count() {
            return Err(Error::invalid(format!(
                "expected {} parameter variables, got {}",
                self.param_count(),
                param_vars.len()
            )));
        }
        if x.len() != self.input_dim() {
            return Err(Error::invalid(format!(
                "input has {} features, network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut acts: Vec<Var> = Vec::new();
        let mut off = 0;
        let mut extended: Vec<Var> = Vec::new();
        let mut x_ext: Vec<f64> = Vec::with_capacity(x.len() + 1);
        for (l, w) in self.layer_sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let wlen = n_in * n_out;
            let w_vars = &param_vars[off..off + wlen];
            let b_vars = &param_vars[off + wlen..off + wlen + n_out];
            let mut next = Vec::with_capacity(n_out);
            for j in 0..n_out {
                let row = &w_vars[j * n_in..(j + 1) * n_in];
                let pre = if l == 0 {
                    // First layer: inputs are constants, fold the bias in as
                    // one more coefficient-1 term.
                    extended.clear();
                    extended.extend_from_slice(row);
                    extended.push(b_vars[j]);
                    x_ext.clear();
                    x_ext.extend_from_slice(x);
                    x_ext.push(1.0);
                    tape.dot_const(&extended, &x_ext, 0.0)
                } else {
                    let d = tape.dot(row, &acts);
                    tape.add(d, b_vars[j])
                };
                next.push(self.activations[l].apply_tape(tape, pre));
            }
            acts = next;
            off += wlen + n_out;
        }
        acts.first()
            .copied()
            .ok_or_else(|| Error::invalid("network produced no output"))
    }
}

// ── Input standardization ───────────────────────────────────────────────────

/// Columnwise standardization fitted on training covariates and re-applied
/// verbatim at prediction time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Standardizer {
    /// Column means.
    pub mean: Vec<f64>,
    /// Column sample standard deviations (1 where a column is constant).
    pub sd: Vec<f64>,
}

impl Standardizer {
    /// Fits means and sample standard deviations over rows.
    pub fn fit(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("cannot fit standardizer on zero rows"));
        }
        let d = rows[0].len();
        let mut mean = vec![0.0; d];
        for row in rows {
            if row.len() != d {
                return Err(Error::invalid("ragged rows in standardizer fit"));
            }
            for (m, &x) in mean.iter_mut().zip(*row) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut sd = vec![0.0; d];
        for row in rows {
            for (s, (&x, &m)) in sd.iter_mut().zip(row.iter().zip(&mean)) {
                *s += (x - m) * (x - m);
            }
        }
        for s in &mut sd {
            *s = if n > 1 { (*s / (n as f64 - 1.0)).sqrt() } else { 0.0 };
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Ok(Standardizer { mean, sd })
    }

    /// Number of columns.
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Returns the standardized copy of one row.
    pub fn transform(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.dim() {
            return Err(Error::invalid(format!(
                "row has {} columns, standardizer expects {}",
                row.len(),
                self.dim()
            )));
        }
        Ok(row
            .iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(&x, (&m, &s))| (x - m) / s)
            .collect())
    }
}

// ── Point-estimate checkpoints ──────────────────────────────────────────────

/// JSON-serializable (architecture, flat parameters) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointCheckpoint {
    /// Network shape the parameters belong to.
    pub architecture: NetworkArchitecture,
    /// Flat parameter vector.
    pub params: Vec<f64>,
}

impl PointCheckpoint {
    /// Validates that the parameter count matches the architecture.
    pub fn new(architecture: NetworkArchitecture, params: Vec<f64>) -> Result<Self> {
        if params.len() != architecture.param_count() {
            return Err(Error::invalid(format!(
                "checkpoint has {} parameters, architecture needs {}",
                params.len(),
                architecture.param_count()
            )));
        }
        Ok(PointCheckpoint {
            architecture,
            params,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_count_matches_layout() {
        let arch = NetworkArchitecture::default_for_input(20).unwrap();
        assert_eq!(arch.param_count(), 20 * 8 + 8 + 8 * 4 + 4 + 4 + 1);
        assert_eq!(arch.layer_sizes(), &[20, 8, 4, 1]);
    }

    #[test]
    fn pack_unpack_roundtrip() {
        let arch = NetworkArchitecture::default_for_input(3).unwrap();
        let flat: Vec<f64> = (0..arch.param_count()).map(|i| i as f64 / 10.0).collect();
        let layers = arch.layers(&flat).unwrap();
        let owned: Vec<(Vec<f64>, Vec<f64>)> = layers
            .iter()
            .map(|l| (l.w.to_vec(), l.b.to_vec()))
            .collect();
        assert_eq!(arch.pack(&owned).unwrap(), flat);
    }

    #[test]
    fn tiny_network_forward_matches_hand_value() {
        // [1, 1, 1] with tanh then sigmoid, w1 = 1, b1 = 0, w2 = 2, b2 = -1:
        // x = 0.5 gives sigmoid(2 tanh(0.5) - 1) ~ 0.4811.
        let arch = NetworkArchitecture::new(
            vec![1, 1, 1],
            vec![Activation::Tanh, Activation::Sigmoid],
        )
        .unwrap();
        let params = vec![1.0, 0.0, 2.0, -1.0];
        let mut scratch = Scratch::default();
        let y = arch.forward(&params, &[0.5], &mut scratch).unwrap();
        assert!((y - 0.4810676344379233).abs() < 1e-12);
        assert!((y - 0.4811).abs() < 1e-4);
    }

    #[test]
    fn zero_params_give_half_through_sigmoid() {
        let arch = NetworkArchitecture::default_for_input(5).unwrap();
        let params = vec![0.0; arch.param_count()];
        let mut scratch = Scratch::default();
        let y = arch
            .forward(&params, &[1.0, -2.0, 0.5, 3.0, 0.0], &mut scratch)
            .unwrap();
        assert_eq!(y, 0.5);
    }

    #[test]
    fn tape_forward_matches_plain_forward() {
        let arch = NetworkArchitecture::default_for_input(4).unwrap();
        let params: Vec<f64> = (0..arch.param_count())
            .map(|i| ((i * 37 % 19) as f64 - 9.0) / 23.0)
            .collect();
        let x = [0.3, -1.2, 0.8, 2.0];
        let mut scratch = Scratch::default();
        let plain = arch.forward(&params, &x, &mut scratch).unwrap();
        let mut tape = Tape::new();
        let vars: Vec<_> = params.iter().map(|&p| tape.var(p)).collect();
        let out = arch.forward_tape(&mut tape, &vars, &x).unwrap();
        assert!((tape.value(out) - plain).abs() < 1e-14);
    }

    #[test]
    fn architecture_validation() {
        assert!(NetworkArchitecture::new(vec![3], vec![]).is_err());
        assert!(NetworkArchitecture::new(vec![3, 0], vec![Activation::Tanh]).is_err());
        assert!(NetworkArchitecture::new(vec![3, 2], vec![]).is_err());
    }

    #[test]
    fn standardizer_centers_and_scales() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 5.0], vec![3.0, 5.0], vec![5.0, 5.0]];
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let s = Standardizer::fit(&refs).unwrap();
        assert_eq!(s.mean, vec![3.0, 5.0]);
        assert_eq!(s.sd[1], 1.0, "constant column falls back to sd 1");
        let z = s.transform(&[5.0, 5.0]).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-12);
        assert_eq!(z[1], 0.0);
    }

    #[test]
    fn checkpoint_roundtrips_through_json() {
        let arch = NetworkArchitecture::default_for_input(2).unwrap();
        let params: Vec<f64> = (0..arch.param_count()).map(|i| i as f64 * 0.01).collect();
        let cp = PointCheckpoint::new(arch, params).unwrap();
        let text = serde_json::to_string(&cp).unwrap();
        let back: PointCheckpoint = serde_json::from_str(&text).unwrap();
        assert_eq!(back.params, cp.params);
        assert_eq!(back.architecture, cp.architecture);
    }
}
