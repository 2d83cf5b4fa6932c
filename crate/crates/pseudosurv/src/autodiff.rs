//! Reverse-mode automatic differentiation on a flat tape.
//!
//! The engine supports a closed primitive set: affine combinations (dot
//! products with constant or variable factors, plus constants), `tanh`,
//! `sigmoid`, `exp`, `ln`, `square`, elementwise arithmetic, `sum`, `mean`,
//! and a normal log-density composed from those. Local partials are computed
//! during the forward pass and stored in one arena, so the backward sweep is
//! a single reverse loop.
//!
//! # Example
//!
//! ```
//! use pseudosurv::autodiff::Tape;
//!
//! let mut tape = Tape::new();
//! let x = tape.var(0.5);
//! let y = tape.tanh(x);
//! let z = tape.square(y);
//! let grads = tape.gradient(z).unwrap();
//! let expect = 2.0 * 0.5f64.tanh() * (1.0 - 0.5f64.tanh().powi(2));
//! assert!((grads[x.index()] - expect).abs() < 1e-12);
//! ```

use crate::error::{Error, Result};

/// Handle to a tape node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(u32);

impl Var {
    /// Position of this node on the tape (usable as a gradient index).
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Gradient tape. Nodes are appended during the forward pass; `gradient`
/// runs one reverse sweep and returns d(root)/d(node) for every node.
#[derive(Debug, Default)]
pub struct Tape {
    vals: Vec<f64>,
    args_start: Vec<u32>,
    args_len: Vec<u32>,
    parents: Vec<u32>,
    partials: Vec<f64>,
}

/// Numerically stable logistic function.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Tape {
    /// Empty tape.
    pub fn new() -> Self {
        Tape::default()
    }

    /// Clears all nodes but keeps allocated capacity for reuse.
    pub fn reset(&mut self) {
        self.vals.clear();
        self.args_start.clear();
        self.args_len.clear();
        self.parents.clear();
        self.partials.clear();
    }

    /// Number of nodes currently on the tape.
    pub fn len(&self) -> usize {
        self.vals.len()
    }

    /// True when no nodes have been recorded.
    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Value of a node.
    pub fn value(&self, v: Var) -> f64 {
        self.vals[v.index()]
    }

    fn push(&mut self, val: f64, args: &[(Var, f64)]) -> Var {
        let start = self.parents.len() as u32;
        for &(p, d) in args {
            self.parents.push(p.0);
            self.partials.push(d);
        }
        self.vals.push(val);
        self.args_start.push(start);
        self.args_len.push(args.len() as u32);
        Var((self.vals.len() - 1) as u32)
    }

    // ── Leaves and arithmetic ───────────────────────────────────────────

    /// New leaf variable with value `x`.
    pub fn var(&mut self, x: f64) -> Var {
        self.push(x, &[])
    }

    /// `a + b`
    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let v = self.vals[a.index()] + self.vals[b.index()];
        self.push(v, &[(a, 1.0), (b, 1.0)])
    }

    /// `a - b`
    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let v = self.vals[a.index()] - self.vals[b.index()];
        self.push(v, &[(a, 1.0), (b, -1.0)])
    }

    /// `a * b`
    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (self.vals[a.index()], self.vals[b.index()]);
        self.push(va * vb, &[(a, vb), (b, va)])
    }

    /// `-a`
    pub fn neg(&mut self, a: Var) -> Var {
        let v = -self.vals[a.index()];
        self.push(v, &[(a, -1.0)])
    }

    /// `c * a` for a constant `c`.
    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let v = c * self.vals[a.index()];
        self.push(v, &[(a, c)])
    }

    /// `a + c` for a constant `c`.
    pub fn add_const(&mut self, a: Var, c: f64) -> Var {
        let v = self.vals[a.index()] + c;
        self.push(v, &[(a, 1.0)])
    }

    /// `c - a` for a constant `c`.
    pub fn sub_from_const(&mut self, c: f64, a: Var) -> Var {
        let v = c - self.vals[a.index()];
        self.push(v, &[(a, -1.0)])
    }

    // ── Nonlinearities ──────────────────────────────────────────────────

    /// Hyperbolic tangent.
    pub fn tanh(&mut self, a: Var) -> Var {
        let y = self.vals[a.index()].tanh();
        self.push(y, &[(a, 1.0 - y * y)])
    }

    /// Logistic sigmoid.
    pub fn sigmoid(&mut self, a: Var) -> Var {
        let y = logistic(self.vals[a.index()]);
        self.push(y, &[(a, y * (1.0 - y))])
    }

    /// Exponential.
    pub fn exp(&mut self, a: Var) -> Var {
        let y = self.vals[a.index()].exp();
        self.push(y, &[(a, y)])
    }

    /// Natural logarithm.
    pub fn ln(&mut self, a: Var) -> Var {
        let x = self.vals[a.index()];
        self.push(x.ln(), &[(a, 1.0 / x)])
    }

    /// `a^2`
    pub fn square(&mut self, a: Var) -> Var {
        let x = self.vals[a.index()];
        self.push(x * x, &[(a, 2.0 * x)])
    }

    // ── Aggregates ──────────────────────────────────────────────────────

    /// Dot product of variables with constant coefficients, plus a constant:
    /// `sum_k consts[k] * vars[k] + c0`.
    pub fn dot_const(&mut self, vars: &[Var], consts: &[f64], c0: f64) -> Var {
        assert_eq!(vars.len(), consts.len(), "dot_const length mismatch");
        let start = self.parents.len() as u32;
        let mut v = c0;
        for (p, &c) in vars.iter().zip(consts) {
            v += c * self.vals[p.index()];
            self.parents.push(p.0);
            self.partials.push(c);
        }
        self.vals.push(v);
        self.args_start.push(start);
        self.args_len.push(vars.len() as u32);
        Var((self.vals.len() - 1) as u32)
    }

    /// Dot product of two variable slices: `sum_k xs[k] * ys[k]`.
    pub fn dot(&mut self, xs: &[Var], ys: &[Var]) -> Var {
        assert_eq!(xs.len(), ys.len(), "dot length mismatch");
        let start = self.parents.len() as u32;
        let mut v = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            let (vx, vy) = (self.vals[x.index()], self.vals[y.index()]);
            v += vx * vy;
            self.parents.push(x.0);
            self.partials.push(vy);
            self.parents.push(y.0);
            self.partials.push(vx);
        }
        self.vals.push(v);
        self.args_start.push(start);
        self.args_len.push(2 * xs.len() as u32);
        Var((self.vals.len() - 1) as u32)
    }

    /// Sum of variables.
    pub fn sum(&mut self, vars: &[Var]) -> Var {
        let start = self.parents.len() as u32;
        let mut v = 0.0;
        for p in vars {
            v += self.vals[p.index()];
            self.parents.push(p.0);
            self.partials.push(1.0);
        }
        self.vals.push(v);
        self.args_start.push(start);
        self.args_len.push(vars.len() as u32);
        Var((self.vals.len() - 1) as u32)
    }

    /// Mean of variables.
    pub fn mean(&mut self, vars: &[Var]) -> Var {
        assert!(!vars.is_empty(), "mean of zero variables");
        let s = self.sum(vars);
        self.scale(s, 1.0 / vars.len() as f64)
    }

    /// Log-density of a constant observation `x` under `N(mu, sigma^2)`,
    /// composed from the primitive set. `sigma` must evaluate positive.
    pub fn normal_lpdf(&mut self, x: f64, mu: Var, sigma: Var) -> Var {
        const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;
        let resid = self.sub_from_const(x, mu);
        let z = self.square(resid);
        let ln_sigma = self.ln(sigma);
        // sigma^-2 as exp(-2 ln sigma); the primitive set has no division.
        let m2ls = self.scale(ln_sigma, -2.0);
        let inv_var = self.exp(m2ls);
        let quad = self.mul(z, inv_var);
        let neg_half_quad = self.scale(quad, -0.5);
        let neg_ln_sigma = self.neg(ln_sigma);
        let a = self.add_const(neg_ln_sigma, -HALF_LN_2PI);
        self.add(a, neg_half_quad)
    }

    // ── Backward ────────────────────────────────────────────────────────

    /// Reverse sweep from `root`; returns d(root)/d(node) for every node.
    ///
    /// Errors if the root value is not finite.
    pub fn gradient(&self, root: Var) -> Result<Vec<f64>> {
        let rv = self.vals[root.index()];
        if !rv.is_finite() {
            return Err(Error::NonFinite(format!(
                "objective evaluated to {rv}; cannot differentiate"
            )));
        }
        let mut grad = vec![0.0; self.vals.len()];
        grad[root.index()] = 1.0;
        for k in (0..=root.index()).rev() {
            let g = grad[k];
            if g == 0.0 {
                continue;
            }
            let start = self.args_start[k] as usize;
            let len = self.args_len[k] as usize;
            for t in start..start + len {
                grad[self.parents[t] as usize] += g * self.partials[t];
            }
        }
        Ok(grad)
    }
}

/// Evaluates a scalar objective built on a fresh tape and returns its value
/// and gradient with respect to `params`.
///
/// Errors if the objective or any requested gradient entry is non-finite.
pub fn grad_scalar<F>(params: &[f64], build: F) -> Result<(f64, Vec<f64>)>
where
    F: FnOnce(&mut Tape, &[Var]) -> Result<Var>,
{
    let mut tape = Tape::new();
    let vars: Vec<Var> = params.iter().map(|&p| tape.var(p)).collect();
    let root = build(&mut tape, &vars)?;
    let value = tape.value(root);
    let grads = tape.gradient(root)?;
    let out: Vec<f64> = vars.iter().map(|v| grads[v.index()]).collect();
    if out.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("gradient entry is not finite".into()));
    }
    Ok((value, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Central finite difference of a scalar function.
    fn fd<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], i: usize) -> f64 {
        let h = 1e-5 * x[i].abs().max(1.0);
        let mut hi = x.to_vec();
        let mut lo = x.to_vec();
        hi[i] += h;
        lo[i] -= h;
        (f(&hi) - f(&lo)) / (2.0 * h)
    }

    fn check_grad<B, F>(params: &[f64], build: B, eval: F)
    where
        B: Fn(&mut Tape, &[Var]) -> Result<Var>,
        F: Fn(&[f64]) -> f64,
    {
        let (v, g) = grad_scalar(params, &build).unwrap();
        assert!((v - eval(params)).abs() < 1e-12, "value mismatch");
        for i in 0..params.len() {
            let want = fd(&eval, params, i);
            let scale = want.abs().max(1e-8);
            assert!(
                (g[i] - want).abs() / scale < 1e-5,
                "grad[{i}]: got {} want {want}",
                g[i]
            );
        }
    }

    #[test]
    fn primitive_gradients_match_finite_differences() {
        check_grad(
            &[0.3, -0.7],
            |t, v| {
                let a = t.mul(v[0], v[1]);
                let b = t.tanh(a);
                Ok(t.square(b))
            },
            |x| (x[0] * x[1]).tanh().powi(2),
        );
        check_grad(
            &[0.9],
            |t, v| {
                let a = t.sigmoid(v[0]);
                let b = t.ln(a);
                Ok(t.exp(b))
            },
            |x| logistic(x[0]).ln().exp(),
        );
        check_grad(
            &[0.2, 0.4, -0.6],
            |t, v| {
                let d = t.dot_const(v, &[1.5, -2.0, 0.25], 0.75);
                let s = t.sum(&[d, v[0]]);
                Ok(t.mean(&[s, v[2]]))
            },
            |x| ((1.5 * x[0] - 2.0 * x[1] + 0.25 * x[2] + 0.75 + x[0]) + x[2]) / 2.0,
        );
        check_grad(
            &[0.2, 0.4, -0.6, 1.1],
            |t, v| Ok(t.dot(&v[..2], &v[2..])),
            |x| x[0] * x[2] + x[1] * x[3],
        );
    }

    #[test]
    fn normal_lpdf_matches_closed_form() {
        let (v, g) = grad_scalar(&[0.4, 0.8], |t, vars| {
            Ok(t.normal_lpdf(1.3, vars[0], vars[1]))
        })
        .unwrap();
        let dens = |mu: f64, s: f64| {
            -0.5 * (2.0 * std::f64::consts::PI).ln() - s.ln() - 0.5 * ((1.3 - mu) / s).powi(2)
        };
        assert!((v - dens(0.4, 0.8)).abs() < 1e-12);
        let eval = |x: &[f64]| dens(x[0], x[1]);
        for i in 0..2 {
            let want = fd(eval, &[0.4, 0.8], i);
            assert!((g[i] - want).abs() < 1e-6, "grad[{i}]");
        }
    }

    #[test]
    fn shared_subexpressions_accumulate() {
        // f = x * x built with mul (not square) must give 2x.
        let (_, g) = grad_scalar(&[0.7], |t, v| Ok(t.mul(v[0], v[0]))).unwrap();
        assert!((g[0] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let err = grad_scalar(&[-1.0], |t, v| Ok(t.ln(v[0]))).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn reset_reuses_capacity() {
        let mut tape = Tape::new();
        let a = tape.var(1.0);
        let _ = tape.tanh(a);
        assert_eq!(tape.len(), 2);
        tape.reset();
        assert!(tape.is_empty());
        let b = tape.var(2.0);
        assert_eq!(tape.value(b), 2.0);
    }
}
