//! Central finite-difference oracle for the reverse-mode gradients.
//!
//! Gradients of the network output and of the full regression log joint are
//! compared coordinate by coordinate against `(f(x + h) - f(x - h)) / 2h`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use pseudosurv::advi::{LogJoint, NetworkRegression, PriorSpec};
use pseudosurv::autodiff::Tape;
use pseudosurv::network::NetworkArchitecture;

const FD_STEP: f64 = 1e-5;
const REL_TOL: f64 = 1e-5;
const ABS_TOL: f64 = 1e-8;

/// Checks one gradient vector against central differences of `f`.
fn check_gradient(
    label: &str,
    point: &[f64],
    grad: &[f64],
    mut f: impl FnMut(&[f64]) -> f64,
) -> usize {
    let mut x = point.to_vec();
    let mut checked = 0;
    for d in 0..point.len() {
        let keep = x[d];
        x[d] = keep + FD_STEP;
        let up = f(&x);
        x[d] = keep - FD_STEP;
        let down = f(&x);
        x[d] = keep;
        let fd = (up - down) / (2.0 * FD_STEP);
        let diff = (grad[d] - fd).abs();
        let scale = grad[d].abs().max(fd.abs());
        assert!(
            diff <= REL_TOL * scale + ABS_TOL,
            "{label}: coordinate {d}: reverse {:.12e} vs central difference {fd:.12e}",
            grad[d]
        );
        checked += 1;
    }
    checked
}

#[test]
fn network_forward_gradients_match_central_differences() {
    let mut rng = ChaCha12Rng::seed_from_u64(4242);
    let mut total = 0usize;
    for trial in 0..6 {
        let d_in = rng.gen_range(1..=6);
        let arch = NetworkArchitecture::default_for_input(d_in).unwrap();
        let params: Vec<f64> = (0..arch.param_count())
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut rng);
                0.5 * e
            })
            .collect();
        let input: Vec<f64> = (0..d_in)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();

        let mut tape = Tape::new();
        let vars: Vec<_> = params.iter().map(|&p| tape.var(p)).collect();
        let out = arch.forward_tape(&mut tape, &vars, &input).unwrap();
        let grads = tape.gradient(out).unwrap();
        let grad: Vec<f64> = vars.iter().map(|v| grads[v.index()]).collect();

        let mut scratch = pseudosurv::network::Scratch::default();
        total += check_gradient(
            &format!("forward trial {trial}"),
            &params,
            &grad,
            |theta| arch.forward(theta, &input, &mut scratch).unwrap(),
        );
    }
    assert!(total >= 100, "only {total} coordinates checked");
}

#[test]
fn log_joint_gradients_match_central_differences() {
    let mut rng = ChaCha12Rng::seed_from_u64(90125);
    let mut total = 0usize;
    for trial in 0..4 {
        let d_in = rng.gen_range(1..=4);
        let n_rows = rng.gen_range(3..=12);
        let arch = NetworkArchitecture::default_for_input(d_in).unwrap();
        let inputs: Vec<Vec<f64>> = (0..n_rows)
            .map(|_| (0..d_in).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let targets: Vec<f64> = (0..n_rows).map(|_| rng.gen_range(0.0..1.0)).collect();
        let model =
            NetworkRegression::new(&arch, &inputs, &targets, PriorSpec::default()).unwrap();

        let theta: Vec<f64> = (0..model.dim())
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut rng);
                0.4 * e
            })
            .collect();

        let mut tape = Tape::new();
        let vars: Vec<_> = theta.iter().map(|&x| tape.var(x)).collect();
        let root = model.build(&mut tape, &vars).unwrap();
        let grads = tape.gradient(root).unwrap();
        let grad: Vec<f64> = vars.iter().map(|v| grads[v.index()]).collect();

        total += check_gradient(&format!("log joint trial {trial}"), &theta, &grad, |x| {
            model.log_joint(x).unwrap()
        });
    }
    assert!(total >= 100, "only {total} coordinates checked");
}

#[test]
fn gradients_stay_correct_at_extreme_noise_coordinates() {
    // Large |zeta| saturates the logistic transform; the gradient must stay
    // finite and match the finite difference even there.
    let arch = NetworkArchitecture::default_for_input(2).unwrap();
    let inputs = vec![vec![0.3, -0.4], vec![-1.0, 0.8], vec![0.0, 0.1]];
    let targets = vec![0.7, 0.4, 0.55];
    let model = NetworkRegression::new(&arch, &inputs, &targets, PriorSpec::default()).unwrap();

    for &zeta in &[-6.0, 6.0] {
        let mut theta = vec![0.05; model.dim()];
        *theta.last_mut().unwrap() = zeta;
        let mut tape = Tape::new();
        let vars: Vec<_> = theta.iter().map(|&x| tape.var(x)).collect();
        let root = model.build(&mut tape, &vars).unwrap();
        let grads = tape.gradient(root).unwrap();
        let grad: Vec<f64> = vars.iter().map(|v| grads[v.index()]).collect();
        assert!(grad.iter().all(|g| g.is_finite()));
        check_gradient(&format!("zeta {zeta}"), &theta, &grad, |x| {
            model.log_joint(x).unwrap()
        });
    }
}
