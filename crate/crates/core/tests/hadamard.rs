use std::f64::consts::{FRAC_PI_8, PI, SQRT_2};

use approx::assert_abs_diff_eq;
use catsim::detection::DetectorModel;
use catsim::fock::{self, Beamsplitter, BeamsplitterSpec, FockVector, C64};
use catsim::hadamard::{self, HadamardConfig, HadamardGate};
use catsim::states::{self, QubitSpec, ResourceFamily, ResourceKind, SqueezingPolicy};
use catsim::teleport;
use proptest::prelude::*;

fn dominant(rho: &fock::MixedState) -> FockVector {
    rho.eigen_ensemble()
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
        .1
}

fn gate_on_coefficients(gate: &HadamardGate, mu: C64, nu: C64) -> (C64, C64) {
    let psi = states::qubit_from_coefficients(gate.alpha(), mu, nu, gate.input_dim()).unwrap();
    let out = gate.apply(&psi).unwrap();
    let rho = out.state.unwrap();
    assert!(rho.purity() > 1.0 - 1e-9);
    let (cp, cm, rest) = hadamard::qubit_coefficients(&dominant(&rho), gate.alpha()).unwrap();
    assert!(rest < 1e-18);
    (cp, cm)
}

fn parallel(a: (C64, C64), b: (C64, C64)) -> f64 {
    (a.0 * b.1 - a.1 * b.0).norm() / ((a.0.norm_sqr() + a.1.norm_sqr()) * (b.0.norm_sqr() + b.1.norm_sqr())).sqrt()
}

#[test]
fn conjugated_gate_squares_to_identity() {
    let alpha = 1.0;
    let gate = HadamardGate::new(alpha, ResourceKind::ExactCat, HadamardConfig::default(), DetectorModel::ideal()).unwrap();
    for (mu, nu) in [(C64::new(0.6, 0.1), C64::new(-0.2, 0.7)), (C64::new(1.0, 0.0), C64::new(0.0, 0.0))] {
        let once = gate_on_coefficients(&gate, mu, nu);
        assert!(parallel(once, hadamard::hadamard_coefficients(mu, nu)) < 1e-9);

        let mut c = (mu, nu);
        for _ in 0..2 {
            let (a, b) = hadamard::z_prime_inverse(c.0, c.1);
            let (a, b) = gate_on_coefficients(&gate, a, b);
            c = hadamard::z_prime(a, b);
        }
        assert!(parallel(c, (mu, nu)) < 1e-9);
    }
}

#[test]
fn fringe_mirrors_under_displacement_sign() {
    let alpha = 0.5;
    let deltas = [-1.7, -0.9, -0.2, 0.2, 0.9, 1.7];
    let family = ResourceFamily::SqueezedPhoton(SqueezingPolicy::Numeric);
    let f = hadamard::fringe_sweep(alpha, family, &deltas, DetectorModel::new(0.9).unwrap()).unwrap();
    let n = f.len();
    for k in 0..n {
        assert_abs_diff_eq!(f[k].p_plus, f[n - 1 - k].p_minus, epsilon = 1e-9);
        assert_abs_diff_eq!(f[k].p_gate, f[n - 1 - k].p_gate, epsilon = 1e-9);
    }
}

#[test]
fn exact_cat_fringe_is_balanced_at_zero() {
    let f = hadamard::fringe_sweep(0.5, ResourceFamily::ExactCat, &[0.0], DetectorModel::ideal()).unwrap();
    assert_abs_diff_eq!(f[0].p_plus, f[0].p_minus, epsilon = 1e-12);
    assert!(f[0].p_plus > 0.1);
}

/// Heralded probability and fidelity from pure true-count patterns weighted by
/// `m eta (1 - eta)^(m - 1)` on each counter.
fn lossy_herald_oracle(input: &QubitSpec, kind: ResourceKind, eta: f64, d: usize) -> (f64, f64) {
    let psi = states::qubit_state(input, d).unwrap();
    let resource = teleport::bell_resource(input.alpha, &kind, d).unwrap();
    let joint = fock::tensor(&[&psi, &resource]).unwrap();
    let mixed = Beamsplitter::new(BeamsplitterSpec::symmetric(FRAC_PI_8), d).unwrap().apply(&joint, (0, 1)).unwrap();
    let target = hadamard::hadamard_target(input, d).unwrap();
    let one = |m: usize| m as f64 * eta * (1.0 - eta).powi(m as i32 - 1);
    let (mut p, mut f) = (0.0, 0.0);
    for n in 1..d {
        for m in 1..d - n {
            let c = fock::condition_on_outcome(&mixed, &[0, 1], &[n, m]).unwrap();
            if let Some(s) = c.state {
                let w = one(n) * one(m) * c.probability;
                p += w;
                f += w * target.inner(&s).unwrap().norm_sqr();
            }
        }
    }
    (p, f / p)
}

#[test]
fn lossy_herald_matches_oracle() {
    let alpha = 0.7;
    let input = QubitSpec::new(alpha, 1.1, 0.5);
    let d = 26;
    let kinds = [
        ResourceKind::ExactCat,
        ResourceFamily::SqueezedPhoton(SqueezingPolicy::Numeric).kind_for(SQRT_2 * alpha),
    ];
    for kind in kinds {
        for eta in [1.0, 0.8] {
            let gate = HadamardGate::with_dims(alpha, kind, HadamardConfig::default(), DetectorModel::new(eta).unwrap(), d, d).unwrap();
            let out = gate.apply(&states::qubit_state(&input, d).unwrap()).unwrap();
            let (p, f) = lossy_herald_oracle(&input, kind, eta, d);
            assert_abs_diff_eq!(out.probability, p, epsilon = 1e-12);
            assert_abs_diff_eq!(out.fidelity(&hadamard::hadamard_target(&input, d).unwrap()).unwrap(), f, epsilon = 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn one_one_herald_follows_count_law(alpha in 0.3..1.2f64, theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let input = QubitSpec::new(alpha, theta, phi);
        let gate = HadamardGate::new(alpha, ResourceKind::ExactCat, HadamardConfig::default(), DetectorModel::ideal()).unwrap();
        let out = gate.apply(&states::qubit_state(&input, gate.input_dim()).unwrap()).unwrap();
        let closed = hadamard::count_prob_closed(&input, 1, 1).unwrap();
        prop_assert!((out.probability - closed).abs() < 1e-10 * closed.max(1e-3));
        let f = out.fidelity(&hadamard::hadamard_target(&input, gate.output_dim()).unwrap()).unwrap();
        prop_assert!((f - 1.0).abs() < 1e-9);
    }

    #[test]
    fn kernel_agrees_with_direct_gate(theta in 0.0..PI, phi in 0.0..(2.0 * PI), eta in 0.7..=1.0f64) {
        let alpha = 0.6;
        let kind = ResourceFamily::SqueezedPhoton(SqueezingPolicy::Numeric).kind_for(SQRT_2 * alpha);
        let gate = HadamardGate::new(alpha, kind, HadamardConfig::default(), DetectorModel::new(eta).unwrap()).unwrap();
        let input = QubitSpec::new(alpha, theta, phi);
        let out = gate.apply(&states::qubit_state(&input, gate.input_dim()).unwrap()).unwrap();
        let k = gate.kernel().unwrap().evaluate(&input).unwrap();
        prop_assert!((out.probability - k.probability).abs() < 1e-12);
        let f = out.fidelity(&hadamard::hadamard_target(&input, gate.output_dim()).unwrap()).unwrap();
        prop_assert!((f - k.fidelity).abs() < 1e-8);
    }
}
