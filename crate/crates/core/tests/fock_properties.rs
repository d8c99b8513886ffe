use std::f64::consts::{FRAC_PI_4, PI};

use approx::assert_abs_diff_eq;
use catsim::detection::{DetectorModel, OutcomeClass};
use catsim::fock::{self, Beamsplitter, BeamsplitterConvention, BeamsplitterSpec, FockVector, MixedState, C64};
use catsim::states::{self, QubitSpec};
use proptest::prelude::*;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binom(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Expands `(c a1 + s a2)^n1 (-s a1 + c a2)^n2 |0,0> / sqrt(n1! n2!)` (real
/// convention) or `(c a1 + i s a2)^n1 (i s a1 + c a2)^n2` (symmetric) term by term.
fn oracle_bs(state: &FockVector, spec: BeamsplitterSpec) -> Vec<C64> {
    let d = state.dims()[0];
    let (s, c) = spec.angle.sin_cos();
    let (u11, u12, u21, u22) = match spec.convention {
        BeamsplitterConvention::Real5050 => (C64::from(c), C64::from(s), C64::from(-s), C64::from(c)),
        BeamsplitterConvention::Symmetric => (C64::from(c), C64::new(0.0, s), C64::new(0.0, s), C64::from(c)),
    };
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for n1 in 0..d {
        for n2 in 0..d - n1 {
            let a = state.amplitude(&[n1, n2]);
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let pre = a / (factorial(n1) * factorial(n2)).sqrt();
            for j in 0..=n1 {
                for k in 0..=n2 {
                    let m1 = j + k;
                    let m2 = n1 + n2 - m1;
                    let coef = binom(n1, j)
                        * binom(n2, k)
                        * u11.powu(j as u32)
                        * u12.powu((n1 - j) as u32)
                        * u21.powu(k as u32)
                        * u22.powu((n2 - k) as u32);
                    out[m1 * d + m2] += pre * coef * (factorial(m1) * factorial(m2)).sqrt();
                }
            }
        }
    }
    out
}

fn two_mode(d: usize, raw: &[(f64, f64)]) -> FockVector {
    let amps: Vec<C64> = (0..d * d)
        .map(|k| if k / d + k % d < d { C64::new(raw[k].0, raw[k].1) } else { C64::new(0.0, 0.0) })
        .collect();
    FockVector::new(vec![d, d], amps).unwrap().normalized().unwrap()
}

fn raw_amps(d: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d)
}

#[test]
fn beamsplitter_matches_binomial_expansion() {
    let d = 7;
    let raw: Vec<(f64, f64)> = (0..d * d).map(|k| ((k as f64 * 0.37).sin(), (k as f64 * 0.91).cos())).collect();
    let psi = two_mode(d, &raw);
    for spec in [
        BeamsplitterSpec::real_5050(),
        BeamsplitterSpec { angle: 0.3, convention: BeamsplitterConvention::Real5050 },
        BeamsplitterSpec::symmetric(PI / 8.0),
        BeamsplitterSpec::symmetric(1.2),
    ] {
        let got = Beamsplitter::new(spec, d).unwrap().apply(&psi, (0, 1)).unwrap();
        for (g, w) in got.amplitudes().iter().zip(oracle_bs(&psi, spec)) {
            assert_abs_diff_eq!(g.re, w.re, epsilon = 1e-12);
            assert_abs_diff_eq!(g.im, w.im, epsilon = 1e-12);
        }
    }
}

#[test]
fn real_5050_merges_equal_coherent_pair() {
    let (a, d) = (1.1, 30);
    let coh = fock::coherent_state(C64::new(a, 0.0), d).unwrap();
    let pair = fock::tensor(&[&coh, &coh]).unwrap();
    let out = Beamsplitter::new(BeamsplitterSpec::real_5050(), d).unwrap().apply(&pair, (0, 1)).unwrap();
    let want = fock::tensor(&[
        &FockVector::vacuum(&[d]).unwrap(),
        &fock::coherent_state(C64::new(2f64.sqrt() * a, 0.0), d).unwrap(),
    ])
    .unwrap();
    assert_abs_diff_eq!(out.inner(&want).unwrap().norm_sqr(), 1.0, epsilon = 1e-9);
}

#[test]
fn coherent_photon_numbers_are_poisson() {
    let beta = C64::new(0.8, -0.6);
    let p = fock::coherent_state(beta, 25).unwrap().number_distribution(0).unwrap();
    for (n, pn) in p.iter().enumerate() {
        let poisson = (-1.0f64).exp() * 1.0f64.powi(n as i32) / factorial(n);
        assert_abs_diff_eq!(*pn, poisson, epsilon = 1e-12);
    }
}

#[test]
fn squeezed_photon_is_odd() {
    let psi = fock::squeezed_photon(-0.5, 40).unwrap();
    for (n, a) in psi.amplitudes().iter().enumerate() {
        if n % 2 == 0 {
            assert_eq!(a.norm_sqr(), 0.0);
        }
    }
    assert_abs_diff_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-10);
}

#[test]
fn lossless_counter_is_identity() {
    let k = DetectorModel::ideal().kernel(9);
    for (m, row) in k.iter().enumerate() {
        for (c, p) in row.iter().enumerate() {
            assert_eq!(*p, if m == c { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn zero_count_is_its_own_class() {
    let q = DetectorModel::new(0.7).unwrap().class_kernel(6);
    assert_abs_diff_eq!(q[0][OutcomeClass::Zero.index()], 1.0);
    assert_abs_diff_eq!(q[3][OutcomeClass::Zero.index()], 0.3f64.powi(3), epsilon = 1e-15);
    assert_abs_diff_eq!(q[2][OutcomeClass::EvenNonzero.index()], 0.49, epsilon = 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn beamsplitter_preserves_norm(raw in raw_amps(6), angle in 0.0..std::f64::consts::FRAC_PI_2, sym in any::<bool>()) {
        let psi = two_mode(6, &raw);
        let spec = if sym { BeamsplitterSpec::symmetric(angle) } else {
            BeamsplitterSpec { angle, convention: BeamsplitterConvention::Real5050 }
        };
        let out = Beamsplitter::new(spec, 6).unwrap().apply(&psi, (0, 1)).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_angles_compose(raw in raw_amps(6), a in 0.0..FRAC_PI_4, b in 0.0..FRAC_PI_4) {
        let psi = two_mode(6, &raw);
        let bs = |t| Beamsplitter::new(BeamsplitterSpec::symmetric(t), 6).unwrap();
        let two = bs(b).apply(&bs(a).apply(&psi, (0, 1)).unwrap(), (0, 1)).unwrap();
        let one = bs(a + b).apply(&psi, (0, 1)).unwrap();
        prop_assert!((two.inner(&one).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn displacement_of_vacuum_is_coherent(re in -1.5..1.5f64, im in -1.5..1.5f64) {
        let beta = C64::new(re, im);
        let d = fock::cutoff_for_amplitude(beta.norm());
        let shifted = fock::apply_displacement(&FockVector::vacuum(&[d]).unwrap(), 0, beta).unwrap();
        let want = fock::coherent_state(beta, d).unwrap();
        prop_assert!((shifted.inner(&want).unwrap().norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn displacement_adds_amplitudes(a in -1.0..1.0f64, b in -1.0..1.0f64, c in -1.0..1.0f64) {
        let d = 40;
        let start = fock::coherent_state(C64::new(a, 0.0), d).unwrap();
        let moved = fock::apply_displacement(&start, 0, C64::new(b, c)).unwrap();
        let want = fock::coherent_state(C64::new(a + b, c), d).unwrap();
        // D(beta)|a> = e^{i Im(beta a*)} |a + beta>
        prop_assert!((moved.inner(&want).unwrap().norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn phase_rotation_rotates_coherent_amplitude(re in -1.0..1.0f64, im in -1.0..1.0f64, phi in -PI..PI) {
        let beta = C64::new(re, im);
        let rotated = fock::apply_phase_rotation(&fock::coherent_state(beta, 30).unwrap(), 0, phi).unwrap();
        let want = fock::coherent_state(beta * C64::from_polar(1.0, phi), 30).unwrap();
        prop_assert!((rotated.inner(&want).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loss_kernel_rows_are_binomial(eta in 0.0..=1.0f64, m in 0usize..10) {
        let k = DetectorModel::new(eta).unwrap().kernel(12);
        let row = &k[m];
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (c, p) in row.iter().enumerate() {
            let want = if c <= m { binom(m, c) * eta.powi(c as i32) * (1.0 - eta).powi((m - c) as i32) } else { 0.0 };
            prop_assert!((p - want).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_states_are_normalized(alpha in 0.2..2.0f64, theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let spec = QubitSpec::new(alpha, theta, phi);
        let psi = states::qubit_state(&spec, fock::cutoff_for_amplitude(alpha)).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
        let plus = fock::coherent_state(C64::new(alpha, 0.0), psi.dims()[0]).unwrap();
        let minus = fock::coherent_state(C64::new(-alpha, 0.0), psi.dims()[0]).unwrap();
        let (mu, nu) = (spec.mu(), spec.nu());
        let want = plus.combine(mu, &minus, nu).unwrap();
        prop_assert!((want.inner(&psi).unwrap().norm() / want.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_bounded(raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8), w in 0.0..1.0f64) {
        let a = FockVector::single_mode(raw.iter().map(|&(x, y)| C64::new(x, y)).collect()).unwrap().normalized().unwrap();
        let b = FockVector::single_mode(raw.iter().rev().map(|&(x, y)| C64::new(y, x)).collect()).unwrap().normalized().unwrap();
        let mut rho = MixedState::zeros(8);
        rho.add_pure(w, &a).unwrap();
        rho.add_pure(1.0 - w, &b).unwrap();
        let f = fock::fidelity(&a, &rho).unwrap();
        let pure = a.inner(&b).unwrap().norm_sqr();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - (w + (1.0 - w) * pure)).abs() < 1e-12);
    }
}
