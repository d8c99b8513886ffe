//! Coherent-state qubit teleportation through a cat-state Bell pair.
//!
//! Mode 0 carries the input qubit, modes 1 and 2 the Bell resource. The Bell
//! measurement is a real 50:50 beamsplitter on modes (0, 1) followed by
//! photon counting on both; mode 2 is the output.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::detection::{self, Branch, DetectorModel, OutcomeClass};
use crate::error::{Error, Result};
use crate::fock::{self, Beamsplitter, BeamsplitterSpec, FockVector, MixedState, C64, EMPTY_OUTCOME};
use crate::linear::{self, Response};
use crate::optimize::coordinate_descent_min;
use crate::states::{self, QubitSpec, ResourceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Correction {
    None,
    X,
    Z,
    XZ,
    Fail,
}

/// Classified Bell-measurement result: counts on modes 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BellOutcome {
    pub first: OutcomeClass,
    pub second: OutcomeClass,
}

impl BellOutcome {
    pub const fn new(first: OutcomeClass, second: OutcomeClass) -> Self {
        Self { first, second }
    }

    /// All nine class pairs, indexed by [`BellOutcome::index`].
    pub fn all() -> [BellOutcome; 9] {
        let c = OutcomeClass::ALL;
        std::array::from_fn(|i| BellOutcome::new(c[i / 3], c[i % 3]))
    }

    pub fn index(&self) -> usize {
        3 * self.first.index() + self.second.index()
    }

    pub fn of_counts(n0: usize, n1: usize) -> Self {
        Self::new(OutcomeClass::of(n0), OutcomeClass::of(n1))
    }

    pub fn correction(&self) -> Correction {
        use OutcomeClass::*;
        match (self.first, self.second) {
            (Zero, Odd) => Correction::None,
            (Odd, Zero) => Correction::X,
            (Zero, EvenNonzero) => Correction::Z,
            (EvenNonzero, Zero) => Correction::XZ,
            _ => Correction::Fail,
        }
    }

    pub fn label(&self) -> String {
        format!("{}_{}", self.first.name(), self.second.name())
    }
}

/// `X` on the output mode: a pi phase rotation.
fn applies_x(c: Correction) -> bool {
    matches!(c, Correction::X | Correction::XZ)
}

/// The reference carries the `Z` (classical relabeling, never applied).
fn applies_z(c: Correction) -> bool {
    matches!(c, Correction::Z | Correction::XZ)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OutcomeStats {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Fidelity after the prescribed correction; NaN for empty outcomes.
    pub fidelity: f64,
    /// Fidelity of the uncorrected output with the input.
    pub raw_fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeleportReport {
    pub outcomes: Vec<OutcomeStats>,
    pub p_odd: f64,
    pub p_even: f64,
    /// Probability of the (zero, zero) outcome.
    pub p_fail: f64,
    /// Probability that both counters fire.
    pub p_both: f64,
    /// `P_odd + P_even^2 / (1 - P_odd)` from the simulated aggregates.
    pub p_succ: f64,
    pub dim: usize,
}

impl TeleportReport {
    fn from_stats(outcomes: Vec<OutcomeStats>, dim: usize) -> Self {
        use OutcomeClass::*;
        let p = |a, b| outcomes[BellOutcome::new(a, b).index()].probability;
        let p_odd = p(Zero, Odd) + p(Odd, Zero);
        let p_even = p(Zero, EvenNonzero) + p(EvenNonzero, Zero);
        let p_fail = p(Zero, Zero);
        let p_both = outcomes
            .iter()
            .filter(|o| o.outcome.first != Zero && o.outcome.second != Zero)
            .map(|o| o.probability)
            .sum();
        let p_succ = p_odd + p_even * p_even / (1.0 - p_odd);
        Self { outcomes, p_odd, p_even, p_fail, p_both, p_succ, dim }
    }

    pub fn get(&self, first: OutcomeClass, second: OutcomeClass) -> &OutcomeStats {
        &self.outcomes[BellOutcome::new(first, second).index()]
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

/// `tensor(source, vacuum)` through the real 50:50 beamsplitter, where the
/// source stands in for an odd cat of size `sqrt2 alpha`.
pub fn bell_resource(alpha: f64, kind: &ResourceKind, dim: usize) -> Result<FockVector> {
    let bs = Beamsplitter::new(BeamsplitterSpec::real_5050(), dim)?;
    build_resource(alpha, kind, &bs)
}

fn build_resource(alpha: f64, kind: &ResourceKind, bs: &Beamsplitter) -> Result<FockVector> {
    kind.validate()?;
    let source = kind.source_state(SQRT_2 * alpha, bs.dim())?;
    let vac = FockVector::vacuum(&[bs.dim()])?;
    bs.apply(&fock::tensor(&[&source, &vac])?, (0, 1))
}

/// Cutoff used by the teleporter at qubit amplitude `alpha`.
pub fn teleport_cutoff(alpha: f64, kind: &ResourceKind) -> usize {
    kind.cutoff(SQRT_2 * alpha)
}

/// Class-aggregated output of one teleportation.
#[derive(Clone, Debug)]
pub struct ClassOutput {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Output mode after the X correction (if any); `None` when empty.
    pub state: Option<MixedState>,
}

/// A fixed teleportation circuit: resource, beamsplitter and counters.
#[derive(Clone, Debug)]
pub struct Teleporter {
    alpha: f64,
    kind: ResourceKind,
    detector: DetectorModel,
    bs: Beamsplitter,
    resource: FockVector,
    class_kernel: Vec<[f64; 3]>,
}

impl Teleporter {
    pub fn new(alpha: f64, kind: ResourceKind, detector: DetectorModel) -> Result<Self> {
        Self::with_dim(alpha, kind, detector, teleport_cutoff(alpha, &kind))
    }

    pub fn with_dim(alpha: f64, kind: ResourceKind, detector: DetectorModel, dim: usize) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        detector.validate()?;
        let bs = Beamsplitter::new(BeamsplitterSpec::real_5050(), dim)?;
        let resource = build_resource(alpha, &kind, &bs)?;
        let class_kernel = detector.class_kernel(dim);
        Ok(Self { alpha, kind, detector, bs, resource, class_kernel })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.bs.dim()
    }

    pub fn kind(&self) -> ResourceKind {
        self.kind
    }

    pub fn detector(&self) -> DetectorModel {
        self.detector
    }

    pub fn resource(&self) -> &FockVector {
        &self.resource
    }

    /// True-count branches of the output mode for an arbitrary input state.
    pub fn branches(&self, input: &FockVector) -> Result<Vec<Branch>> {
        if input.dims() != [self.dim()] {
            return Err(Error::DimensionMismatch(format!(
                "input dims {:?}, teleporter dim {}",
                input.dims(),
                self.dim()
            )));
        }
        let joint = fock::tensor(&[input, &self.resource])?;
        let mixed = self.bs.apply(&joint, (0, 1))?;
        Ok(detection::pure_branches(&mixed, &[0, 1])?.1)
    }

    fn class_weight(&self, b: &[usize], outcome: &BellOutcome) -> f64 {
        self.class_kernel[b[0]][outcome.first.index()] * self.class_kernel[b[1]][outcome.second.index()]
    }

    /// Per-outcome output states with the X correction applied.
    pub fn outputs(&self, input: &FockVector) -> Result<Vec<ClassOutput>> {
        let branches = self.branches(input)?;
        let d = self.dim();
        BellOutcome::all()
            .into_iter()
            .map(|outcome| {
                let x = applies_x(outcome.correction());
                let mut rho = MixedState::zeros(d);
                let mut probability = 0.0;
                for b in &branches {
                    let w = self.class_weight(&b.counts, &outcome);
                    if w == 0.0 {
                        continue;
                    }
                    probability += w * b.weight;
                    let mut psi = FockVector::single_mode(b.amps.clone())?;
                    if x {
                        psi = fock::apply_phase_rotation(&psi, 0, PI)?;
                    }
                    rho.add_pure(w, &psi)?;
                }
                let state = if probability < EMPTY_OUTCOME { None } else { Some(rho.normalized()?) };
                Ok(ClassOutput { outcome, probability, state })
            })
            .collect()
    }

    /// Full Fock-space simulation for one input qubit.
    pub fn run(&self, input: &QubitSpec) -> Result<TeleportReport> {
        self.check_alpha(input)?;
        let d = self.dim();
        let psi = states::qubit_state(input, d)?;
        let refs = References::new(input, d)?;
        let branches = self.branches(&psi)?;
        let stats = BellOutcome::all()
            .into_iter()
            .map(|outcome| {
                let c = outcome.correction();
                let target = refs.target(c);
                let raw_target = &refs.plain;
                let (mut p, mut num, mut raw) = (0.0, 0.0, 0.0);
                for b in &branches {
                    let w = self.class_weight(&b.counts, &outcome);
                    if w == 0.0 {
                        continue;
                    }
                    let amps = &b.amps;
                    let ov = |t: &[C64], flip: bool| -> f64 {
                        t.iter()
                            .zip(amps)
                            .enumerate()
                            .map(|(n, (t, a))| {
                                let s = if flip && n % 2 == 1 { -1.0 } else { 1.0 };
                                t.conj() * a * s
                            })
                            .sum::<C64>()
                            .norm_sqr()
                    };
                    p += w * b.weight;
                    num += w * ov(target.amplitudes(), applies_x(c));
                    raw += w * ov(raw_target.amplitudes(), false);
                }
                Ok(stats_from(outcome, p, num, raw))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TeleportReport::from_stats(stats, d))
    }

    fn check_alpha(&self, input: &QubitSpec) -> Result<()> {
        if (input.alpha - self.alpha).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "input alpha {} does not match teleporter alpha {}",
                input.alpha, self.alpha
            )));
        }
        Ok(())
    }

    /// Precomputes the response to `|alpha>` and `|-alpha>` so that any qubit
    /// input can be evaluated by linearity.
    pub fn kernel(&self) -> Result<TeleportKernel> {
        TeleportKernel::new(self)
    }
}

fn stats_from(outcome: BellOutcome, p: f64, num: f64, raw: f64) -> OutcomeStats {
    let (fidelity, raw_fidelity) = if p < EMPTY_OUTCOME {
        (f64::NAN, f64::NAN)
    } else {
        ((num / p).clamp(0.0, 1.0), (raw / p).clamp(0.0, 1.0))
    };
    OutcomeStats { outcome, probability: p, fidelity, raw_fidelity }
}

struct References {
    plain: FockVector,
    z: FockVector,
}

impl References {
    fn new(input: &QubitSpec, dim: usize) -> Result<Self> {
        Ok(Self {
            plain: states::qubit_state(input, dim)?,
            z: states::qubit_state(&input.z_flipped(), dim)?,
        })
    }

    fn target(&self, c: Correction) -> &FockVector {
        if applies_z(c) {
            &self.z
        } else {
            &self.plain
        }
    }
}

/// Linear-response form of a [`Teleporter`] for fast sweeps over inputs.
#[derive(Clone, Debug)]
pub struct TeleportKernel {
    response: Response,
    weights: Vec<[f64; 9]>,
}

impl TeleportKernel {
    fn new(t: &Teleporter) -> Result<Self> {
        let d = t.dim();
        let (a, b) = linear::basis_branches(t.alpha, d, |s| t.branches(s))?;
        let response = Response::new(t.alpha, d, d, &a, &b)?;
        let weights = response
            .patterns
            .iter()
            .map(|p| std::array::from_fn(|i| t.class_weight(&p.counts, &BellOutcome::all()[i])))
            .collect();
        Ok(Self { response, weights })
    }

    pub fn evaluate(&self, input: &QubitSpec) -> Result<TeleportReport> {
        let (mu, nu) = (input.mu(), input.nu());
        let inp = self.response.input(input.alpha, mu, nu)?;
        // reference coefficients for (plain, X-conjugated, Z, XZ-conjugated) targets
        let targets = [(mu, nu), (nu, mu), (mu, -nu), (-nu, mu)];
        let mut p = [0.0; 9];
        let mut fid = [[0.0; 4]; 9];
        for (pat, weights) in self.response.patterns.iter().zip(&self.weights) {
            let v = self.response.eval(pat, &inp);
            let ov: [f64; 4] = std::array::from_fn(|j| self.response.overlap_sqr(&v, &inp, targets[j]));
            for i in 0..9 {
                let w = weights[i];
                if w == 0.0 {
                    continue;
                }
                p[i] += w * v.probability;
                for j in 0..4 {
                    fid[i][j] += w * ov[j];
                }
            }
        }
        let stats = BellOutcome::all()
            .into_iter()
            .map(|outcome| {
                let i = outcome.index();
                let c = outcome.correction();
                let j = match (applies_x(c), applies_z(c)) {
                    (false, false) => 0,
                    (true, false) => 1,
                    (false, true) => 2,
                    (true, true) => 3,
                };
                stats_from(outcome, p[i], fid[i][j], fid[i][0])
            })
            .collect();
        Ok(TeleportReport::from_stats(stats, self.response.dim))
    }
}

/// Probability of the (zero, zero) outcome with an exact Bell resource.
pub fn p_fail_closed(input: &QubitSpec) -> f64 {
    let a2 = input.alpha * input.alpha;
    let (mu, nu) = (input.mu(), input.nu());
    // (2 - 2e^{-2a^2}) / (2 - 2e^{-4a^2}) without cancellation
    let ratio = (-2.0 * a2).exp_m1() / (-4.0 * a2).exp_m1();
    (-2.0 * a2).exp() * ratio * (mu + nu).norm_sqr() / input.norm_sqr()
}

/// `1 - 2 (P_fail - P_fail^2)`.
pub fn p_succ_closed(input: &QubitSpec) -> f64 {
    let f = p_fail_closed(input);
    1.0 - 2.0 * (f - f * f)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinPSucc {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Worst-case `P_succ` over inputs: a `grid x grid` scan of
/// `theta in [0, pi)`, `phi in [0, 2 pi)` then coordinate-descent refinement.
pub fn min_p_succ(alpha: f64, grid: usize) -> Result<MinPSucc> {
    if !(alpha > 0.0) || grid == 0 {
        return Err(Error::InvalidParameter(format!("need alpha > 0 and grid > 0, got {alpha}, {grid}")));
    }
    let f = |t: f64, p: f64| p_succ_closed(&QubitSpec::new(alpha, t, p));
    let (dt, dp) = (PI / grid as f64, 2.0 * PI / grid as f64);
    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..grid {
        for j in 0..grid {
            let (t, p) = (dt * i as f64, dp * j as f64);
            let v = f(t, p);
            if v < best.2 {
                best = (t, p, v);
            }
        }
    }
    let m = coordinate_descent_min(f, (best.0, best.1), (dt, dp), 1e-12);
    let (theta, phi, value) = if m.value < best.2 { (m.x, m.y, m.value) } else { best };
    Ok(MinPSucc { value, theta, phi })
}

/// Repeat-until-success bookkeeping over three rounds of exact-cat teleportation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcatenationReport {
    /// First-round odd probability.
    pub odd: f64,
    /// First-round even probability.
    pub even: f64,
    /// Even in round one, then even in round two.
    pub even_even: f64,
    /// Even, odd, even.
    pub even_odd_even: f64,
    /// Simulated success after 1, 2 and 3 rounds.
    pub simulated: [f64; 3],
    /// Partial sums of `P_odd + sum P_even P_odd^n P_even` with `P_even = 1/2 - P_fail`.
    pub closed: [f64; 3],
}

/// Chains physical teleportations: after an even result the (Z-errored)
/// output is teleported again; Z corrections are tracked, never applied.
pub fn concatenation_check(input: &QubitSpec) -> Result<ConcatenationReport> {
    let tp = Teleporter::new(input.alpha, ResourceKind::ExactCat, DetectorModel::ideal())?;
    let psi = states::qubit_state(input, tp.dim())?;
    let round1 = tp.outputs(&psi)?;
    let (odd1, even1, even_state) = split_round(&round1)?;
    let (mut even_even, mut even_odd_even) = (0.0, 0.0);
    if let Some(rho) = even_state {
        for (w, comp) in rho.eigen_ensemble() {
            let round2 = tp.outputs(&comp)?;
            let (odd2, even2, odd_state) = split_round_odd(&round2)?;
            even_even += w * even1 * even2;
            if let Some(rho3) = odd_state {
                for (w3, comp3) in rho3.eigen_ensemble() {
                    let (_, even3, _) = split_round(&tp.outputs(&comp3)?)?;
                    even_odd_even += w * w3 * even1 * odd2 * even3;
                }
            }
        }
    }
    let p_odd = 0.5;
    let p_even = 0.5 - p_fail_closed(input);
    let closed = [
        p_odd,
        p_odd + p_even * p_even,
        p_odd + p_even * p_even + p_even * p_odd * p_even,
    ];
    let simulated = [odd1, odd1 + even_even, odd1 + even_even + even_odd_even];
    Ok(ConcatenationReport { odd: odd1, even: even1, even_even, even_odd_even, simulated, closed })
}

fn class_sum(outputs: &[ClassOutput], pick: fn(Correction) -> bool) -> (f64, Option<MixedState>) {
    let mut p = 0.0;
    let mut rho: Option<MixedState> = None;
    for o in outputs.iter().filter(|o| pick(o.outcome.correction())) {
        p += o.probability;
        if let Some(s) = &o.state {
            let scaled = s.matrix().map(|z| z * o.probability);
            rho = Some(match rho {
                None => MixedState::from_matrix(scaled).expect("square"),
                Some(r) => MixedState::from_matrix(r.matrix() + scaled).expect("square"),
            });
        }
    }
    (p, rho.and_then(|r| r.normalized().ok()))
}

fn is_odd(c: Correction) -> bool {
    matches!(c, Correction::None | Correction::X)
}

fn is_even(c: Correction) -> bool {
    matches!(c, Correction::Z | Correction::XZ)
}

/// (P_odd, P_even, state after the even outcomes)
fn split_round(outputs: &[ClassOutput]) -> Result<(f64, f64, Option<MixedState>)> {
    let (odd, _) = class_sum(outputs, is_odd);
    let (even, rho) = class_sum(outputs, is_even);
    Ok((odd, even, rho))
}

/// (P_odd, P_even, state after the odd outcomes)
fn split_round_odd(outputs: &[ClassOutput]) -> Result<(f64, f64, Option<MixedState>)> {
    let (odd, rho) = class_sum(outputs, is_odd);
    let (even, _) = class_sum(outputs, is_even);
    Ok((odd, even, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;
    use OutcomeClass::*;

    #[test]
    fn correction_table() {
        assert_eq!(BellOutcome::new(Zero, Odd).correction(), Correction::None);
        assert_eq!(BellOutcome::new(Odd, Zero).correction(), Correction::X);
        assert_eq!(BellOutcome::new(Zero, EvenNonzero).correction(), Correction::Z);
        assert_eq!(BellOutcome::new(EvenNonzero, Zero).correction(), Correction::XZ);
        assert_eq!(BellOutcome::new(Zero, Zero).correction(), Correction::Fail);
        assert_eq!(BellOutcome::new(Odd, Odd).correction(), Correction::Fail);
        for (i, o) in BellOutcome::all().iter().enumerate() {
            assert_eq!(o.index(), i);
        }
    }

    #[test]
    fn closed_failure_values() {
        assert_abs_diff_eq!(p_fail_closed(&QubitSpec::new(1.0, 0.0, 0.0)), 0.11920, epsilon = 1e-5);
        assert_abs_diff_eq!(p_fail_closed(&QubitSpec::new(1.0, FRAC_PI_4, 0.0)), 0.21000, epsilon = 1e-4);
        assert!(p_fail_closed(&QubitSpec::new(1.0, FRAC_PI_4, PI)) < 1e-30);
        assert_abs_diff_eq!(p_succ_closed(&QubitSpec::new(1.0, FRAC_PI_4, 0.0)), 0.668, epsilon = 1e-3);
        assert_abs_diff_eq!(p_succ_closed(&QubitSpec::new(1e-4, FRAC_PI_4, 0.0)), 0.5, epsilon = 1e-6);
    }

    #[test]
    fn exact_resource_is_bell_state() {
        let alpha = 1.0;
        let d = teleport_cutoff(alpha, &ResourceKind::ExactCat);
        let res = bell_resource(alpha, &ResourceKind::ExactCat, d).unwrap();
        let c = |b: f64| fock::coherent_state(C64::new(b, 0.0), d).unwrap();
        let pp = fock::tensor(&[&c(alpha), &c(alpha)]).unwrap();
        let mm = fock::tensor(&[&c(-alpha), &c(-alpha)]).unwrap();
        let target = pp.combine(C64::new(1.0, 0.0), &mm, C64::new(-1.0, 0.0)).unwrap();
        let ip = target.inner(&res).unwrap().norm_sqr() / target.norm_sqr();
        assert!(ip > 1.0 - 1e-9, "{ip}");
    }

    #[test]
    fn exact_teleport_at_one() {
        let tp = Teleporter::new(1.0, ResourceKind::ExactCat, DetectorModel::ideal()).unwrap();
        let input = QubitSpec::new(1.0, 0.4, 1.1);
        let r = tp.run(&input).unwrap();
        assert_abs_diff_eq!(r.total_probability(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.p_odd, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.p_fail, p_fail_closed(&input), epsilon = 1e-9);
        assert_abs_diff_eq!(r.p_even, 0.5 - r.p_fail, epsilon = 1e-9);
        assert!(r.p_both < 1e-9);
        for (a, b) in [(Zero, Odd), (Odd, Zero), (Zero, EvenNonzero), (EvenNonzero, Zero)] {
            assert_abs_diff_eq!(r.get(a, b).fidelity, 1.0, epsilon = 1e-9);
        }
        assert!(r.get(Zero, EvenNonzero).raw_fidelity < 0.99);
    }

    #[test]
    fn kernel_matches_direct() {
        for kind in [ResourceKind::ExactCat, ResourceKind::SqueezedPhoton { r: -0.55 }] {
            for eta in [1.0, 0.9] {
                let tp = Teleporter::new(1.0, kind, DetectorModel::new(eta).unwrap()).unwrap();
                let k = tp.kernel().unwrap();
                for &(t, p) in &[(0.0, 0.0), (0.3, 2.0), (FRAC_PI_4, 0.0), (1.2, 4.0)] {
                    let q = QubitSpec::new(1.0, t, p);
                    let a = tp.run(&q).unwrap();
                    let b = k.evaluate(&q).unwrap();
                    for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
                        assert_abs_diff_eq!(x.probability, y.probability, epsilon = 1e-12);
                        if x.probability > 1e-9 {
                            assert_abs_diff_eq!(x.fidelity, y.fidelity, epsilon = 1e-9);
                            assert_abs_diff_eq!(x.raw_fidelity, y.raw_fidelity, epsilon = 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn outputs_agree_with_report() {
        let tp = Teleporter::new(0.8, ResourceKind::SqueezedPhoton { r: -0.4 }, DetectorModel::new(0.9).unwrap()).unwrap();
        let q = QubitSpec::new(0.8, 0.7, 2.5);
        let psi = states::qubit_state(&q, tp.dim()).unwrap();
        let r = tp.run(&q).unwrap();
        let plain = states::qubit_state(&q, tp.dim()).unwrap();
        let z = states::qubit_state(&q.z_flipped(), tp.dim()).unwrap();
        for o in tp.outputs(&psi).unwrap() {
            let s = r.outcomes[o.outcome.index()];
            assert_abs_diff_eq!(o.probability, s.probability, epsilon = 1e-13);
            if let Some(rho) = o.state {
                let target = if applies_z(o.outcome.correction()) { &z } else { &plain };
                assert_abs_diff_eq!(fock::fidelity(target, &rho).unwrap(), s.fidelity, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn worst_case_success_at_one() {
        let m = min_p_succ(1.0, 64).unwrap();
        assert_abs_diff_eq!(m.value, 0.668, epsilon = 2e-3);
        assert!(min_p_succ(0.01, 16).unwrap().value > 0.5 - 1e-9);
    }

    #[test]
    fn concatenation_on_imaginary_axis_matches_closed_sums() {
        let q = QubitSpec::new(1.0, 0.6, PI / 2.0);
        let c = concatenation_check(&q).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(c.simulated[k], c.closed[k], epsilon = 1e-8);
        }
        assert!(c.closed.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn concatenation_for_odd_cat_input() {
        let q = QubitSpec::new(1.0, FRAC_PI_4, PI);
        let c = concatenation_check(&q).unwrap();
        assert_abs_diff_eq!(c.odd + c.even, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.closed[1], 0.75, epsilon = 1e-12);
        // the Z-errored output is the even cat, which fails more often
        let second = 0.5 - p_fail_closed(&q.z_flipped());
        assert_abs_diff_eq!(c.even_even, 0.5 * second, epsilon = 1e-9);
        assert!(c.even_even < 0.25 - 0.1);
    }
}
