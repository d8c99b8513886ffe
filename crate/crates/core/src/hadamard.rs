//! The rotated Hadamard gate, its computational-basis readout, and the
//! displacement fringe experiment.
//!
//! Mode layout inside the gate: input on mode 0, Bell resource on modes 1
//! and 2. A symmetric beamsplitter mixes modes 0 and 1, both are counted, and
//! mode 2 carries the output.

use std::f64::consts::{FRAC_PI_8, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::detection::{self, Branch, DetectorModel, OutcomeClass};
use crate::error::{Error, Result};
use crate::fock::{self, Beamsplitter, BeamsplitterSpec, Displacer, FockVector, MixedState, C64, EMPTY_OUTCOME};
use crate::states::{self, CatSpec, QubitSpec, ResourceFamily, ResourceKind};
use crate::linear::{self, Response};
use crate::teleport;

/// Which count patterns herald success.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Acceptance {
    Pattern(usize, usize),
    /// Any pair of odd counts.
    AnyOddOdd,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HadamardConfig {
    /// Symmetric-beamsplitter angle.
    pub angle: f64,
    pub accept: Acceptance,
}

impl Default for HadamardConfig {
    fn default() -> Self {
        Self { angle: FRAC_PI_8, accept: Acceptance::Pattern(1, 1) }
    }
}

/// Heralded output of one gate use.
#[derive(Clone, Debug)]
pub struct GateOutput {
    pub probability: f64,
    /// Normalized output mode; `None` when `probability < 1e-14`.
    pub state: Option<MixedState>,
}

impl GateOutput {
    pub fn fidelity(&self, target: &FockVector) -> Result<f64> {
        match &self.state {
            Some(rho) => fock::fidelity(target, rho),
            None => Ok(f64::NAN),
        }
    }
}

/// A fixed rotated-Hadamard circuit.
#[derive(Clone, Debug)]
pub struct HadamardGate {
    alpha: f64,
    cfg: HadamardConfig,
    detector: DetectorModel,
    bs: Beamsplitter,
    resource: FockVector,
    kernels: Vec<Vec<f64>>,
}

/// Cutoff of the output mode: the Bell resource built for `alpha`.
pub fn output_cutoff(alpha: f64, kind: &ResourceKind) -> usize {
    teleport::teleport_cutoff(alpha, kind)
}

impl HadamardGate {
    /// Gate whose input mode is sized for qubits of amplitude `alpha`.
    pub fn new(alpha: f64, kind: ResourceKind, cfg: HadamardConfig, detector: DetectorModel) -> Result<Self> {
        let d = output_cutoff(alpha, &kind);
        Self::with_dims(alpha, kind, cfg, detector, d, d)
    }

    /// Gate with an explicit input-mode cutoff (padded to at least the
    /// output cutoff) and output cutoff.
    pub fn with_dims(
        alpha: f64,
        kind: ResourceKind,
        cfg: HadamardConfig,
        detector: DetectorModel,
        input_dim: usize,
        output_dim: usize,
    ) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        detector.validate()?;
        let spec = BeamsplitterSpec::symmetric(cfg.angle);
        spec.validate()?;
        let input_dim = input_dim.max(output_dim);
        let resource = teleport::bell_resource(alpha, &kind, output_dim)?.with_mode_dim(0, input_dim)?;
        let bs = Beamsplitter::new(spec, input_dim)?;
        let kernels = detector.kernel(input_dim);
        Ok(Self { alpha, cfg, detector, bs, resource, kernels })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn input_dim(&self) -> usize {
        self.bs.dim()
    }

    pub fn output_dim(&self) -> usize {
        self.resource.dims()[1]
    }

    pub fn config(&self) -> HadamardConfig {
        self.cfg
    }

    pub fn detector(&self) -> DetectorModel {
        self.detector
    }

    /// True-count branches of the output mode.
    pub fn branches(&self, input: &FockVector) -> Result<Vec<Branch>> {
        if input.dims() != [self.input_dim()] {
            return Err(Error::DimensionMismatch(format!(
                "input dims {:?}, gate input dim {}",
                input.dims(),
                self.input_dim()
            )));
        }
        let joint = fock::tensor(&[input, &self.resource])?;
        let mixed = self.bs.apply(&joint, (0, 1))?;
        Ok(detection::pure_branches(&mixed, &[0, 1])?.1)
    }

    fn acceptance_weight(&self, kernels: &[Vec<f64>], t: &[usize]) -> f64 {
        match self.cfg.accept {
            Acceptance::Pattern(n, m) => {
                let k = |row: &Vec<f64>, c: usize| row.get(c).copied().unwrap_or(0.0);
                k(&kernels[t[0]], n) * k(&kernels[t[1]], m)
            }
            Acceptance::AnyOddOdd => {
                let odd = |row: &Vec<f64>| -> f64 {
                    row.iter().enumerate().filter(|(k, _)| OutcomeClass::of(*k) == OutcomeClass::Odd).map(|(_, p)| p).sum()
                };
                odd(&kernels[t[0]]) * odd(&kernels[t[1]])
            }
        }
    }

    /// Heralds `branches` with an arbitrary counter model.
    pub fn herald(&self, branches: &[Branch], detector: &DetectorModel) -> Result<GateOutput> {
        detector.validate()?;
        let owned;
        let kernels = if detector == &self.detector {
            &self.kernels
        } else {
            owned = detector.kernel(self.input_dim());
            &owned
        };
        let d = self.output_dim();
        let mut rho = MixedState::zeros(d);
        let mut probability = 0.0;
        for b in branches {
            let w = self.acceptance_weight(kernels, &b.counts);
            if w == 0.0 {
                continue;
            }
            probability += w * b.weight;
            rho.add_pure(w, &FockVector::single_mode(b.amps.clone())?)?;
        }
        let state = if probability < EMPTY_OUTCOME { None } else { Some(rho.normalized()?) };
        Ok(GateOutput { probability, state })
    }

    pub fn apply(&self, input: &FockVector) -> Result<GateOutput> {
        self.herald(&self.branches(input)?, &self.detector)
    }

    /// Linear-response form for sweeps over qubit inputs.
    pub fn kernel(&self) -> Result<HadamardKernel> {
        let din = self.input_dim();
        let (a, b) = linear::basis_branches(self.alpha, din, |s| self.branches(s))?;
        let response = Response::new(self.alpha, self.output_dim(), din, &a, &b)?;
        let weights = response.patterns.iter().map(|p| self.acceptance_weight(&self.kernels, &p.counts)).collect();
        Ok(HadamardKernel { response, weights })
    }

    /// Ideal count distribution `((n, m), probability)` over all patterns.
    pub fn count_distribution(&self, input: &FockVector) -> Result<Vec<((usize, usize), f64)>> {
        Ok(self
            .branches(input)?
            .into_iter()
            .map(|b| ((b.counts[0], b.counts[1]), b.weight))
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GatePoint {
    pub probability: f64,
    /// Fidelity with the ideal rotated-Hadamard output; NaN when empty.
    pub fidelity: f64,
}

/// Linear-response form of a [`HadamardGate`].
#[derive(Clone, Debug)]
pub struct HadamardKernel {
    response: Response,
    weights: Vec<f64>,
}

impl HadamardKernel {
    pub fn evaluate(&self, input: &QubitSpec) -> Result<GatePoint> {
        let (mu, nu) = (input.mu(), input.nu());
        let inp = self.response.input(input.alpha, mu, nu)?;
        let target = hadamard_coefficients(mu, nu);
        let (mut p, mut f) = (0.0, 0.0);
        for (pat, &w) in self.response.patterns.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            let v = self.response.eval(pat, &inp);
            p += w * v.probability;
            f += w * self.response.overlap_sqr(&v, &inp, target);
        }
        let fidelity = if p < EMPTY_OUTCOME { f64::NAN } else { (f / p).clamp(0.0, 1.0) };
        Ok(GatePoint { probability: p, fidelity })
    }
}

/// One-shot gate application; `input` must be sized to the gate's cutoff.
pub fn rotated_hadamard(
    input: &FockVector,
    alpha: f64,
    kind: ResourceKind,
    cfg: HadamardConfig,
    detector: DetectorModel,
) -> Result<GateOutput> {
    let d = input.dims().first().copied().unwrap_or(0);
    let out = output_cutoff(alpha, &kind);
    HadamardGate::with_dims(alpha, kind, cfg, detector, d.max(out), out)?.apply(&input.with_mode_dim(0, d.max(out))?)
}

/// `(mu + i nu, -(i mu + nu))`
pub fn hadamard_coefficients(mu: C64, nu: C64) -> (C64, C64) {
    let i = C64::i();
    (mu + i * nu, -(i * mu + nu))
}

/// `(mu, nu) -> (mu, -i nu)`
pub fn z_prime(mu: C64, nu: C64) -> (C64, C64) {
    (mu, -C64::i() * nu)
}

/// `(mu, nu) -> (mu, i nu)`
pub fn z_prime_inverse(mu: C64, nu: C64) -> (C64, C64) {
    (mu, C64::i() * nu)
}

/// Normalized ideal gate output for a qubit input.
pub fn hadamard_target(input: &QubitSpec, dim: usize) -> Result<FockVector> {
    let (a, b) = hadamard_coefficients(input.mu(), input.nu());
    if a.norm_sqr() + b.norm_sqr() < 1e-24 {
        return Err(Error::DegenerateNormalization { norm_sq: 0.0 });
    }
    states::qubit_from_coefficients(input.alpha, a, b, dim)
}

/// Coordinates `(c_plus, c_minus)` of the projection of `state` onto
/// span{|alpha>, |-alpha>}, and the squared norm of the remainder.
pub fn qubit_coefficients(state: &FockVector, alpha: f64) -> Result<(C64, C64, f64)> {
    let d = match state.dims() {
        [d] => *d,
        dims => return Err(Error::DimensionMismatch(format!("expected one mode, got {dims:?}"))),
    };
    let plus = fock::coherent_state(C64::new(alpha, 0.0), d)?;
    let minus = fock::coherent_state(C64::new(-alpha, 0.0), d)?;
    let s = plus.inner(&minus)?.re;
    let det = 1.0 - s * s;
    if det < 1e-14 {
        return Err(Error::DegenerateNormalization { norm_sq: det });
    }
    let bp = plus.inner(state)?;
    let bm = minus.inner(state)?;
    let cp = (bp - bm * s) / det;
    let cm = (bm - bp * s) / det;
    let fit = plus.combine(cp, &minus, cm)?;
    let rest = state.combine(C64::new(1.0, 0.0), &fit, C64::new(-1.0, 0.0))?;
    Ok((cp, cm, rest.norm_sqr()))
}

fn check_counts(n: i64, m: i64) -> Result<(u32, u32)> {
    if n < 0 || m < 0 {
        return Err(Error::InvalidParameter(format!("photon counts must be >= 0, got ({n}, {m})")));
    }
    Ok((n as u32, m as u32))
}

/// Input-dependent left factor and Poisson right factor of the count law.
pub fn count_prob_factors(input: &QubitSpec, n: i64, m: i64) -> Result<(f64, f64)> {
    let (n, m) = check_counts(n, m)?;
    let a2 = input.alpha * input.alpha;
    let x = (input.mu().conj() * input.nu() * (-2.0 * a2).exp()).re;
    let left = (1.0 - 2.0 * x) / ((1.0 + 2.0 * x) * -(-4.0 * a2).exp_m1());
    let lf = |k: u32| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    let right = ((n + m) as f64 * a2.ln() - 2.0 * a2 - lf(n) - lf(m)).exp();
    Ok((left, right))
}

/// Count-pattern probability as printed: left factor times right factor.
pub fn count_prob_closed(input: &QubitSpec, n: i64, m: i64) -> Result<f64> {
    let (l, r) = count_prob_factors(input, n, m)?;
    Ok(l * r)
}

/// Outcome of the two-mode computational-basis measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Readout {
    /// Counted as `|alpha>`: no photons in the first port only.
    pub p_plus: f64,
    /// Counted as `|-alpha>`.
    pub p_minus: f64,
    /// Both ports dark.
    pub p_fail: f64,
    /// Both ports fire.
    pub p_both: f64,
}

/// Mixes `state` with `|alpha>` on a real 50:50 beamsplitter and counts both ports.
pub fn computational_readout(state: &MixedState, alpha: f64, detector: &DetectorModel) -> Result<Readout> {
    detector.validate()?;
    let d = state.dim();
    let reference = fock::coherent_state(C64::new(alpha, 0.0), d)?;
    let bs = Beamsplitter::new(BeamsplitterSpec::real_5050(), d)?;
    let kernel = detector.kernel(d);
    let dark: Vec<f64> = kernel.iter().map(|row| row[0]).collect();
    let total = state.trace();
    let mut r = Readout { p_plus: 0.0, p_minus: 0.0, p_fail: 0.0, p_both: 0.0 };
    for (w, comp) in state.eigen_ensemble() {
        let out = bs.apply(&fock::tensor(&[&comp, &reference])?, (0, 1))?;
        let norm = out.norm_sqr();
        let amps = out.amplitudes();
        // P(dark, dark), P(first dark), P(second dark)
        let (mut dd, mut d0, mut d1) = (0.0, 0.0, 0.0);
        for n0 in 0..d {
            for n1 in 0..d {
                let p = amps[n0 * d + n1].norm_sqr();
                if p == 0.0 {
                    continue;
                }
                dd += p * dark[n0] * dark[n1];
                d0 += p * dark[n0];
                d1 += p * dark[n1];
            }
        }
        let s = w / (total * norm);
        r.p_fail += s * dd;
        r.p_plus += s * (d0 - dd);
        r.p_minus += s * (d1 - dd);
        r.p_both += s * (norm - d0 - d1 + dd);
    }
    Ok(r)
}

pub fn computational_readout_pure(state: &FockVector, alpha: f64, detector: &DetectorModel) -> Result<Readout> {
    computational_readout(&MixedState::from_pure(state)?, alpha, detector)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FringePoint {
    pub delta: f64,
    /// Readout probabilities conditioned on the gate heralding; NaN when it never does.
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_readout_fail: f64,
    pub p_both: f64,
    pub p_gate: f64,
}

/// `n` displacements evenly spaced over `[-2/alpha, 2/alpha]` (81 by default).
pub fn default_deltas(alpha: f64, n: usize) -> Vec<f64> {
    let half = 2.0 / alpha;
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FringeOptions {
    pub cfg: HadamardConfig,
    pub readout: DetectorModel,
    /// Forces every cutoff to this value.
    pub dim: Option<usize>,
}

impl Default for FringeOptions {
    fn default() -> Self {
        Self { cfg: HadamardConfig::default(), readout: DetectorModel::ideal(), dim: None }
    }
}

/// Cutoffs `(input, output)` for a fringe at `alpha` with displacements up to `delta_max`.
pub fn fringe_cutoffs(alpha: f64, family: &ResourceFamily, delta_max: f64) -> (usize, usize) {
    let out = output_cutoff(alpha, &family.kind_for(SQRT_2 * alpha));
    let reach = (2.0 * alpha * alpha + delta_max * delta_max).sqrt() + alpha;
    let input = match family.kind_for(alpha) {
        ResourceKind::ExactCat => fock::cutoff_for_amplitude(reach),
        ResourceKind::SqueezedPhoton { r } => fock::cutoff_for_squeezing(r, reach),
    };
    (input.max(out), out)
}

/// Everything a fringe needs that does not depend on the displacement.
#[derive(Clone, Debug)]
pub struct FringeSetup {
    alpha: f64,
    delta_max: f64,
    gate: HadamardGate,
    source: FockVector,
    displacer: Displacer,
    readout: DetectorModel,
}

impl FringeSetup {
    /// Sized for displacements with `|delta| <= delta_max`.
    pub fn new(alpha: f64, family: ResourceFamily, delta_max: f64, opts: &FringeOptions) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        if !(delta_max.is_finite() && delta_max >= 0.0) {
            return Err(Error::InvalidParameter(format!("bad displacement range {delta_max}")));
        }
        opts.readout.validate()?;
        let (din, dout) = match opts.dim {
            Some(d) => (d, d),
            None => fringe_cutoffs(alpha, &family, delta_max),
        };
        let resource = family.kind_for(SQRT_2 * alpha);
        let gate = HadamardGate::with_dims(alpha, resource, opts.cfg, DetectorModel::ideal(), din, dout)?;
        let din = gate.input_dim();
        let source = family.kind_for(alpha).source_state(alpha, din)?;
        let displacer = Displacer::new(Displacer::work_dim_for(din, delta_max));
        Ok(Self { alpha, delta_max, gate, source, displacer, readout: opts.readout })
    }

    pub fn gate(&self) -> &HadamardGate {
        &self.gate
    }

    /// Source displaced by `i delta`, then gate and readout, once per counter model.
    pub fn point(&self, delta: f64, detectors: &[DetectorModel]) -> Result<Vec<FringePoint>> {
        if !(delta.abs() <= self.delta_max) {
            return Err(Error::InvalidParameter(format!(
                "displacement {delta} outside the prepared range {}",
                self.delta_max
            )));
        }
        let input = self.displacer.apply(&self.source, 0, C64::new(0.0, delta))?;
        let branches = self.gate.branches(&input)?;
        detectors
            .iter()
            .map(|det| {
                let g = self.gate.herald(&branches, det)?;
                Ok(match &g.state {
                    Some(rho) => {
                        let r = computational_readout(rho, self.alpha, &self.readout)?;
                        FringePoint {
                            delta,
                            p_plus: r.p_plus,
                            p_minus: r.p_minus,
                            p_readout_fail: r.p_fail,
                            p_both: r.p_both,
                            p_gate: g.probability,
                        }
                    }
                    None => FringePoint {
                        delta,
                        p_plus: f64::NAN,
                        p_minus: f64::NAN,
                        p_readout_fail: f64::NAN,
                        p_both: f64::NAN,
                        p_gate: g.probability,
                    },
                })
            })
            .collect()
    }
}

/// Displaced cat (or its squeezed-photon stand-in) through the rotated
/// Hadamard and the computational readout, once per counter model.
/// Returns one fringe per entry of `detectors`.
pub fn fringe_sweep_multi(
    alpha: f64,
    family: ResourceFamily,
    deltas: &[f64],
    detectors: &[DetectorModel],
    opts: &FringeOptions,
) -> Result<Vec<Vec<FringePoint>>> {
    if deltas.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter("displacements must be finite".into()));
    }
    let delta_max = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let setup = FringeSetup::new(alpha, family, delta_max, opts)?;
    let mut out = vec![Vec::with_capacity(deltas.len()); detectors.len()];
    for &delta in deltas {
        for (k, p) in setup.point(delta, detectors)?.into_iter().enumerate() {
            out[k].push(p);
        }
    }
    Ok(out)
}

pub fn fringe_sweep(
    alpha: f64,
    family: ResourceFamily,
    deltas: &[f64],
    detector: DetectorModel,
) -> Result<Vec<FringePoint>> {
    let mut v = fringe_sweep_multi(alpha, family, deltas, &[detector], &FringeOptions::default())?;
    Ok(v.pop().unwrap_or_default())
}

/// `(P_max - P_min) / (P_max + P_min)` over the finite samples.
pub fn visibility(samples: &[f64]) -> Result<f64> {
    let finite: Vec<f64> = samples.iter().copied().filter(|p| p.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::InvalidParameter("visibility needs at least one sample".into()));
    }
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min == 0.0 {
        return Ok(0.0);
    }
    Ok((max - min) / (max + min))
}

/// Ideal odd cat of size `alpha` as a fringe source, for reference.
pub fn odd_cat_source(alpha: f64, dim: usize) -> Result<FockVector> {
    states::cat_state(CatSpec::odd(alpha), dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn coh(b: f64, d: usize) -> FockVector {
        fock::coherent_state(C64::new(b, 0.0), d).unwrap()
    }

    #[test]
    fn basis_input_maps_to_superposition() {
        for alpha in [0.3, 1.0] {
            let gate = HadamardGate::new(alpha, ResourceKind::ExactCat, HadamardConfig::default(), DetectorModel::ideal()).unwrap();
            let out = gate.apply(&coh(alpha, gate.input_dim())).unwrap();
            let target = hadamard_target(&QubitSpec::new(alpha, 0.0, 0.0), gate.output_dim()).unwrap();
            assert!(out.fidelity(&target).unwrap() > 1.0 - 1e-9);
            let (p, q) = hadamard_coefficients(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
            assert_eq!((p, q), (C64::new(1.0, 0.0), C64::new(0.0, -1.0)));
        }
    }

    #[test]
    fn eigen_input_goes_to_minus_alpha() {
        let alpha = 1.0;
        let gate = HadamardGate::new(alpha, ResourceKind::ExactCat, HadamardConfig::default(), DetectorModel::ideal()).unwrap();
        let d = gate.input_dim();
        let input = states::qubit_from_coefficients(alpha, C64::new(1.0, 0.0), C64::new(0.0, 1.0), d).unwrap();
        let out = gate.apply(&input).unwrap();
        assert!(out.fidelity(&coh(-alpha, gate.output_dim())).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn kernel_matches_direct() {
        let kind = ResourceKind::SqueezedPhoton { r: -0.5 };
        for eta in [1.0, 0.85] {
            let gate = HadamardGate::new(0.7, kind, HadamardConfig::default(), DetectorModel::new(eta).unwrap()).unwrap();
            let k = gate.kernel().unwrap();
            for (t, p) in [(0.0, 0.0), (0.4, 1.0), (FRAC_PI_4, 3.0)] {
                let q = QubitSpec::new(0.7, t, p);
                let out = gate.apply(&states::qubit_state(&q, gate.input_dim()).unwrap()).unwrap();
                let target = hadamard_target(&q, gate.output_dim()).unwrap();
                let v = k.evaluate(&q).unwrap();
                assert_abs_diff_eq!(v.probability, out.probability, epsilon = 1e-12);
                assert_abs_diff_eq!(v.fidelity, out.fidelity(&target).unwrap(), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn count_law_values() {
        let q = QubitSpec::new(1.0, FRAC_PI_4, 0.0);
        let (l, _) = count_prob_factors(&q, 1, 1).unwrap();
        let e2 = (-2.0f64).exp();
        assert_abs_diff_eq!(l, (1.0 - e2) / ((1.0 + e2) * (1.0 - e2 * e2)), epsilon = 1e-14);
        assert_abs_diff_eq!(l, 0.7755, epsilon = 1e-3);
        let r11 = count_prob_factors(&q, 1, 1).unwrap().1;
        let r21 = count_prob_factors(&q, 2, 1).unwrap().1;
        assert_abs_diff_eq!(r11 / r21, 2.0, epsilon = 1e-12);
        let total: f64 = (0..40).flat_map(|n| (0..40).map(move |m| (n, m))).map(|(n, m)| count_prob_factors(&q, n, m).unwrap().1).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert!(count_prob_closed(&q, -1, 1).is_err());
    }

    #[test]
    fn readout_of_coherent_states() {
        let alpha = 0.8;
        let d = 24;
        let r = computational_readout_pure(&coh(alpha, d), alpha, &DetectorModel::ideal()).unwrap();
        let fail = (-2.0 * alpha * alpha).exp();
        assert_abs_diff_eq!(r.p_fail, fail, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_plus, 1.0 - fail, epsilon = 1e-12);
        assert!(r.p_minus.abs() < 1e-12 && r.p_both.abs() < 1e-12);
        let m = computational_readout_pure(&coh(-alpha, d), alpha, &DetectorModel::ideal()).unwrap();
        assert_abs_diff_eq!(m.p_minus, 1.0 - fail, epsilon = 1e-12);
        let cat = odd_cat_source(alpha, d).unwrap();
        let c = computational_readout_pure(&cat, alpha, &DetectorModel::ideal()).unwrap();
        assert_abs_diff_eq!(c.p_plus, c.p_minus, epsilon = 1e-12);
    }

    #[test]
    fn lossy_readout_has_no_sign_errors() {
        let alpha = 1.0;
        let r = computational_readout_pure(&coh(alpha, 24), alpha, &DetectorModel::new(0.7).unwrap()).unwrap();
        assert!(r.p_minus.abs() < 1e-12);
        assert_abs_diff_eq!(r.p_fail, (-2.0 * 0.7f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn visibility_formula() {
        assert_eq!(visibility(&[0.3, 0.3]).unwrap(), 0.0);
        assert_eq!(visibility(&[0.0, 0.4]).unwrap(), 1.0);
        assert_abs_diff_eq!(visibility(&[0.2, 0.6]).unwrap(), 0.5, epsilon = 1e-15);
        assert!(visibility(&[]).is_err());
        assert!(visibility(&[f64::NAN]).is_err());
    }

    #[test]
    fn recovers_qubit_coefficients() {
        let q = QubitSpec::new(0.7, 0.5, 2.0);
        let s = states::qubit_state(&q, 24).unwrap();
        let (a, b, rest) = qubit_coefficients(&s, 0.7).unwrap();
        let k = q.norm_sqr().sqrt();
        assert_abs_diff_eq!((a * k - q.mu()).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((b * k - q.nu()).norm(), 0.0, epsilon = 1e-12);
        assert!(rest < 1e-24);
    }

    #[test]
    fn centered_fringe_is_balanced() {
        let pts = fringe_sweep(1.0, ResourceFamily::ExactCat, &[0.0], DetectorModel::ideal()).unwrap();
        let p = pts[0];
        assert_abs_diff_eq!(p.p_plus, p.p_minus, epsilon = 1e-9);
        assert_abs_diff_eq!(p.p_plus + p.p_minus + p.p_readout_fail + p.p_both, 1.0, epsilon = 1e-9);
    }
}
