//! The acceptance suite as a machine-readable pass/fail report.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::detection::{self, DetectorModel, OutcomeClass};
use crate::error::{Error, Result};
use crate::fock::{self, Beamsplitter, BeamsplitterSpec, Displacer, C64};
use crate::hadamard::{self, FringeOptions, FringeSetup, HadamardConfig, HadamardGate};
use crate::states::{self, QubitSpec, ResourceFamily, ResourceKind, SqueezingPolicy};
use crate::teleport::{self, Teleporter};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Forces every simulated cutoff.
    pub dim: Option<usize>,
    /// Points per axis of the teleportation input grids.
    pub grid: usize,
    /// Displacements per fringe.
    pub fringe_points: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { dim: None, grid: 64, fringe_points: 41, seed: 7 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    /// Set when a computation aborted; the criterion then fails.
    pub error: Option<String>,
}

impl CriterionResult {
    /// `PASS`/`FAIL` line with the measured values.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let vals: Vec<String> = self.measured.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        let mut s = format!("[{status}] {:>2} {}: {}", self.id, self.name, vals.join(" "));
        if let Some(e) = &self.error {
            s.push_str(&format!(" error: {e}"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub criteria: Vec<CriterionResult>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "worst-case teleport success"),
    (2, "failure probability bound"),
    (3, "odd-outcome universality"),
    (4, "exact teleportation"),
    (5, "squeezed-photon teleportation quality"),
    (6, "cat approximation fidelity"),
    (7, "optimal squeezing formula check"),
    (8, "rotated Hadamard exactness"),
    (9, "count-law proportionality"),
    (10, "fringe behaviour"),
    (11, "loss monotonicity"),
    (12, "numerical hygiene"),
];

/// Collects measured values and sub-check outcomes for one criterion.
#[derive(Default)]
struct Check {
    measured: BTreeMap<String, f64>,
    notes: Vec<String>,
    ok: bool,
}

impl Check {
    fn new() -> Self {
        Self { ok: true, ..Default::default() }
    }

    fn value(&mut self, key: impl Into<String>, v: f64) {
        self.measured.insert(key.into(), v);
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(format!("failed: {}", what.into()));
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn exact_teleporter(alpha: f64, eta: f64, opts: &VerifyOptions) -> Result<Teleporter> {
    let det = DetectorModel::new(eta)?;
    match opts.dim {
        Some(d) => Teleporter::with_dim(alpha, ResourceKind::ExactCat, det, d),
        None => Teleporter::new(alpha, ResourceKind::ExactCat, det),
    }
}

fn squeezed_teleporter(alpha: f64, eta: f64, opts: &VerifyOptions) -> Result<Teleporter> {
    let kind = ResourceKind::SqueezedPhoton { r: SqueezingPolicy::Numeric.r_for(SQRT_2 * alpha) };
    let det = DetectorModel::new(eta)?;
    match opts.dim {
        Some(d) => Teleporter::with_dim(alpha, kind, det, d),
        None => Teleporter::new(alpha, kind, det),
    }
}

/// `theta = pi i / n`, `phi = 2 pi j / n`.
fn half_open_grid(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64)))
        .collect()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

fn c1(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let m = teleport::min_p_succ(1.0, opts.grid)?;
    c.value("min_p_succ", m.value);
    c.require((m.value - 0.67).abs() <= 0.005, "min P_succ at alpha = 1 within 0.67 +- 0.005");
    let grid = half_open_grid(opts.grid);
    for a in [0.5, 1.0, 2.0] {
        let tp = exact_teleporter(a, 1.0, opts)?;
        let dev = grid
            .par_iter()
            .map(|&(t, p)| {
                let q = QubitSpec::new(a, t, p);
                Ok((tp.run(&q)?.p_fail - teleport::p_fail_closed(&q)).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let worst = max_of(dev);
        c.value(format!("max_dev_p_fail_alpha_{a}"), worst);
        c.require(worst <= 1e-6, format!("simulated P(zero, zero) matches the closed form at alpha = {a}"));
    }
    Ok(())
}

fn c2(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let grid = half_open_grid(opts.grid);
    for a in [0.5, 1.0, 2.0] {
        let m = max_of(grid.iter().map(|&(t, p)| teleport::p_fail_closed(&QubitSpec::new(a, t, p))));
        c.value(format!("max_p_fail_alpha_{a}"), m);
        c.require(m <= 0.5 + 1e-9, format!("P_fail <= 1/2 at alpha = {a}"));
    }
    Ok(())
}

fn c3(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let inputs: Vec<(f64, f64)> = (0..10).map(|_| (rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))).collect();
    for a in [0.5, 1.0, 2.0] {
        let tp = exact_teleporter(a, 1.0, opts)?;
        let mut worst = 0.0f64;
        for &(t, p) in &inputs {
            worst = worst.max((tp.run(&QubitSpec::new(a, t, p))?.p_odd - 0.5).abs());
        }
        c.value(format!("max_dev_p_odd_alpha_{a}"), worst);
        c.require(worst <= 1e-6, format!("P_odd = 1/2 at alpha = {a}"));
    }
    Ok(())
}

fn c4(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let grid = half_open_grid(opts.grid.min(32));
    for a in [0.5, 1.0, 2.0] {
        let tp = exact_teleporter(a, 1.0, opts)?;
        let fids = grid
            .par_iter()
            .map(|&(t, p)| Ok(tp.run(&QubitSpec::new(a, t, p))?.get(OutcomeClass::Zero, OutcomeClass::Odd).fidelity))
            .collect::<Result<Vec<f64>>>()?;
        let dev = max_of(fids.iter().map(|f| (1.0 - f).abs()));
        c.value(format!("max_infidelity_alpha_{a}"), dev);
        c.require(dev <= 1e-9, format!("(zero, odd) output equals the input at alpha = {a}"));
    }
    Ok(())
}

fn c5(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let alpha = 1.0;
    let grid = half_open_grid(opts.grid);
    let sq = squeezed_teleporter(alpha, 1.0, opts)?.kernel()?;
    let ex = exact_teleporter(alpha, 1.0, opts)?.kernel()?;
    let pts = grid
        .par_iter()
        .map(|&(t, p)| {
            let q = QubitSpec::new(alpha, t, p);
            let s = sq.evaluate(&q)?;
            let e = ex.evaluate(&q)?;
            Ok((t, p, s.get(OutcomeClass::Zero, OutcomeClass::Odd).fidelity, s.p_succ, e.p_succ))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = pts.iter().copied().fold((0.0, 0.0, f64::NEG_INFINITY, 0.0, 0.0), |m, x| if x.2 > m.2 { x } else { m });
    let worst = min_of(pts.iter().map(|x| x.2));
    let min_succ_sq = min_of(pts.iter().map(|x| x.3));
    let min_succ_ex = min_of(pts.iter().map(|x| x.4));
    c.value("max_fidelity", best.2);
    c.value("argmax_theta", best.0);
    c.value("argmax_phi", best.1);
    c.value("min_fidelity", worst);
    c.value("min_p_succ_exact", min_succ_ex);
    c.value("min_p_succ_squeezed", min_succ_sq);
    c.require(best.2 > 0.99, "(zero, odd) fidelity > 0.99 for some input");
    c.require(worst > 0.9, "(zero, odd) fidelity > 0.9 over the grid");
    let near_odd_cat = (best.0 - FRAC_PI_4).abs() <= PI / 16.0 && (best.1 - PI).abs() <= PI / 8.0;
    c.require(near_odd_cat, "fidelity peaks near mu = -nu");
    c.require((min_succ_ex - 0.67).abs() <= 0.005, "simulated exact-resource min P_succ within 0.67 +- 0.005");
    c.require((min_succ_sq - min_succ_ex).abs() <= 0.05, "squeezed-resource min P_succ within 0.05 of the exact one");
    // single-pattern view of the best input, for the record
    let tp = squeezed_teleporter(alpha, 1.0, opts)?;
    let q = QubitSpec::new(alpha, best.0, best.1);
    let psi = states::qubit_state(&q, tp.dim())?;
    for b in tp.branches(&psi)? {
        if b.counts == [0, 1] {
            let f = fock::fidelity(&psi, &fock::FockVector::single_mode(b.amps.clone())?)?;
            c.value("pattern_0_1_fidelity_at_argmax", f);
        }
    }
    Ok(())
}

fn c6(_: &VerifyOptions, c: &mut Check) -> Result<()> {
    let f1 = states::optimal_r_numeric(1.0).fidelity;
    let f2 = states::optimal_r_numeric(SQRT_2).fidelity;
    let f0 = states::optimal_r_numeric(0.01).fidelity;
    c.value("F_alpha_1", f1);
    c.value("F_alpha_sqrt2", f2);
    c.value("F_alpha_0.01", f0);
    c.require((f1 - 0.997).abs() <= 0.001, "F(1) = 0.997 +- 0.001");
    c.require((f2 - 0.974).abs() <= 0.001, "F(sqrt 2) = 0.974 +- 0.001");
    c.require(f0 >= 0.9999, "F(0.01) >= 0.9999");
    let curve: Vec<f64> = (1..=40).map(|k| states::optimal_r_numeric(0.05 * k as f64).fidelity).collect();
    let decreasing = curve.windows(2).all(|w| w[1] < w[0]);
    c.value("F_alpha_2", curve[39]);
    c.require(decreasing, "F decreasing on alpha = 0.05, 0.10, ..., 2");
    Ok(())
}

fn c7(_: &VerifyOptions, c: &mut Check) -> Result<()> {
    let d = states::squeezing_discrepancy(2.0)?;
    c.value("r_printed", d.r_printed);
    c.value("slope_printed", d.slope_printed);
    c.value("r_numeric", d.r_numeric);
    c.value("residual_numeric", d.residual_numeric);
    c.value("fidelity_printed", d.fidelity_printed);
    c.value("fidelity_numeric", d.fidelity_numeric);
    c.require((d.r_printed - 0.5493).abs() < 1e-3, "printed |r| = 0.5493 at alpha = 2");
    c.require(d.slope_printed.abs() > 0.1, "printed value is not stationary (|dF/dr| > 0.1)");
    c.require((d.r_numeric.abs() - 0.8540).abs() < 1e-3, "numeric |r| = 0.854 at alpha = 2");
    c.require(d.residual_numeric.abs() < 1e-8, "numeric optimum is stationary within 1e-8");
    Ok(())
}

fn exact_gate(alpha: f64, opts: &VerifyOptions) -> Result<HadamardGate> {
    let cfg = HadamardConfig::default();
    match opts.dim {
        Some(d) => HadamardGate::with_dims(alpha, ResourceKind::ExactCat, cfg, DetectorModel::ideal(), d, d),
        None => HadamardGate::new(alpha, ResourceKind::ExactCat, cfg, DetectorModel::ideal()),
    }
}

fn c8(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let grid = half_open_grid(16);
    for a in [0.3, 0.5, 1.0, 2.0] {
        let gate = exact_gate(a, opts)?;
        let dev = grid
            .par_iter()
            .map(|&(t, p)| {
                let q = QubitSpec::new(a, t, p);
                let out = gate.apply(&states::qubit_state(&q, gate.input_dim())?)?;
                let target = hadamard::hadamard_target(&q, gate.output_dim())?;
                Ok((1.0 - out.fidelity(&target)?).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let worst = max_of(dev);
        c.value(format!("max_infidelity_alpha_{a}"), worst);
        c.require(worst <= 1e-9, format!("(1, 1) output is the rotated Hadamard at alpha = {a}"));
    }
    Ok(())
}

const COUNT_PATTERNS: [(usize, usize); 5] = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)];

fn c9(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let grid = half_open_grid(16);
    for a in [0.5, 1.0] {
        let gate = exact_gate(a, opts)?;
        let per_input = grid
            .par_iter()
            .map(|&(t, p)| {
                let q = QubitSpec::new(a, t, p);
                let dist = gate.count_distribution(&states::qubit_state(&q, gate.input_dim())?)?;
                let sim = |n: usize, m: usize| dist.iter().find(|(k, _)| *k == (n, m)).map_or(0.0, |(_, p)| *p);
                COUNT_PATTERNS
                    .iter()
                    .map(|&(n, m)| Ok((sim(n, m), hadamard::count_prob_closed(&q, n as i64, m as i64)?)))
                    .collect::<Result<Vec<(f64, f64)>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for (k, &(n, m)) in COUNT_PATTERNS.iter().enumerate() {
            let ratios: Vec<f64> = per_input.iter().map(|v| v[k].0 / v[k].1).collect();
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            let spread = (max_of(ratios.iter().copied()) - min_of(ratios.iter().copied())) / mean;
            c.value(format!("ratio_spread_{n}{m}_alpha_{a}"), spread);
            c.value(format!("ratio_mean_{n}{m}_alpha_{a}"), mean);
            c.require(spread < 1e-6, format!("P({n},{m}) proportional to the count law at alpha = {a}"));
        }
        let expected = 2.0 / (a * a);
        let dev = max_of(per_input.iter().map(|v| (v[0].0 / v[1].0 - expected).abs() / expected));
        c.value(format!("max_rel_dev_p11_over_p21_alpha_{a}"), dev);
        c.require(dev < 1e-6, format!("simulated P(1,1)/P(2,1) = 2/alpha^2 at alpha = {a}"));
    }
    Ok(())
}

fn fringe_setup(alpha: f64, family: ResourceFamily, deltas: &[f64], opts: &VerifyOptions) -> Result<FringeSetup> {
    let delta_max = max_of(deltas.iter().map(|d| d.abs()));
    FringeSetup::new(alpha, family, delta_max, &FringeOptions { dim: opts.dim, ..Default::default() })
}

fn c10(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let centre = fringe_setup(1.0, ResourceFamily::ExactCat, &[0.0], opts)?.point(0.0, &[DetectorModel::ideal()])?[0];
    let gap = (centre.p_plus - centre.p_minus).abs();
    c.value("centre_gap_exact", gap);
    c.require(gap <= 1e-9, "exact cat at delta = 0 gives P_plus = P_minus");
    let family = ResourceFamily::SqueezedPhoton(SqueezingPolicy::Numeric);
    let detectors = [DetectorModel::ideal(), DetectorModel::new(0.8)?];
    let n = opts.fringe_points.max(3) / 2 * 2 + 1;
    for a in [0.3, 0.5, 1.0] {
        let deltas = hadamard::default_deltas(a, n);
        let setup = fringe_setup(a, family, &deltas, opts)?;
        let pts = deltas.par_iter().map(|&d| setup.point(d, &detectors)).collect::<Result<Vec<_>>>()?;
        let vis = |k: usize| hadamard::visibility(&pts.iter().map(|p| p[k].p_plus).collect::<Vec<_>>());
        let (v1, v8) = (vis(0)?, vis(1)?);
        c.value(format!("visibility_eta_1_alpha_{a}"), v1);
        c.value(format!("visibility_eta_0.8_alpha_{a}"), v8);
        c.require(v1 < 1.0, format!("squeezed-photon visibility below 1 at alpha = {a}"));
        c.require(v1 - v8 < 0.05, format!("visibility drop from eta = 1 to 0.8 below 0.05 at alpha = {a}"));
        let mut asym = 0.0f64;
        for (i, p) in pts.iter().enumerate() {
            let q = &pts[pts.len() - 1 - i];
            for k in 0..2 {
                asym = asym.max((p[k].p_plus - q[k].p_minus).abs()).max((p[k].p_gate - q[k].p_gate).abs());
            }
        }
        c.value(format!("mirror_asymmetry_alpha_{a}"), asym);
        c.require(asym <= 1e-9, format!("delta -> -delta swaps P_plus and P_minus at alpha = {a}"));
    }
    Ok(())
}

fn c11(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let grid = half_open_grid(opts.grid);
    let mut seq = Vec::new();
    for eta in [1.0, 0.95, 0.9, 0.8] {
        let k = squeezed_teleporter(1.0, eta, opts)?.kernel()?;
        let fids = grid
            .par_iter()
            .map(|&(t, p)| Ok(k.evaluate(&QubitSpec::new(1.0, t, p))?.get(OutcomeClass::Zero, OutcomeClass::Odd).fidelity))
            .collect::<Result<Vec<f64>>>()?;
        let m = min_of(fids.into_iter().filter(|f| f.is_finite()));
        c.value(format!("min_fidelity_eta_{eta}"), m);
        seq.push(m);
    }
    c.note(format!("min fidelity along eta = 1, 0.95, 0.9, 0.8: {seq:?}"));
    c.require(seq.windows(2).all(|w| w[1] <= w[0]), "minimum fidelity non-increasing in loss");
    Ok(())
}

fn unitarity_defect(bs: &Beamsplitter) -> f64 {
    (0..bs.dim())
        .filter_map(|n| bs.block(n))
        .map(|u| {
            let id = nalgebra::DMatrix::<C64>::identity(u.nrows(), u.ncols());
            (u.adjoint() * u - id).camax()
        })
        .fold(0.0, f64::max)
}

fn c12(opts: &VerifyOptions, c: &mut Check) -> Result<()> {
    let d = opts.dim.unwrap_or(40);
    let mut unit = 0.0f64;
    for spec in [BeamsplitterSpec::real_5050(), BeamsplitterSpec::symmetric(std::f64::consts::FRAC_PI_8)] {
        unit = unit.max(unitarity_defect(&Beamsplitter::new(spec, d)?));
    }
    let coh = fock::coherent_state(C64::new(1.0, 0.0), d)?;
    let disp = Displacer::new(Displacer::work_dim_for(d, 2.0)).apply(&coh, 0, C64::new(0.0, 1.0))?;
    let disp_norm = (disp.norm_sqr() - 1.0).abs();
    c.value("beamsplitter_unitarity_defect", unit);
    c.value("displacement_norm_defect", disp_norm);
    c.require(unit < 1e-12 && disp_norm < 1e-10, "beamsplitter and displacement preserve the norm");
    let mut povm = 0.0f64;
    for eta in [0.0, 0.5, 0.8, 0.9, 0.95, 1.0] {
        let p = detection::lossy_povm(&DetectorModel::new(eta)?, d);
        for m in 0..d {
            povm = povm.max((p.iter().map(|row| row[m]).sum::<f64>() - 1.0).abs());
        }
    }
    c.value("povm_completeness_defect", povm);
    c.require(povm < 1e-12, "loss POVM sums to the identity");
    let mut norm = 0.0f64;
    let mut doubling = 0.0f64;
    for a in [0.5, 1.0, 2.0] {
        for eta in [1.0, 0.9] {
            let q = QubitSpec::new(a, 0.7, 2.1);
            let tp = squeezed_teleporter(a, eta, opts)?;
            let r = tp.run(&q)?;
            norm = norm.max((r.total_probability() - 1.0).abs());
            let ex = exact_teleporter(a, eta, opts)?.run(&q)?;
            norm = norm.max((ex.total_probability() - 1.0).abs());
            if eta == 1.0 {
                let ex_tp = exact_teleporter(a, eta, opts)?;
                let mut pairs = vec![(ex, ex_tp)];
                if a <= 1.0 {
                    pairs.push((r, tp));
                }
                for (small, t) in pairs {
                    let big = Teleporter::with_dim(a, t.kind(), t.detector(), 2 * t.dim())?.run(&q)?;
                    for (x, y) in small.outcomes.iter().zip(&big.outcomes) {
                        doubling = doubling.max((x.probability - y.probability).abs());
                        if x.probability > 1e-6 {
                            doubling = doubling.max((x.fidelity - y.fidelity).abs());
                        }
                    }
                }
            }
        }
        let gate = exact_gate(a, opts)?;
        let dist = gate.count_distribution(&states::qubit_state(&QubitSpec::new(a, 0.3, 1.0), gate.input_dim())?)?;
        norm = norm.max((dist.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs());
    }
    c.value("probability_normalization_defect", norm);
    c.value("cutoff_doubling_change", doubling);
    c.require(norm < 1e-9, "outcome probabilities sum to 1");
    c.require(doubling < 1e-8, "doubling the cutoff changes nothing above 1e-8");
    Ok(())
}

/// Runs one criterion; computation errors become a failed entry.
pub fn criterion(id: u8, opts: &VerifyOptions) -> CriterionResult {
    let name = CRITERIA.iter().find(|(i, _)| *i == id).map_or("unknown", |(_, n)| n);
    let mut c = Check::new();
    let run: Result<()> = match id {
        1 => c1(opts, &mut c),
        2 => c2(opts, &mut c),
        3 => c3(opts, &mut c),
        4 => c4(opts, &mut c),
        5 => c5(opts, &mut c),
        6 => c6(opts, &mut c),
        7 => c7(opts, &mut c),
        8 => c8(opts, &mut c),
        9 => c9(opts, &mut c),
        10 => c10(opts, &mut c),
        11 => c11(opts, &mut c),
        12 => c12(opts, &mut c),
        _ => Err(Error::InvalidParameter(format!("no criterion {id}"))),
    };
    let error = run.err().map(|e| e.to_string());
    CriterionResult { id, name, passed: c.ok && error.is_none(), measured: c.measured, notes: c.notes, error }
}

pub fn verify(opts: &VerifyOptions) -> VerifyReport {
    let criteria: Vec<CriterionResult> = CRITERIA.iter().map(|(id, _)| criterion(*id, opts)).collect();
    let passed = criteria.iter().filter(|c| c.passed).count();
    VerifyReport { options: *opts, failed: criteria.len() - passed, passed, criteria }
}
