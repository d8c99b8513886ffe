//! Figure reproductions and custom sweeps.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::detection::{DetectorModel, OutcomeClass};
use crate::error::{Error, Result};
use crate::hadamard::{self, FringeOptions, FringeSetup, HadamardConfig, HadamardGate};
use crate::record;
use crate::states::{self, QubitSpec, ResourceFamily, ResourceKind};
use crate::sweep::config::{FigureId, Protocol, ResourceChoice, RunConfig};
use crate::sweep::output::{self, Manifest, PlotKind, Table};
use crate::teleport::{self, Teleporter};

pub const FLAG_EQ8: &str = "printed optimal-squeezing formula (4 alpha^2 under the root) is not a stationary point of the cat fidelity except at alpha = 1; see squeezing_report";
pub const FLAG_READOUT: &str = "readout failure probability is exp(-2 alpha^2) for the vacuum-overlap measurement, not the quoted exp(-alpha^2); columns report the simulated value";
pub const FLAG_RETRY: &str = "P_succ retry bookkeeping reuses the first-round P_even; after an even result the Z-flipped state has its own P_even";
pub const FLAG_COUNT_LAW: &str = "count law matches the simulation for the (1,1) pattern only; other patterns depend on the input differently";

/// Squeezing report sizes recorded in every manifest.
pub const REPORT_ALPHAS: [f64; 4] = [0.5, 1.0, SQRT_2, 2.0];

/// Tables and bookkeeping of one computed experiment.
#[derive(Clone, Debug, Default)]
pub struct Computed {
    pub tables: Vec<Table>,
    pub cutoffs: BTreeMap<String, usize>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub manifest: Manifest,
    pub tables: Vec<Table>,
}

/// `n x n` inputs: `theta` over `[0, pi/2]`, `phi` over `[0, 2 pi]`, both ends included.
pub fn input_grid(n: usize) -> Vec<(f64, f64)> {
    let step = |k: usize, top: f64| if n > 1 { top * k as f64 / (n - 1) as f64 } else { 0.0 };
    (0..n).flat_map(|i| (0..n).map(move |j| (step(i, FRAC_PI_2), step(j, 2.0 * PI)))).collect()
}

fn panel_name(base: &str, k: usize, n: usize) -> String {
    if n == 1 {
        base.to_string()
    } else {
        format!("{base}{}", (b'a' + k as u8) as char)
    }
}

fn pool(cfg: &RunConfig) -> Result<(rayon::ThreadPool, usize)> {
    let n = cfg
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let p = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
    Ok((p, n))
}

fn resource_deficit(alpha: f64, kind: &ResourceKind, dim: usize) -> Result<f64> {
    Ok(kind.source_state(SQRT_2 * alpha, dim)?.deficit())
}

fn teleporter(cfg: &RunConfig, alpha: f64, family: ResourceFamily, eta: f64) -> Result<Teleporter> {
    let kind = family.kind_for(SQRT_2 * alpha);
    let det = DetectorModel::new(eta)?;
    match cfg.dim {
        Some(d) => Teleporter::with_dim(alpha, kind, det, d),
        None => Teleporter::new(alpha, kind, det),
    }
}

fn hadamard_gate(cfg: &RunConfig, alpha: f64, family: ResourceFamily, eta: f64) -> Result<HadamardGate> {
    let kind = family.kind_for(SQRT_2 * alpha);
    let det = DetectorModel::new(eta)?;
    match cfg.dim {
        Some(d) => HadamardGate::with_dims(alpha, kind, HadamardConfig::default(), det, d, d),
        None => HadamardGate::new(alpha, kind, HadamardConfig::default(), det),
    }
}

fn odd_count(n: usize) -> usize {
    n / 2 * 2 + 1
}

/// Displacements for a fringe: the configured list, or `grid` (made odd)
/// points over `[-2/alpha, 2/alpha]`.
fn fringe_deltas(cfg: &RunConfig, alpha: f64) -> Vec<f64> {
    cfg.delta.clone().unwrap_or_else(|| hadamard::default_deltas(alpha, odd_count(cfg.grid)))
}

fn fig1(cfg: &RunConfig) -> Result<Computed> {
    let default: Vec<f64> = (0..=40).map(|k| k as f64 * 0.05).collect();
    let alphas = cfg.alpha.clone().unwrap_or(default);
    let mut t = Table::new(
        "fig1",
        "squeezed single photon vs odd cat: optimal fidelity",
        vec!["alpha", "r_numeric", "F_numeric", "r_eq8", "F_eq8"],
        PlotKind::Lines { x: "alpha", ys: vec!["F_numeric", "F_eq8"] },
    );
    for a in alphas {
        let best = states::optimal_r_numeric(a);
        let r8 = -states::arccosh_squeezing(a);
        let f8 = if a > 0.0 { states::cat_fidelity_closed(a, r8)? } else { 1.0 };
        t.rows.push(record![a, best.r, best.fidelity, r8, f8]);
    }
    Ok(Computed { tables: vec![t], ..Default::default() })
}

fn fig3(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Computed> {
    let alphas = cfg.alphas_or(&[0.5, 1.0, 2.0]);
    let grid = input_grid(cfg.grid);
    let mut out = Computed::default();
    for (k, &a) in alphas.iter().enumerate() {
        let name = panel_name("fig3", k, alphas.len());
        let tp = teleporter(cfg, a, ResourceFamily::ExactCat, 1.0)?;
        out.cutoffs.insert(format!("{name} alpha={a}"), tp.dim());
        let kernel = tp.kernel()?;
        let rows = pool.install(|| {
            grid.par_iter()
                .map(|&(th, ph)| {
                    let q = QubitSpec::new(a, th, ph);
                    let sim = kernel.evaluate(&q)?;
                    Ok(record![a, th, ph, teleport::p_fail_closed(&q), sim.p_fail])
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let mut t = Table::new(
            name,
            format!("teleportation failure probability, alpha = {a}"),
            vec!["alpha", "theta", "phi", "p_fail", "p_fail_sim"],
            PlotKind::Surface { x: "theta", y: "phi", z: "p_fail" },
        );
        t.rows = rows;
        out.tables.push(t);
    }
    Ok(out)
}

fn fig4(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Computed> {
    let default: Vec<f64> = (1..=60).map(|k| k as f64 * 0.05).collect();
    let alphas = cfg.alpha.clone().unwrap_or(default);
    let rows = pool.install(|| {
        alphas
            .par_iter()
            .map(|&a| {
                let m = teleport::min_p_succ(a, cfg.grid)?;
                Ok(record![a, m.value, m.theta, m.phi])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut t = Table::new(
        "fig4",
        "minimum teleportation success probability",
        vec!["alpha", "min_p_succ", "argmin_theta", "argmin_phi"],
        PlotKind::Lines { x: "alpha", ys: vec!["min_p_succ"] },
    );
    t.rows = rows;
    Ok(Computed { tables: vec![t], flags: vec![FLAG_RETRY.into()], ..Default::default() })
}

/// Fidelity and probability surfaces of the (zero, odd) outcome.
fn teleport_surfaces(cfg: &RunConfig, base: &str, default_eta: f64, pool: &rayon::ThreadPool) -> Result<Computed> {
    let alphas = cfg.alphas_or(&[1.0]);
    let etas = cfg.etas_or(&[default_eta]);
    let family = cfg.family_or(ResourceChoice::Sqphoton);
    let grid = input_grid(cfg.grid);
    let mut out = Computed::default();
    let mut fid = Table::new(
        format!("{base}a"),
        "teleportation fidelity, (zero, odd) counts",
        vec!["alpha", "eta", "theta", "phi", "fidelity", "raw_fidelity"],
        PlotKind::Surface { x: "theta", y: "phi", z: "fidelity" },
    );
    let mut prob = Table::new(
        format!("{base}b"),
        "teleportation probability, (zero, odd) counts",
        vec!["alpha", "eta", "theta", "phi", "probability", "p_succ"],
        PlotKind::Surface { x: "theta", y: "phi", z: "probability" },
    );
    for &a in &alphas {
        for &eta in &etas {
            let tp = teleporter(cfg, a, family, eta)?;
            out.cutoffs.insert(format!("{base} alpha={a} eta={eta}"), tp.dim());
            let kernel = tp.kernel()?;
            let rows = pool.install(|| {
                grid.par_iter()
                    .map(|&(th, ph)| {
                        let r = kernel.evaluate(&QubitSpec::new(a, th, ph))?;
                        let s = r.get(OutcomeClass::Zero, OutcomeClass::Odd);
                        Ok((
                            record![a, eta, th, ph, s.fidelity, s.raw_fidelity],
                            record![a, eta, th, ph, s.probability, r.p_succ],
                        ))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            for (f, p) in rows {
                fid.rows.push(f);
                prob.rows.push(p);
            }
        }
    }
    out.tables = vec![fid, prob];
    Ok(out)
}

fn fig7(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Computed> {
    let alphas = cfg.alphas_or(&[1.0]);
    let default: Vec<f64> = (0..=20).map(|k| 1.0 - 0.01 * k as f64).collect();
    let etas = cfg.eta.clone().unwrap_or(default);
    let family = cfg.family_or(ResourceChoice::Sqphoton);
    let grid = input_grid(cfg.grid);
    let mut out = Computed::default();
    let mut t = Table::new(
        "fig7",
        "minimum teleportation fidelity vs detector efficiency",
        vec!["alpha", "eta", "min_fidelity", "argmin_theta", "argmin_phi", "p_at_min"],
        PlotKind::Grouped { x: "eta", y: "min_fidelity", group: "alpha" },
    );
    for &a in &alphas {
        for &eta in &etas {
            let m = min_teleport_fidelity(cfg, a, family, eta, &grid, pool)?;
            out.cutoffs.insert(format!("fig7 alpha={a}"), m.dim);
            t.rows.push(record![a, eta, m.fidelity, m.theta, m.phi, m.probability]);
        }
    }
    out.tables.push(t);
    Ok(out)
}

/// Worst (zero, odd) fidelity over a set of inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorstFidelity {
    pub fidelity: f64,
    pub theta: f64,
    pub phi: f64,
    pub probability: f64,
    pub dim: usize,
}

fn min_teleport_fidelity(
    cfg: &RunConfig,
    alpha: f64,
    family: ResourceFamily,
    eta: f64,
    grid: &[(f64, f64)],
    pool: &rayon::ThreadPool,
) -> Result<WorstFidelity> {
    let tp = teleporter(cfg, alpha, family, eta)?;
    let kernel = tp.kernel()?;
    let pts = pool.install(|| {
        grid.par_iter()
            .map(|&(th, ph)| {
                let r = kernel.evaluate(&QubitSpec::new(alpha, th, ph))?;
                let s = r.get(OutcomeClass::Zero, OutcomeClass::Odd);
                Ok((s.fidelity, th, ph, s.probability))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let worst = pts
        .into_iter()
        .filter(|p| p.0.is_finite())
        .fold(None::<(f64, f64, f64, f64)>, |m, p| match m {
            Some(m) if m.0 <= p.0 => Some(m),
            _ => Some(p),
        })
        .ok_or(Error::DegenerateNormalization { norm_sq: 0.0 })?;
    Ok(WorstFidelity { fidelity: worst.0, theta: worst.1, phi: worst.2, probability: worst.3, dim: tp.dim() })
}

fn fig9(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Computed> {
    let alphas = cfg.alphas_or(&[1.0]);
    let etas = cfg.etas_or(&[1.0]);
    let family = cfg.family_or(ResourceChoice::Sqphoton);
    let grid = input_grid(cfg.grid);
    let mut out = Computed { flags: vec![FLAG_COUNT_LAW.into()], ..Default::default() };
    let mut fid = Table::new(
        "fig9a",
        "rotated Hadamard fidelity, (1, 1) counts",
        vec!["alpha", "eta", "theta", "phi", "fidelity"],
        PlotKind::Surface { x: "theta", y: "phi", z: "fidelity" },
    );
    let mut prob = Table::new(
        "fig9b",
        "rotated Hadamard success probability, (1, 1) counts",
        vec!["alpha", "eta", "theta", "phi", "probability", "p_closed"],
        PlotKind::Surface { x: "theta", y: "phi", z: "probability" },
    );
    for &a in &alphas {
        for &eta in &etas {
            let gate = hadamard_gate(cfg, a, family, eta)?;
            out.cutoffs.insert(format!("fig9 alpha={a} eta={eta}"), gate.input_dim());
            let kernel = gate.kernel()?;
            let rows = pool.install(|| {
                grid.par_iter()
                    .map(|&(th, ph)| {
                        let q = QubitSpec::new(a, th, ph);
                        let v = kernel.evaluate(&q)?;
                        let closed = hadamard::count_prob_closed(&q, 1, 1)?;
                        Ok((record![a, eta, th, ph, v.fidelity], record![a, eta, th, ph, v.probability, closed]))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            for (f, p) in rows {
                fid.rows.push(f);
                prob.rows.push(p);
            }
        }
    }
    out.tables = vec![fid, prob];
    Ok(out)
}

/// One fringe per `(alpha, eta)`; each row is
/// `alpha, eta, delta, p_plus, p_minus, p_readout_fail, p_both, p_gate`.
fn fringe_rows(
    cfg: &RunConfig,
    alpha: f64,
    family: ResourceFamily,
    etas: &[f64],
    pool: &rayon::ThreadPool,
    cutoffs: &mut BTreeMap<String, usize>,
    label: &str,
) -> Result<Vec<Vec<hadamard::FringePoint>>> {
    let deltas = fringe_deltas(cfg, alpha);
    let delta_max = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let opts = FringeOptions { dim: cfg.dim, ..Default::default() };
    let setup = FringeSetup::new(alpha, family, delta_max, &opts)?;
    cutoffs.insert(format!("{label} alpha={alpha} input"), setup.gate().input_dim());
    cutoffs.insert(format!("{label} alpha={alpha} output"), setup.gate().output_dim());
    let detectors = RunConfig::detectors(etas)?;
    let per_delta = pool.install(|| {
        deltas.par_iter().map(|&d| setup.point(d, &detectors)).collect::<Result<Vec<_>>>()
    })?;
    let mut out = vec![Vec::with_capacity(deltas.len()); etas.len()];
    for pts in per_delta {
        for (k, p) in pts.into_iter().enumerate() {
            out[k].push(p);
        }
    }
    Ok(out)
}

const FRINGE_COLUMNS: [&str; 8] = ["alpha", "eta", "delta", "p_plus", "p_minus", "p_readout_fail", "p_both", "p_gate"];

fn fringe_tables(cfg: &RunConfig, base: &str, pool: &rayon::ThreadPool) -> Result<Computed> {
    let alphas = cfg.alphas_or(&[1.0, 0.5, 0.3]);
    let etas = cfg.etas_or(&[1.0, 0.9, 0.8]);
    let family = cfg.family_or(ResourceChoice::Sqphoton);
    let mut out = Computed { flags: vec![FLAG_READOUT.into()], ..Default::default() };
    let mut vis = Table::new(
        format!("{base}_visibility"),
        "fringe visibility",
        vec!["alpha", "eta", "visibility", "visibility_minus"],
        PlotKind::Grouped { x: "eta", y: "visibility", group: "alpha" },
    );
    for (k, &a) in alphas.iter().enumerate() {
        let fringes = fringe_rows(cfg, a, family, &etas, pool, &mut out.cutoffs, base)?;
        let mut t = Table::new(
            panel_name(base, k, alphas.len()),
            format!("probability of reading |alpha>, alpha = {a}"),
            FRINGE_COLUMNS.to_vec(),
            PlotKind::Grouped { x: "delta", y: "p_plus", group: "eta" },
        );
        for (&eta, pts) in etas.iter().zip(&fringes) {
            for p in pts {
                t.rows.push(record![a, eta, p.delta, p.p_plus, p.p_minus, p.p_readout_fail, p.p_both, p.p_gate]);
            }
            let plus: Vec<f64> = pts.iter().map(|p| p.p_plus).collect();
            let minus: Vec<f64> = pts.iter().map(|p| p.p_minus).collect();
            let v = hadamard::visibility(&plus).unwrap_or(f64::NAN);
            let vm = hadamard::visibility(&minus).unwrap_or(f64::NAN);
            vis.rows.push(record![a, eta, v, vm]);
        }
        out.tables.push(t);
    }
    out.tables.push(vis);
    Ok(out)
}

fn fig12(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Computed> {
    let alphas = cfg.alphas_or(&[1.0, 0.5, 0.3]);
    let etas = cfg.etas_or(&[1.0]);
    let family = cfg.family_or(ResourceChoice::Sqphoton);
    let mut out = Computed { flags: vec![FLAG_READOUT.into()], ..Default::default() };
    let mut t = Table::new(
        "fig12",
        "gate post-selection probability vs displacement",
        vec!["alpha", "eta", "delta", "p_gate"],
        PlotKind::Grouped { x: "delta", y: "p_gate", group: "alpha" },
    );
    for &a in &alphas {
        let fringes = fringe_rows(cfg, a, family, &etas, pool, &mut out.cutoffs, "fig12")?;
        for (&eta, pts) in etas.iter().zip(&fringes) {
            for p in pts {
                t.rows.push(record![a, eta, p.delta, p.p_gate]);
            }
        }
    }
    out.tables.push(t);
    Ok(out)
}

pub fn compute_figure(id: FigureId, cfg: &RunConfig) -> Result<Computed> {
    let (pool, _) = pool(cfg)?;
    compute_figure_in(id, cfg, &pool)
}

fn compute_figure_in(id: FigureId, cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Computed> {
    match id {
        FigureId::Fig1 => fig1(cfg),
        FigureId::Fig3 => fig3(cfg, pool),
        FigureId::Fig4 => fig4(cfg, pool),
        FigureId::Fig5 => teleport_surfaces(cfg, "fig5", 1.0, pool),
        FigureId::Fig6 => teleport_surfaces(cfg, "fig6", 0.9, pool),
        FigureId::Fig7 => fig7(cfg, pool),
        FigureId::Fig9 => fig9(cfg, pool),
        FigureId::Fig11 => fringe_tables(cfg, "fig11", pool),
        FigureId::Fig12 => fig12(cfg, pool),
    }
}

fn custom_teleport(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Computed> {
    let family = cfg.family_or(ResourceChoice::Cat);
    let mut out = Computed::default();
    let mut t = Table::new(
        cfg.experiment.clone(),
        "teleportation",
        vec![
            "alpha", "eta", "theta", "phi", "outcome", "correction", "probability", "fidelity", "raw_fidelity",
            "p_succ", "dim", "deficit",
        ],
        PlotKind::Lines { x: "theta", ys: vec!["fidelity"] },
    );
    let inputs = custom_inputs(cfg);
    for &a in &cfg.alphas_or(&[]) {
        for &eta in &cfg.etas_or(&[1.0]) {
            let tp = teleporter(cfg, a, family, eta)?;
            let deficit = resource_deficit(a, &tp.kind(), tp.dim())?;
            out.cutoffs.insert(format!("{} alpha={a} eta={eta}", cfg.experiment), tp.dim());
            let kernel = tp.kernel()?;
            let reports = pool.install(|| {
                inputs.par_iter().map(|&(th, ph)| kernel.evaluate(&QubitSpec::new(a, th, ph))).collect::<Result<Vec<_>>>()
            })?;
            for (&(th, ph), r) in inputs.iter().zip(reports) {
                for s in &r.outcomes {
                    t.rows.push(record![
                        a,
                        eta,
                        th,
                        ph,
                        s.outcome.label(),
                        format!("{:?}", s.outcome.correction()),
                        s.probability,
                        s.fidelity,
                        s.raw_fidelity,
                        r.p_succ,
                        tp.dim(),
                        deficit
                    ]);
                }
            }
        }
    }
    out.tables.push(t);
    Ok(out)
}

fn custom_inputs(cfg: &RunConfig) -> Vec<(f64, f64)> {
    let thetas = cfg.theta.clone().unwrap_or_else(|| vec![PI / 4.0]);
    let phis = cfg.phi.clone().unwrap_or_else(|| vec![0.0]);
    thetas.iter().flat_map(|&t| phis.iter().map(move |&p| (t, p))).collect()
}

fn custom_hadamard(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Computed> {
    let family = cfg.family_or(ResourceChoice::Cat);
    let mut out = Computed { flags: vec![FLAG_COUNT_LAW.into()], ..Default::default() };
    let mut t = Table::new(
        cfg.experiment.clone(),
        "rotated Hadamard, (1, 1) counts",
        vec!["alpha", "eta", "theta", "phi", "probability", "fidelity", "p_closed", "dim", "deficit"],
        PlotKind::Lines { x: "theta", ys: vec!["fidelity"] },
    );
    let inputs = custom_inputs(cfg);
    for &a in &cfg.alphas_or(&[]) {
        for &eta in &cfg.etas_or(&[1.0]) {
            let gate = hadamard_gate(cfg, a, family, eta)?;
            let kind = family.kind_for(SQRT_2 * a);
            let deficit = resource_deficit(a, &kind, gate.output_dim())?;
            out.cutoffs.insert(format!("{} alpha={a} eta={eta}", cfg.experiment), gate.input_dim());
            let kernel = gate.kernel()?;
            let rows = pool.install(|| {
                inputs
                    .par_iter()
                    .map(|&(th, ph)| {
                        let q = QubitSpec::new(a, th, ph);
                        let v = kernel.evaluate(&q)?;
                        let closed = hadamard::count_prob_closed(&q, 1, 1)?;
                        Ok(record![a, eta, th, ph, v.probability, v.fidelity, closed, gate.input_dim(), deficit])
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            t.rows.extend(rows);
        }
    }
    out.tables.push(t);
    Ok(out)
}

fn custom_fringe(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Computed> {
    let family = cfg.family_or(ResourceChoice::Cat);
    let etas = cfg.etas_or(&[1.0]);
    let mut out = Computed { flags: vec![FLAG_READOUT.into()], ..Default::default() };
    let mut t = Table::new(
        cfg.experiment.clone(),
        "fringe",
        FRINGE_COLUMNS.to_vec(),
        PlotKind::Grouped { x: "delta", y: "p_plus", group: "eta" },
    );
    let mut vis = Table::new(
        format!("{}_visibility", cfg.experiment),
        "fringe visibility",
        vec!["alpha", "eta", "visibility", "visibility_minus"],
        PlotKind::Grouped { x: "eta", y: "visibility", group: "alpha" },
    );
    for &a in &cfg.alphas_or(&[]) {
        let fringes = fringe_rows(cfg, a, family, &etas, pool, &mut out.cutoffs, &cfg.experiment)?;
        for (&eta, pts) in etas.iter().zip(&fringes) {
            for p in pts {
                t.rows.push(record![a, eta, p.delta, p.p_plus, p.p_minus, p.p_readout_fail, p.p_both, p.p_gate]);
            }
            let plus: Vec<f64> = pts.iter().map(|p| p.p_plus).collect();
            let minus: Vec<f64> = pts.iter().map(|p| p.p_minus).collect();
            vis.rows.push(record![
                a,
                eta,
                hadamard::visibility(&plus).unwrap_or(f64::NAN),
                hadamard::visibility(&minus).unwrap_or(f64::NAN)
            ]);
        }
    }
    out.tables = vec![t, vis];
    Ok(out)
}

fn custom_cat(cfg: &RunConfig) -> Result<Computed> {
    let mut t = Table::new(
        cfg.experiment.clone(),
        "squeezed single photon vs odd cat",
        vec!["alpha", "r", "fidelity", "stationary_residual"],
        PlotKind::Lines { x: "alpha", ys: vec!["fidelity"] },
    );
    for &a in &cfg.alphas_or(&[]) {
        let r = cfg.r_policy.r_for(a);
        t.rows.push(record![a, r, states::cat_fidelity_closed(a, r)?, states::stationary_residual(a, r)]);
    }
    Ok(Computed { tables: vec![t], ..Default::default() })
}

pub fn compute_custom(cfg: &RunConfig) -> Result<Computed> {
    cfg.validate_custom()?;
    let (pool, _) = pool(cfg)?;
    match cfg.protocol {
        Protocol::Teleport => custom_teleport(cfg, &pool),
        Protocol::Hadamard => custom_hadamard(cfg, &pool),
        Protocol::Fringe => custom_fringe(cfg, &pool),
        Protocol::Cat => custom_cat(cfg),
    }
}

fn finish(cfg: &RunConfig, experiment: &str, workers: usize, started: Instant, computed: Computed) -> Result<RunSummary> {
    let mut flags = vec![FLAG_EQ8.to_string()];
    flags.extend(computed.flags);
    let squeezing_report = REPORT_ALPHAS.iter().map(|&a| states::squeezing_discrepancy(a)).collect::<Result<Vec<_>>>()?;
    let mut manifest = Manifest {
        experiment: experiment.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        workers,
        files: Vec::new(),
        cutoffs: computed.cutoffs,
        wall_time_s: started.elapsed().as_secs_f64(),
        discrepancy_flags: flags,
        squeezing_report,
    };
    let files = output::write_outputs(&cfg.out, experiment, &computed.tables, &mut manifest)?;
    Ok(RunSummary { files, manifest, tables: computed.tables })
}

/// Computes one figure and writes its CSVs, plot script and manifest to `cfg.out`.
pub fn run_figure(id: FigureId, cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let started = Instant::now();
    let (pool, workers) = pool(cfg)?;
    let cfg = RunConfig { experiment: id.name().to_string(), ..cfg.clone() };
    let computed = compute_figure_in(id, &cfg, &pool)?;
    finish(&cfg, id.name(), workers, started, computed)
}

/// Cross-product sweep of the configured parameters for `cfg.protocol`.
pub fn run_custom(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate_custom()?;
    let started = Instant::now();
    let (_, workers) = pool(cfg)?;
    let computed = compute_custom(cfg)?;
    finish(cfg, &cfg.experiment, workers, started, computed)
}
