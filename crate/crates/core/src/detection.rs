//! Photon-number-resolving detection with binomial loss.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockVector, MixedState, C64, EMPTY_OUTCOME};

/// Counter with efficiency `efficiency`; reported counts above `n_max` are
/// clipped to `n_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub efficiency: f64,
    pub n_max: usize,
}

impl DetectorModel {
    /// Unbounded counter: `n_max` follows the cutoff of whatever it measures.
    pub fn new(efficiency: f64) -> Result<Self> {
        let m = Self { efficiency, n_max: usize::MAX };
        m.validate()?;
        Ok(m)
    }

    pub fn ideal() -> Self {
        Self { efficiency: 1.0, n_max: usize::MAX }
    }

    pub fn with_n_max(self, n_max: usize) -> Self {
        Self { n_max, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::InvalidParameter(format!(
                "detector efficiency must be in [0, 1], got {}",
                self.efficiency
            )));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.efficiency == 1.0
    }

    /// `kernel[m][k]`: probability that `m` true photons are reported as `k`,
    /// for `m, k < dim`.
    pub fn kernel(&self, dim: usize) -> Vec<Vec<f64>> {
        let top = self.n_max.min(dim.saturating_sub(1));
        (0..dim)
            .map(|m| {
                let mut row = vec![0.0; dim];
                for (k, p) in binomial_row(m, self.efficiency).into_iter().enumerate() {
                    row[k.min(top)] += p;
                }
                row
            })
            .collect()
    }

    /// `q[m][c]`: probability that `m` true photons are reported in class `c`
    /// (indexed by [`OutcomeClass::index`]).
    pub fn class_kernel(&self, dim: usize) -> Vec<[f64; 3]> {
        self.kernel(dim)
            .into_iter()
            .map(|row| {
                let mut q = [0.0; 3];
                for (k, p) in row.into_iter().enumerate() {
                    q[OutcomeClass::of(k).index()] += p;
                }
                q
            })
            .collect()
    }
}

/// `C(m, k) eta^k (1 - eta)^(m - k)` for `k = 0..=m`.
fn binomial_row(m: usize, eta: f64) -> Vec<f64> {
    if eta >= 1.0 {
        let mut row = vec![0.0; m + 1];
        row[m] = 1.0;
        return row;
    }
    if eta <= 0.0 {
        let mut row = vec![0.0; m + 1];
        row[0] = 1.0;
        return row;
    }
    let (le, lq) = (eta.ln(), (1.0 - eta).ln());
    let lf: Vec<f64> = std::iter::once(0.0)
        .chain((1..=m).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    (0..=m)
        .map(|k| (lf[m] - lf[k] - lf[m - k] + k as f64 * le + (m - k) as f64 * lq).exp())
        .collect()
}

/// Diagonals of the loss POVM: `povm[k][m] = <m|Pi_k|m>` for `k <= n_max`.
pub fn lossy_povm(model: &DetectorModel, dim: usize) -> Vec<Vec<f64>> {
    let kernel = model.kernel(dim);
    let reported = model.n_max.min(dim.saturating_sub(1)) + 1;
    (0..reported).map(|k| (0..dim).map(|m| kernel[m][k]).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutcomeClass {
    Zero,
    Odd,
    EvenNonzero,
}

impl OutcomeClass {
    pub const ALL: [OutcomeClass; 3] = [OutcomeClass::Zero, OutcomeClass::Odd, OutcomeClass::EvenNonzero];

    pub fn of(count: usize) -> Self {
        match count {
            0 => OutcomeClass::Zero,
            n if n % 2 == 1 => OutcomeClass::Odd,
            _ => OutcomeClass::EvenNonzero,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            OutcomeClass::Zero => "zero",
            OutcomeClass::Odd => "odd",
            OutcomeClass::EvenNonzero => "even",
        }
    }
}

pub fn classify(count: i64) -> Result<OutcomeClass> {
    usize::try_from(count)
        .map(OutcomeClass::of)
        .map_err(|_| Error::InvalidParameter(format!("photon count must be >= 0, got {count}")))
}

/// Unnormalized kept-mode amplitudes for one true count pattern.
#[derive(Clone, Debug)]
pub struct Branch {
    pub counts: Vec<usize>,
    pub amps: Vec<C64>,
    pub weight: f64,
}

/// Splits `state` by the true counts on `measured`, which must leave exactly
/// one mode unmeasured. Branches with zero weight are skipped.
pub fn pure_branches(state: &FockVector, measured: &[usize]) -> Result<(usize, Vec<Branch>)> {
    let dims = state.dims();
    let kept: Vec<usize> = (0..dims.len()).filter(|m| !measured.contains(m)).collect();
    if kept.len() != 1 || measured.len() + 1 != dims.len() || measured.iter().any(|&m| m >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "measure all but one mode: dims {dims:?}, measured {measured:?}"
        )));
    }
    let kept_mode = kept[0];
    let kd = dims[kept_mode];
    let st = fock::strides(dims);
    let mdims: Vec<usize> = measured.iter().map(|&m| dims[m]).collect();
    let patterns: usize = mdims.iter().product();
    let norm = state.norm_sqr();
    let amps = state.amplitudes();
    let mut out = Vec::new();
    let mut counts = vec![0usize; measured.len()];
    for _ in 0..patterns {
        let base: usize = measured.iter().zip(&counts).map(|(&m, &n)| n * st[m]).sum();
        let branch: Vec<C64> = (0..kd).map(|j| amps[base + j * st[kept_mode]]).collect();
        let weight = branch.iter().map(|a| a.norm_sqr()).sum::<f64>() / norm;
        if weight > 0.0 {
            out.push(Branch { counts: counts.clone(), amps: branch, weight });
        }
        for i in (0..counts.len()).rev() {
            counts[i] += 1;
            if counts[i] < mdims[i] {
                break;
            }
            counts[i] = 0;
        }
    }
    let scale = 1.0 / norm.sqrt();
    for b in &mut out {
        b.amps.iter_mut().for_each(|a| *a *= scale);
    }
    Ok((kd, out))
}

/// One reported count pattern.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub counts: Vec<usize>,
    pub probability: f64,
    /// Normalized kept-mode state; `None` when `probability < 1e-14`.
    pub state: Option<MixedState>,
}

/// Full outcome table of a lossy number measurement on all but one mode,
/// in lexicographic order of the reported counts.
pub fn measure_modes(state: &FockVector, measured: &[usize], model: &DetectorModel) -> Result<Vec<Outcome>> {
    model.validate()?;
    let (kd, branches) = pure_branches(state, measured)?;
    let kernels: Vec<Vec<Vec<f64>>> = measured.iter().map(|&m| model.kernel(state.dims()[m])).collect();
    let mdims: Vec<usize> = measured.iter().map(|&m| state.dims()[m]).collect();
    let patterns: usize = mdims.iter().product();
    let mut out = Vec::new();
    let mut counts = vec![0usize; measured.len()];
    for _ in 0..patterns {
        let mut rho = DMatrix::<C64>::zeros(kd, kd);
        let mut probability = 0.0;
        for b in &branches {
            let w: f64 = b
                .counts
                .iter()
                .zip(&counts)
                .zip(&kernels)
                .map(|((&t, &k), ker)| ker[t][k])
                .product();
            if w == 0.0 {
                continue;
            }
            probability += w * b.weight;
            for r in 0..kd {
                let ar = b.amps[r] * w;
                if ar == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..kd {
                    rho[(r, c)] += ar * b.amps[c].conj();
                }
            }
        }
        if probability > 0.0 {
            let state = if probability < EMPTY_OUTCOME {
                None
            } else {
                Some(MixedState::from_matrix(rho.map(|z| z / probability))?)
            };
            out.push(Outcome { counts: counts.clone(), probability, state });
        }
        for i in (0..counts.len()).rev() {
            counts[i] += 1;
            if counts[i] < mdims[i] {
                break;
            }
            counts[i] = 0;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn povm_limits() {
        let ideal = lossy_povm(&DetectorModel::ideal(), 6);
        for (k, row) in ideal.iter().enumerate() {
            for (m, &p) in row.iter().enumerate() {
                assert_eq!(p, if m == k { 1.0 } else { 0.0 });
            }
        }
        let blind = lossy_povm(&DetectorModel::new(0.0).unwrap(), 6);
        assert!(blind[0].iter().all(|&p| p == 1.0));
        assert!(blind[1..].iter().flatten().all(|&p| p == 0.0));
        let p = lossy_povm(&DetectorModel::new(0.9).unwrap(), 6);
        assert_abs_diff_eq!(p[1][2], 0.18, epsilon = 1e-15);
    }

    #[test]
    fn povm_is_complete() {
        for eta in [0.0, 0.3, 0.8, 0.9, 0.95, 1.0] {
            for model in [DetectorModel::new(eta).unwrap(), DetectorModel::new(eta).unwrap().with_n_max(3)] {
                let p = lossy_povm(&model, 40);
                for m in 0..40 {
                    let s: f64 = p.iter().map(|row| row[m]).sum();
                    assert_abs_diff_eq!(s, 1.0, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn bad_efficiency_rejected() {
        assert!(DetectorModel::new(1.2).is_err());
        assert!(DetectorModel::new(-0.1).is_err());
        assert!(DetectorModel::new(f64::NAN).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(classify(0).unwrap(), OutcomeClass::Zero);
        assert_eq!(classify(3).unwrap(), OutcomeClass::Odd);
        assert_eq!(classify(4).unwrap(), OutcomeClass::EvenNonzero);
        assert!(classify(-1).is_err());
    }

    #[test]
    fn separable_two_photon_case() {
        let psi = fock::coherent_state(C64::new(0.4, 0.2), 12).unwrap();
        let two = FockVector::number_state(2, 12).unwrap();
        let state = fock::tensor(&[&two, &psi]).unwrap();
        let table = measure_modes(&state, &[0], &DetectorModel::new(0.9).unwrap()).unwrap();
        let one = table.iter().find(|o| o.counts == [1]).unwrap();
        assert_abs_diff_eq!(one.probability, 0.18, epsilon = 1e-14);
        assert!(fock::fidelity(&psi, one.state.as_ref().unwrap()).unwrap() > 1.0 - 1e-12);
        let total: f64 = table.iter().map(|o| o.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ideal_detection_matches_pure_conditioning() {
        let a = fock::coherent_state(C64::new(0.5, 0.0), 16).unwrap();
        let b = fock::coherent_state(C64::new(-0.3, 0.2), 16).unwrap();
        let c = fock::squeezed_photon(-0.1, 16).unwrap();
        let bs = fock::Beamsplitter::new(fock::BeamsplitterSpec::real_5050(), 16).unwrap();
        let state = fock::tensor(&[&a, &b, &c]).unwrap();
        let state = bs.apply(&bs.apply(&state, (0, 2)).unwrap(), (1, 2)).unwrap();
        let table = measure_modes(&state, &[1, 2], &DetectorModel::ideal()).unwrap();
        let total: f64 = table.iter().map(|o| o.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        for o in table.iter().filter(|o| o.state.is_some()) {
            let pure = fock::condition_on_outcome(&state, &[1, 2], &o.counts).unwrap();
            assert_abs_diff_eq!(pure.probability, o.probability, epsilon = 1e-14);
            let rho = o.state.as_ref().unwrap();
            assert!(rho.purity() > 1.0 - 1e-9);
            assert!(fock::fidelity(pure.state.as_ref().unwrap(), rho).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn click_probability_falls_with_efficiency() {
        let a = fock::coherent_state(C64::new(0.9, 0.3), 16).unwrap();
        let k = fock::squeezed_photon(0.2, 16).unwrap();
        let state = fock::tensor(&[&a, &k]).unwrap();
        let mut last = f64::INFINITY;
        for eta in [1.0, 0.95, 0.9, 0.8, 0.5, 0.0] {
            let table = measure_modes(&state, &[0], &DetectorModel::new(eta).unwrap()).unwrap();
            let click: f64 = table.iter().filter(|o| o.counts[0] > 0).map(|o| o.probability).sum();
            assert!(click <= last + 1e-15);
            last = click;
        }
        assert!(last < 1e-15);
    }

    #[test]
    fn class_kernel_rows_sum_to_one() {
        let q = DetectorModel::new(0.9).unwrap().class_kernel(30);
        assert_eq!(q[0], [1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(q[2][OutcomeClass::Odd.index()], 0.18, epsilon = 1e-15);
        for row in q {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_wrong_mode_count() {
        let s = FockVector::vacuum(&[4, 4, 4]).unwrap();
        assert!(measure_modes(&s, &[0], &DetectorModel::ideal()).is_err());
    }
}
