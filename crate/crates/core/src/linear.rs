//! Linear response of a heralded circuit to qubit inputs `mu|alpha> + nu|-alpha>`.
//!
//! The true-count branches for `|alpha>` and `|-alpha>` are stored as Gram
//! data, so any input is evaluated without touching the Fock space again.

use crate::detection::Branch;
use crate::error::{Error, Result};
use crate::fock::{self, FockVector, C64};

#[derive(Clone, Debug)]
pub(crate) struct PatternGram {
    pub counts: [usize; 2],
    aa: f64,
    bb: f64,
    ab: C64,
    /// `<alpha|a>, <-alpha|a>, <alpha|b>, <-alpha|b>`
    proj: [C64; 4],
}

/// One pattern evaluated for a fixed input.
pub(crate) struct PatternValue {
    /// Branch weight (input normalized).
    pub probability: f64,
    on_plus: C64,
    on_minus: C64,
}

#[derive(Clone, Debug)]
pub(crate) struct Response {
    pub alpha: f64,
    pub dim: usize,
    overlap: f64,
    pub patterns: Vec<PatternGram>,
}

pub(crate) struct Input {
    mu: C64,
    nu: C64,
    norm_sqr: f64,
}

impl Response {
    /// `a`, `b`: branches of the responses to `|alpha>` and `|-alpha>`; the
    /// kept mode has dimension `dim`, both measured modes `measured_dim`.
    pub fn new(alpha: f64, dim: usize, measured_dim: usize, a: &[Branch], b: &[Branch]) -> Result<Self> {
        let plus = fock::coherent_state(C64::new(alpha, 0.0), dim)?;
        let minus = fock::coherent_state(C64::new(-alpha, 0.0), dim)?;
        let overlap = plus.inner(&minus)?.re;
        let key = |br: &Branch| br.counts[0] * measured_dim + br.counts[1];
        let mut a_map = vec![None; measured_dim * measured_dim];
        for br in a {
            a_map[key(br)] = Some(br);
        }
        let mut b_map = vec![None; measured_dim * measured_dim];
        for br in b {
            b_map[key(br)] = Some(br);
        }
        let zero = vec![C64::new(0.0, 0.0); dim];
        let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(x, y)| x.conj() * y).sum() };
        let mut patterns = Vec::new();
        for k in 0..measured_dim * measured_dim {
            if a_map[k].is_none() && b_map[k].is_none() {
                continue;
            }
            let av = a_map[k].map_or(zero.as_slice(), |br| br.amps.as_slice());
            let bv = b_map[k].map_or(zero.as_slice(), |br| br.amps.as_slice());
            patterns.push(PatternGram {
                counts: [k / measured_dim, k % measured_dim],
                aa: dot(av, av).re,
                bb: dot(bv, bv).re,
                ab: dot(av, bv),
                proj: [
                    dot(plus.amplitudes(), av),
                    dot(minus.amplitudes(), av),
                    dot(plus.amplitudes(), bv),
                    dot(minus.amplitudes(), bv),
                ],
            });
        }
        Ok(Self { alpha, dim, overlap, patterns })
    }

    pub fn norm_sqr(&self, mu: C64, nu: C64) -> f64 {
        mu.norm_sqr() + nu.norm_sqr() + 2.0 * self.overlap * (mu.conj() * nu).re
    }

    pub fn input(&self, alpha: f64, mu: C64, nu: C64) -> Result<Input> {
        if (alpha - self.alpha).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "input alpha {alpha} does not match circuit alpha {}",
                self.alpha
            )));
        }
        let norm_sqr = self.norm_sqr(mu, nu);
        if norm_sqr < 1e-12 {
            return Err(Error::DegenerateNormalization { norm_sq: norm_sqr });
        }
        Ok(Input { mu, nu, norm_sqr })
    }

    pub fn eval(&self, pat: &PatternGram, input: &Input) -> PatternValue {
        let (mu, nu) = (input.mu, input.nu);
        let w = mu.norm_sqr() * pat.aa + nu.norm_sqr() * pat.bb + 2.0 * (mu.conj() * nu * pat.ab).re;
        PatternValue {
            probability: w / input.norm_sqr,
            on_plus: mu * pat.proj[0] + nu * pat.proj[2],
            on_minus: mu * pat.proj[1] + nu * pat.proj[3],
        }
    }

    /// `|<target|psi_t>|^2` with the target `m|alpha> + n|-alpha>` normalized;
    /// weighted like [`PatternValue::probability`].
    pub fn overlap_sqr(&self, v: &PatternValue, input: &Input, target: (C64, C64)) -> f64 {
        let (m, n) = target;
        (m.conj() * v.on_plus + n.conj() * v.on_minus).norm_sqr() / (input.norm_sqr * self.norm_sqr(m, n))
    }
}

/// Responses of `branches_of` to `|alpha>` and `|-alpha>` of dimension `input_dim`.
pub(crate) fn basis_branches<F>(alpha: f64, input_dim: usize, branches_of: F) -> Result<(Vec<Branch>, Vec<Branch>)>
where
    F: Fn(&FockVector) -> Result<Vec<Branch>>,
{
    let plus = fock::coherent_state(C64::new(alpha, 0.0), input_dim)?;
    let minus = fock::coherent_state(C64::new(-alpha, 0.0), input_dim)?;
    Ok((branches_of(&plus)?, branches_of(&minus)?))
}
