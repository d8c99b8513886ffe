//! Linear algebra over truncated multimode Fock spaces.
//!
//! A [`FockVector`] stores complex amplitudes over the product basis
//! `|n_1, ..., n_k>` with `n_i < dims[i]`, flattened row-major (mode 0 is the
//! most significant digit). Every operation returns a new value.
//!
//! Two-mode coupling is done block by block in total photon number: the
//! coupling generator `a_1^dag a_2 + a_2^dag a_1` restricted to the block of
//! total number `N` is a real symmetric tridiagonal matrix, and its
//! eigendecomposition gives the exact exponential. Displacements are handled
//! the same way through the quadrature `a + a^dag` on a padded working space.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest tolerated pre-normalization deficit for constructors.
pub const DEFICIT_TOLERANCE: f64 = 1e-10;
/// Largest weight a beamsplitter may drop from blocks that do not fit.
pub const LEAK_TOLERANCE: f64 = 1e-12;
/// Largest unitarity defect tolerated when displacing inside a cutoff.
pub const HEADROOM_TOLERANCE: f64 = 1e-8;
/// Outcome probabilities below this are flagged as empty.
pub const EMPTY_OUTCOME: f64 = 1e-14;

const MIN_CUTOFF: usize = 24;

/// Per-mode cutoff for states whose largest coherent amplitude is `beta_max`.
pub fn cutoff_for_amplitude(beta_max: f64) -> usize {
    let b = beta_max.abs();
    let needed = (b * b + 7.0 * b + 12.0).ceil() as usize;
    needed.max(MIN_CUTOFF)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    dims: Vec<usize>,
    amps: Vec<C64>,
    deficit: f64,
}

impl FockVector {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch(format!(
                "every mode needs dim >= 1, got {dims:?}"
            )));
        }
        let len: usize = dims.iter().product();
        if len != amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} need {len} amplitudes, got {}",
                amps.len()
            )));
        }
        Ok(Self { dims, amps, deficit: 0.0 })
    }

    /// Single-mode state from amplitudes `<n|psi>`.
    pub fn single_mode(amps: Vec<C64>) -> Result<Self> {
        Self::new(vec![amps.len()], amps)
    }

    pub fn vacuum(dims: &[usize]) -> Result<Self> {
        let len = dims.iter().product();
        let mut amps = vec![C64::new(0.0, 0.0); len];
        if len > 0 {
            amps[0] = C64::new(1.0, 0.0);
        }
        Self::new(dims.to_vec(), amps)
    }

    pub fn number_state(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::CutoffTooSmall { dim, deficit: 1.0 });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[n] = C64::new(1.0, 0.0);
        Self::single_mode(amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Norm lost to truncation (summed over tensor factors and recorded
    /// headroom defects) before renormalization.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 < 1e-300 {
            return Err(Error::DegenerateNormalization { norm_sq: n2 });
        }
        Ok(self.scaled(C64::new(1.0 / n2.sqrt(), 0.0)))
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a * c).collect(),
            deficit: self.deficit,
        }
    }

    /// `a * self + b * other`, both on the same dims.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            dims: self.dims.clone(),
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            deficit: self.deficit.max(other.deficit),
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same_dims(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn amplitude(&self, index: &[usize]) -> C64 {
        self.amps[self.flat_index(index)]
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }

    fn flat_index(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(self.strides())
            .map(|(n, s)| n * s)
            .sum()
    }

    /// Same state with mode `mode` re-cut to `new_dim`: zero padding when
    /// growing, and a truncation check when shrinking.
    pub fn with_mode_dim(&self, mode: usize, new_dim: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut dims = self.dims.clone();
        dims[mode] = new_dim;
        let mut out = vec![C64::new(0.0, 0.0); dims.iter().product()];
        let old_strides = self.strides();
        let new_strides = strides(&dims);
        let mut dropped = 0.0;
        for (flat, a) in self.amps.iter().enumerate() {
            let idx = unravel(flat, &self.dims, &old_strides);
            if idx[mode] >= new_dim {
                dropped += a.norm_sqr();
                continue;
            }
            let k: usize = idx.iter().zip(&new_strides).map(|(n, s)| n * s).sum();
            out[k] = *a;
        }
        if dropped > DEFICIT_TOLERANCE {
            return Err(Error::CutoffTooSmall { dim: new_dim, deficit: dropped });
        }
        Ok(Self { dims, amps: out, deficit: self.deficit + dropped })
    }

    /// Photon-number distribution of one mode.
    pub fn number_distribution(&self, mode: usize) -> Result<Vec<f64>> {
        self.check_mode(mode)?;
        let strides = self.strides();
        let mut p = vec![0.0; self.dims[mode]];
        for (flat, a) in self.amps.iter().enumerate() {
            p[(flat / strides[mode]) % self.dims[mode]] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Weight in each total-photon-number block of the given modes.
    pub fn total_number_distribution(&self, modes: &[usize]) -> Result<Vec<f64>> {
        for &m in modes {
            self.check_mode(m)?;
        }
        let max: usize = modes.iter().map(|&m| self.dims[m] - 1).sum();
        let strides = self.strides();
        let mut p = vec![0.0; max + 1];
        for (flat, a) in self.amps.iter().enumerate() {
            let n: usize = modes
                .iter()
                .map(|&m| (flat / strides[m]) % self.dims[m])
                .sum();
            p[n] += a.norm_sqr();
        }
        Ok(p)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "mode {mode} out of range for {} modes",
                self.dims.len()
            )));
        }
        Ok(())
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    fn with_amps(&self, amps: Vec<C64>) -> Self {
        Self { dims: self.dims.clone(), amps, deficit: self.deficit }
    }
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

pub(crate) fn unravel(flat: usize, dims: &[usize], strides: &[usize]) -> Vec<usize> {
    dims.iter()
        .zip(strides)
        .map(|(d, s)| (flat / s) % d)
        .collect()
}

/// Flat offsets of every basis index whose digits on `excluded` are zero.
pub(crate) fn base_offsets(dims: &[usize], excluded: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut offsets = vec![0usize];
    for (mode, (&d, &s)) in dims.iter().zip(&st).enumerate() {
        if excluded.contains(&mode) {
            continue;
        }
        offsets = offsets
            .iter()
            .flat_map(|&o| (0..d).map(move |n| o + n * s))
            .collect();
    }
    offsets.sort_unstable();
    offsets
}

/// Renormalizes truncated amplitudes, recording the deficit.
fn finish_truncated(amps: Vec<C64>, dim: usize) -> Result<FockVector> {
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let deficit = (1.0 - kept).max(0.0);
    if deficit > DEFICIT_TOLERANCE {
        return Err(Error::CutoffTooSmall { dim, deficit });
    }
    let scale = 1.0 / kept.sqrt();
    Ok(FockVector {
        dims: vec![dim],
        amps: amps.into_iter().map(|a| a * scale).collect(),
        deficit,
    })
}

/// Coherent state `|beta>` truncated to `dim` levels.
pub fn coherent_state(beta: C64, dim: usize) -> Result<FockVector> {
    if dim == 0 {
        return Err(Error::DimensionMismatch("dim must be >= 1".into()));
    }
    let mut amps = Vec::with_capacity(dim);
    let mut a = C64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(a);
    for n in 1..dim {
        a = a * beta / (n as f64).sqrt();
        amps.push(a);
    }
    finish_truncated(amps, dim)
}

fn check_squeezing(r: f64, dim: usize) -> Result<()> {
    if !r.is_finite() || r.abs() > 5.0 {
        return Err(Error::InvalidParameter(format!("squeezing |r| must be <= 5, got {r}")));
    }
    if dim == 0 {
        return Err(Error::DimensionMismatch("dim must be >= 1".into()));
    }
    Ok(())
}

/// `S(r)|0>` with `S(r) = exp[(r/2)(a^2 - a^dag^2)]`.
pub fn squeezed_vacuum(r: f64, dim: usize) -> Result<FockVector> {
    check_squeezing(r, dim)?;
    let t = -r.tanh();
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let mut c = 1.0 / r.cosh().sqrt();
    let mut n = 0usize;
    while 2 * n < dim {
        amps[2 * n] = C64::new(c, 0.0);
        n += 1;
        let k = 2.0 * n as f64;
        c *= t * (k * (k - 1.0)).sqrt() / k;
    }
    finish_truncated(amps, dim)
}

/// `S(r)|1>`.
pub fn squeezed_photon(r: f64, dim: usize) -> Result<FockVector> {
    check_squeezing(r, dim)?;
    let t = -r.tanh();
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let mut c = r.cosh().powf(-1.5);
    let mut n = 0usize;
    while 2 * n + 1 < dim {
        amps[2 * n + 1] = C64::new(c, 0.0);
        n += 1;
        let k = 2.0 * n as f64;
        c *= t * ((k + 1.0) * k).sqrt() / k;
    }
    finish_truncated(amps, dim)
}

/// Smallest cutoff (at least the amplitude policy for `beta_max`) at which a
/// squeezed single photon with parameter `r` fits under the deficit bound.
pub fn cutoff_for_squeezing(r: f64, beta_max: f64) -> usize {
    let mut dim = cutoff_for_amplitude(beta_max);
    while squeezed_photon(r, dim).map(|s| s.deficit() > 1e-13).unwrap_or(true) && dim < 4096 {
        dim += 2;
    }
    // margin so two-mode blocks built from it stay inside the cutoff
    dim + 8
}

pub fn tensor(states: &[&FockVector]) -> Result<FockVector> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::DimensionMismatch("tensor of zero states".into()))?;
    let mut dims = first.dims.clone();
    let mut amps = first.amps.clone();
    let mut kept = 1.0 - first.deficit;
    for s in rest {
        dims.extend_from_slice(&s.dims);
        amps = amps
            .iter()
            .flat_map(|a| s.amps.iter().map(move |b| a * b))
            .collect();
        kept *= 1.0 - s.deficit;
    }
    Ok(FockVector { dims, amps, deficit: 1.0 - kept })
}

pub fn apply_phase_rotation(state: &FockVector, mode: usize, phi: f64) -> Result<FockVector> {
    state.check_mode(mode)?;
    let st = state.strides();
    let d = state.dims[mode];
    let phases: Vec<C64> = (0..d).map(|n| C64::from_polar(1.0, phi * n as f64)).collect();
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(flat, a)| a * phases[(flat / st[mode]) % d])
        .collect();
    Ok(state.with_amps(amps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeamsplitterConvention {
    /// Real coefficients: `(b1, b2) -> (b1 cos t - b2 sin t, b1 sin t + b2 cos t)`.
    /// At `t = pi/4` this sends `|a, a>` to `|0, sqrt2 a>`.
    Real5050,
    /// `(b1, b2) -> (b1 cos t + i b2 sin t, i b1 sin t + b2 cos t)`.
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamsplitterSpec {
    pub angle: f64,
    pub convention: BeamsplitterConvention,
}

impl BeamsplitterSpec {
    pub fn real_5050() -> Self {
        Self { angle: FRAC_PI_4, convention: BeamsplitterConvention::Real5050 }
    }

    pub fn symmetric(angle: f64) -> Self {
        Self { angle, convention: BeamsplitterConvention::Symmetric }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=FRAC_PI_2).contains(&self.angle) {
            return Err(Error::InvalidParameter(format!(
                "beamsplitter angle {} outside [0, pi/2]",
                self.angle
            )));
        }
        Ok(())
    }

    /// Output coherent amplitudes for coherent inputs `(b1, b2)`.
    pub fn coherent_map(&self, b1: C64, b2: C64) -> (C64, C64) {
        let (s, c) = self.angle.sin_cos();
        match self.convention {
            BeamsplitterConvention::Real5050 => (b1 * c - b2 * s, b1 * s + b2 * c),
            BeamsplitterConvention::Symmetric => {
                let i = C64::i();
                (b1 * c + i * b2 * s, i * b1 * s + b2 * c)
            }
        }
    }
}

/// Precomputed two-mode coupling for a fixed cutoff; reusable across states.
#[derive(Clone, Debug)]
pub struct Beamsplitter {
    spec: BeamsplitterSpec,
    dim: usize,
    // blocks[N] acts on the amplitudes of |n1, N - n1>, indexed by n1
    blocks: Vec<DMatrix<C64>>,
}

impl Beamsplitter {
    pub fn new(spec: BeamsplitterSpec, dim: usize) -> Result<Self> {
        spec.validate()?;
        let blocks = (0..dim).map(|n| coupling_block(&spec, n)).collect();
        Ok(Self { spec, dim, blocks })
    }

    pub fn spec(&self) -> BeamsplitterSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, total: usize) -> Option<&DMatrix<C64>> {
        self.blocks.get(total)
    }

    pub fn apply(&self, state: &FockVector, modes: (usize, usize)) -> Result<FockVector> {
        let (i, j) = modes;
        state.check_mode(i)?;
        state.check_mode(j)?;
        if i == j {
            return Err(Error::InvalidParameter("beamsplitter needs two distinct modes".into()));
        }
        let d = state.dims[i];
        if state.dims[j] != d || d != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "beamsplitter built for dim {} applied to modes with dims {} and {}",
                self.dim, state.dims[i], state.dims[j]
            )));
        }
        let st = state.strides();
        let (si, sj) = (st[i], st[j]);
        let mut out = vec![C64::new(0.0, 0.0); state.amps.len()];
        let mut leaked = 0.0;
        let mut buf = DVector::<C64>::zeros(d);
        for base in base_offsets(&state.dims, &[i, j]) {
            for n1 in 0..d {
                for n2 in (d - n1)..d {
                    leaked += state.amps[base + n1 * si + n2 * sj].norm_sqr();
                }
            }
            for (total, u) in self.blocks.iter().enumerate() {
                let len = total + 1;
                let mut any = false;
                for n1 in 0..len {
                    let a = state.amps[base + n1 * si + (total - n1) * sj];
                    buf[n1] = a;
                    any |= a != C64::new(0.0, 0.0);
                }
                if !any {
                    continue;
                }
                for r in 0..len {
                    let mut acc = C64::new(0.0, 0.0);
                    for c in 0..len {
                        acc += u[(r, c)] * buf[c];
                    }
                    out[base + r * si + (total - r) * sj] = acc;
                }
            }
        }
        if leaked > LEAK_TOLERANCE {
            return Err(Error::AmplitudeLeak { dim: d, weight: leaked });
        }
        Ok(FockVector {
            dims: state.dims.clone(),
            amps: out,
            deficit: state.deficit + leaked,
        })
    }
}

/// Exponential of the coupling generator on the block of total number `total`.
fn coupling_block(spec: &BeamsplitterSpec, total: usize) -> DMatrix<C64> {
    let len = total + 1;
    // a1^dag a2 + a2^dag a1 on |n1, total - n1>
    let mut gen = DMatrix::<f64>::zeros(len, len);
    for n1 in 0..total {
        let v = (((n1 + 1) * (total - n1)) as f64).sqrt();
        gen[(n1 + 1, n1)] = v;
        gen[(n1, n1 + 1)] = v;
    }
    let eig = SymmetricEigen::new(gen);
    // exp(i t G) for the symmetric convention; the real convention is the
    // same exponential conjugated by exp(-i pi/2 n1) at angle -t.
    let t = match spec.convention {
        BeamsplitterConvention::Symmetric => spec.angle,
        BeamsplitterConvention::Real5050 => -spec.angle,
    };
    let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, t * l)));
    let mut u = &v * phases * v.transpose();
    if spec.convention == BeamsplitterConvention::Real5050 {
        let s: Vec<C64> = (0..len).map(|n| C64::from_polar(1.0, -FRAC_PI_2 * n as f64)).collect();
        for r in 0..len {
            for c in 0..len {
                u[(r, c)] *= s[r] * s[c].conj();
            }
        }
    }
    u
}

pub fn apply_beamsplitter(
    state: &FockVector,
    modes: (usize, usize),
    spec: BeamsplitterSpec,
) -> Result<FockVector> {
    let d = state.dims.get(modes.0).copied().unwrap_or(0);
    Beamsplitter::new(spec, d)?.apply(state, modes)
}

/// Displacement operators `exp(beta a^dag - beta* a)` on a padded working
/// space. Reusable across amplitudes for a fixed working cutoff.
#[derive(Clone, Debug)]
pub struct Displacer {
    work_dim: usize,
    eigvecs: DMatrix<f64>,
    eigvals: DVector<f64>,
}

impl Displacer {
    pub fn new(work_dim: usize) -> Self {
        let mut x = DMatrix::<f64>::zeros(work_dim, work_dim);
        for n in 1..work_dim {
            let v = (n as f64).sqrt();
            x[(n, n - 1)] = v;
            x[(n - 1, n)] = v;
        }
        let eig = SymmetricEigen::new(x);
        Self { work_dim, eigvecs: eig.eigenvectors, eigvals: eig.eigenvalues }
    }

    /// Working cutoff that leaves headroom for displacing a `dim`-level mode
    /// by `|beta|`.
    pub fn work_dim_for(dim: usize, beta_abs: f64) -> usize {
        dim + cutoff_for_amplitude(beta_abs)
    }

    pub fn work_dim(&self) -> usize {
        self.work_dim
    }

    /// Displacement matrix on the working space, rows/cols `0..rows`.
    pub fn matrix(&self, beta: C64, rows: usize) -> DMatrix<C64> {
        let w = self.work_dim;
        let rows = rows.min(w);
        // beta a^dag - beta* a = -i|beta| P X P^dag with P = exp(i psi n),
        // psi = arg(beta) + pi/2 and X = a + a^dag.
        let psi = beta.arg() + FRAC_PI_2;
        let mag = beta.norm();
        let phases: Vec<C64> = self
            .eigvals
            .iter()
            .map(|l| C64::from_polar(1.0, -mag * l))
            .collect();
        let mut m = DMatrix::<C64>::zeros(rows, w);
        for r in 0..rows {
            for c in 0..w {
                let mut acc = C64::new(0.0, 0.0);
                for (k, p) in phases.iter().enumerate() {
                    acc += p * (self.eigvecs[(r, k)] * self.eigvecs[(c, k)]);
                }
                m[(r, c)] = acc * C64::from_polar(1.0, psi * (r as f64 - c as f64));
            }
        }
        m
    }

    pub fn apply(&self, state: &FockVector, mode: usize, beta: C64) -> Result<FockVector> {
        state.check_mode(mode)?;
        let d = state.dims[mode];
        if d > self.work_dim {
            return Err(Error::DimensionMismatch(format!(
                "mode dim {d} exceeds displacement working dim {}",
                self.work_dim
            )));
        }
        if beta == C64::new(0.0, 0.0) {
            return Ok(state.clone());
        }
        let m = self.matrix(beta, self.work_dim);
        let st = state.strides();
        let s = st[mode];
        let mut out = vec![C64::new(0.0, 0.0); state.amps.len()];
        let mut escaped = 0.0;
        for base in base_offsets(&state.dims, &[mode]) {
            for r in 0..self.work_dim {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..d {
                    acc += m[(r, c)] * state.amps[base + c * s];
                }
                if r < d {
                    out[base + r * s] = acc;
                } else {
                    escaped += acc.norm_sqr();
                }
            }
        }
        let before = state.norm_sqr();
        let defect = escaped / before.max(1e-300);
        if defect > HEADROOM_TOLERANCE {
            return Err(Error::Headroom { defect });
        }
        let kept: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        let scale = (before / kept).sqrt();
        Ok(FockVector {
            dims: state.dims.clone(),
            amps: out.into_iter().map(|a| a * scale).collect(),
            deficit: state.deficit + defect,
        })
    }
}

pub fn apply_displacement(state: &FockVector, mode: usize, beta: C64) -> Result<FockVector> {
    let d = state.dims.get(mode).copied().unwrap_or(0);
    Displacer::new(Displacer::work_dim_for(d, beta.norm())).apply(state, mode, beta)
}

/// Density operator over one truncated mode.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    matrix: DMatrix<C64>,
}

impl MixedState {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: DMatrix::zeros(dim, dim) }
    }

    pub fn from_pure(state: &FockVector) -> Result<Self> {
        let mut rho = Self::zeros(single_mode_dim(state)?);
        rho.add_pure(1.0, state)?;
        Ok(rho)
    }

    /// `rho += weight |psi><psi|`.
    pub fn add_pure(&mut self, weight: f64, psi: &FockVector) -> Result<()> {
        let d = single_mode_dim(psi)?;
        if d != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {d}", self.dim())));
        }
        let a = &psi.amps;
        for r in 0..d {
            if a[r] == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..d {
                self.matrix[(r, c)] += a[r] * a[c].conj() * weight;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t < 1e-300 {
            return Err(Error::DegenerateNormalization { norm_sq: t });
        }
        Ok(Self { matrix: self.matrix.map(|z| z / t) })
    }

    /// `tr(rho^2) / tr(rho)^2`.
    pub fn purity(&self) -> f64 {
        let t = self.trace();
        let mut p = 0.0;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                p += self.matrix[(r, c)].norm_sqr();
            }
        }
        p / (t * t)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                worst = worst.max((self.matrix[(r, c)] - self.matrix[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Eigen-decomposition into weighted pure states, dropping eigenvalues below
/// `1e-14 tr(rho)`.
    pub fn eigen_ensemble(&self) -> Vec<(f64, FockVector)> {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let d = self.dim();
        let floor = 1e-14 * self.trace();
        (0..d)
            .filter(|&k| eig.eigenvalues[k] > floor)
            .map(|k| {
                let amps = eig.eigenvectors.column(k).iter().copied().collect();
                (eig.eigenvalues[k], FockVector { dims: vec![d], amps, deficit: 0.0 })
            })
            .collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn single_mode_dim(state: &FockVector) -> Result<usize> {
    match state.dims.as_slice() {
        [d] => Ok(*d),
        dims => Err(Error::DimensionMismatch(format!("expected one mode, got {dims:?}"))),
    }
}

/// Anything whose overlap with a pure reference can be taken.
pub trait Overlap {
    /// `<target|rho|target>` with both sides normalized.
    fn overlap_with(&self, target: &FockVector) -> Result<f64>;
}

impl Overlap for FockVector {
    fn overlap_with(&self, target: &FockVector) -> Result<f64> {
        let ip = target.inner(self)?;
        Ok(ip.norm_sqr() / (target.norm_sqr() * self.norm_sqr()))
    }
}

impl Overlap for MixedState {
    fn overlap_with(&self, target: &FockVector) -> Result<f64> {
        let d = single_mode_dim(target)?;
        if d != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {d}", self.dim())));
        }
        let t = DVector::from_column_slice(&target.amps);
        let v = (t.adjoint() * &self.matrix * &t)[(0, 0)].re;
        Ok(v / (target.norm_sqr() * self.trace()))
    }
}

/// Fidelity `<psi|rho|psi>` of `state` against the pure `target`, clamped to [0, 1].
pub fn fidelity<S: Overlap + ?Sized>(target: &FockVector, state: &S) -> Result<f64> {
    Ok(state.overlap_with(target)?.clamp(0.0, 1.0))
}

/// Result of projecting some modes onto a definite count pattern.
#[derive(Clone, Debug)]
pub struct Conditioned {
    pub probability: f64,
    /// Renormalized state of the unmeasured modes; `None` flags an empty outcome.
    pub state: Option<FockVector>,
}

impl Conditioned {
    pub fn is_empty(&self) -> bool {
        self.state.is_none()
    }
}

/// Projects `measured` modes onto the count pattern `counts` and returns the
/// outcome probability and the renormalized remaining-mode state.
pub fn condition_on_outcome(
    state: &FockVector,
    measured: &[usize],
    counts: &[usize],
) -> Result<Conditioned> {
    if measured.len() != counts.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} measured modes but {} counts",
            measured.len(),
            counts.len()
        )));
    }
    for (k, &m) in measured.iter().enumerate() {
        state.check_mode(m)?;
        if measured[..k].contains(&m) {
            return Err(Error::InvalidParameter(format!("mode {m} measured twice")));
        }
    }
    let st = state.strides();
    let mut fixed = 0usize;
    for (&m, &n) in measured.iter().zip(counts) {
        if n >= state.dims[m] {
            return Ok(Conditioned { probability: 0.0, state: None });
        }
        fixed += n * st[m];
    }
    let remaining_dims: Vec<usize> = (0..state.num_modes())
        .filter(|m| !measured.contains(m))
        .map(|m| state.dims[m])
        .collect();
    let total = state.norm_sqr();
    let amps: Vec<C64> = base_offsets(&state.dims, measured)
        .into_iter()
        .map(|b| state.amps[b + fixed])
        .collect();
    let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let probability = weight / total;
    if probability < EMPTY_OUTCOME {
        return Ok(Conditioned { probability, state: None });
    }
    let dims = if remaining_dims.is_empty() { vec![1] } else { remaining_dims };
    let scale = 1.0 / weight.sqrt();
    Ok(Conditioned {
        probability,
        state: Some(FockVector {
            dims,
            amps: amps.into_iter().map(|a| a * scale).collect(),
            deficit: state.deficit,
        }),
    })
}
