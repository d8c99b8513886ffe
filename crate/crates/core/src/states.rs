//! Named states of the coherent-state qubit encoding and the squeezed-photon
//! approximation to the odd cat state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockVector, C64};
use crate::optimize::{golden_section_max, scan_max};

/// `cos(theta)|alpha> + e^{i phi} sin(theta)|-alpha>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitSpec {
    pub alpha: f64,
    pub theta: f64,
    pub phi: f64,
}

impl QubitSpec {
    pub fn new(alpha: f64, theta: f64, phi: f64) -> Self {
        Self { alpha, theta, phi }
    }

    pub fn mu(&self) -> C64 {
        C64::new(self.theta.cos(), 0.0)
    }

    pub fn nu(&self) -> C64 {
        C64::from_polar(self.theta.sin(), self.phi)
    }

    /// Squared norm of `mu|alpha> + nu|-alpha>`.
    pub fn norm_sqr(&self) -> f64 {
        coefficient_norm_sqr(self.alpha, self.mu(), self.nu())
    }

    /// The state with the relative sign of `|-alpha>` flipped (a Z error).
    pub fn z_flipped(&self) -> Self {
        Self { phi: self.phi + std::f64::consts::PI, ..*self }
    }
}

/// `|mu|^2 + |nu|^2 + 2 e^{-2 alpha^2} Re(nu mu*)`.
pub fn coefficient_norm_sqr(alpha: f64, mu: C64, nu: C64) -> f64 {
    mu.norm_sqr() + nu.norm_sqr() + 2.0 * (-2.0 * alpha * alpha).exp() * (nu * mu.conj()).re
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatSpec {
    pub alpha: f64,
    pub parity: Parity,
}

impl CatSpec {
    pub fn odd(alpha: f64) -> Self {
        Self { alpha, parity: Parity::Odd }
    }

    pub fn even(alpha: f64) -> Self {
        Self { alpha, parity: Parity::Even }
    }

    /// Squared norm of `|alpha> -+ |-alpha>`.
    pub fn norm_sqr(&self) -> f64 {
        let x = (-2.0 * self.alpha * self.alpha).exp();
        match self.parity {
            Parity::Odd => 2.0 - 2.0 * x,
            Parity::Even => 2.0 + 2.0 * x,
        }
    }
}

/// Source of the superposition resource.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ResourceKind {
    /// An exact odd cat state of whatever size the protocol needs.
    ExactCat,
    /// `S(r)|1>` with signed squeezing `r`.
    SqueezedPhoton { r: f64 },
}

impl ResourceKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ResourceKind::ExactCat => Ok(()),
            ResourceKind::SqueezedPhoton { r } if r.is_finite() => Ok(()),
            ResourceKind::SqueezedPhoton { r } => {
                Err(Error::InvalidParameter(format!("squeezing must be finite, got {r}")))
            }
        }
    }

    /// The state standing in for an odd cat of size `alpha_cat`.
    pub fn source_state(&self, alpha_cat: f64, dim: usize) -> Result<FockVector> {
        match *self {
            ResourceKind::ExactCat => cat_state(CatSpec::odd(alpha_cat), dim),
            ResourceKind::SqueezedPhoton { r } => fock::squeezed_photon(r, dim),
        }
    }

    /// Cutoff that holds this source together with coherent amplitudes up to `beta_max`.
    pub fn cutoff(&self, beta_max: f64) -> usize {
        match *self {
            ResourceKind::ExactCat => fock::cutoff_for_amplitude(beta_max),
            ResourceKind::SqueezedPhoton { r } => fock::cutoff_for_squeezing(r, beta_max),
        }
    }
}

/// How a squeezed-photon resource picks its squeezing for a target cat size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqueezingPolicy {
    /// Numerically maximized closed-form fidelity.
    #[default]
    Numeric,
    /// The printed arccosh formula, with the sign that matches the odd cat.
    Eq8,
}

impl SqueezingPolicy {
    pub fn r_for(&self, alpha_cat: f64) -> f64 {
        match self {
            SqueezingPolicy::Numeric => optimal_r_numeric(alpha_cat).r,
            SqueezingPolicy::Eq8 => -arccosh_squeezing(alpha_cat),
        }
    }
}

/// A resource choice that adapts to the cat size each protocol needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResourceFamily {
    ExactCat,
    SqueezedPhoton(SqueezingPolicy),
}

impl ResourceFamily {
    pub fn kind_for(&self, alpha_cat: f64) -> ResourceKind {
        match self {
            ResourceFamily::ExactCat => ResourceKind::ExactCat,
            ResourceFamily::SqueezedPhoton(p) => ResourceKind::SqueezedPhoton { r: p.r_for(alpha_cat) },
        }
    }
}

pub fn cat_state(spec: CatSpec, dim: usize) -> Result<FockVector> {
    if !(spec.alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("cat size must be > 0, got {}", spec.alpha)));
    }
    let a = spec.alpha;
    // (1 -+ (-1)^n) e^{-a^2/2} a^n / sqrt(n!), normalized without cancellation
    let norm_sqr = match spec.parity {
        Parity::Odd => -2.0 * (-2.0 * a * a).exp_m1(),
        Parity::Even => 2.0 + 2.0 * (-2.0 * a * a).exp(),
    };
    let keep_odd = spec.parity == Parity::Odd;
    let mut term = (-a * a / 2.0).exp() * 2.0 / norm_sqr.sqrt();
    let mut amps = Vec::with_capacity(dim);
    for n in 0..dim {
        if n > 0 {
            term *= a / (n as f64).sqrt();
        }
        let keep = (n % 2 == 1) == keep_odd;
        amps.push(C64::new(if keep { term } else { 0.0 }, 0.0));
    }
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let deficit = (1.0 - kept).max(0.0);
    if deficit > fock::DEFICIT_TOLERANCE {
        return Err(Error::CutoffTooSmall { dim, deficit });
    }
    FockVector::single_mode(amps)?.normalized()
}

/// Normalized `mu|alpha> + nu|-alpha>`.
pub fn qubit_from_coefficients(alpha: f64, mu: C64, nu: C64, dim: usize) -> Result<FockVector> {
    let norm_sqr = coefficient_norm_sqr(alpha, mu, nu);
    if norm_sqr < 1e-12 {
        return Err(Error::DegenerateNormalization { norm_sq: norm_sqr });
    }
    let plus = fock::coherent_state(C64::new(alpha, 0.0), dim)?;
    let minus = fock::coherent_state(C64::new(-alpha, 0.0), dim)?;
    plus.combine(mu, &minus, nu)?.normalized()
}

pub fn qubit_state(spec: &QubitSpec, dim: usize) -> Result<FockVector> {
    if !(spec.alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("qubit amplitude must be > 0, got {}", spec.alpha)));
    }
    qubit_from_coefficients(spec.alpha, spec.mu(), spec.nu(), dim)
}

/// Closed-form fidelity between `S(r)|1>` and the odd cat of size `alpha`.
pub fn cat_fidelity_closed(alpha: f64, r: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let a2 = alpha * alpha;
    let prefactor = (-a2).exp() / (2.0 * -(-2.0 * a2).exp_m1());
    Ok(prefactor * 4.0 * a2 / r.cosh().powi(3) * (-a2 * r.tanh()).exp())
}

/// The printed optimal-squeezing formula,
/// `arccosh(sqrt(1/2 + sqrt(9 + 4 alpha^2) / 6))`, non-negative.
pub fn arccosh_squeezing(alpha: f64) -> f64 {
    (0.5 + (9.0 + 4.0 * alpha * alpha).sqrt() / 6.0).sqrt().acosh()
}

/// `alpha^2 tanh^2 r - 3 tanh r - alpha^2`; zero where `d F / d r` vanishes.
pub fn stationary_residual(alpha: f64, r: f64) -> f64 {
    let t = r.tanh();
    alpha * alpha * t * t - 3.0 * t - alpha * alpha
}

/// Analytic `d F / d r` of the closed-form fidelity.
pub fn cat_fidelity_slope(alpha: f64, r: f64) -> Result<f64> {
    let f = cat_fidelity_closed(alpha, r)?;
    let t = r.tanh();
    Ok(f * (-3.0 * t - alpha * alpha * (1.0 - t * t)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalSqueezing {
    /// Signed maximizer.
    pub r: f64,
    pub fidelity: f64,
    pub stationary_residual: f64,
}

/// `ln F(alpha, r) - ln F(alpha, r0)` evaluated without cancellation.
fn log_fidelity_gain(alpha: f64, r0: f64, r: f64) -> f64 {
    let dc = 2.0 * (0.5 * (r + r0)).sinh() * (0.5 * (r - r0)).sinh() / r0.cosh();
    let dt = (r - r0).sinh() / (r.cosh() * r0.cosh());
    -3.0 * dc.ln_1p() - alpha * alpha * dt
}

/// Maximizes the closed-form fidelity over `r in [-5, 5]`: a 0.01 scan to
/// bracket, then golden-section refinement to a 1e-9 bracket.
pub fn optimal_r_numeric(alpha: f64) -> OptimalSqueezing {
    if !(alpha > 0.0) {
        return OptimalSqueezing { r: 0.0, fidelity: 1.0, stationary_residual: 0.0 };
    }
    let objective = |r: f64| cat_fidelity_closed(alpha, r).unwrap_or(f64::NEG_INFINITY);
    let step = 0.01;
    let (r0, _) = scan_max(objective, -5.0, 5.0, step);
    let lo = (r0 - step).max(-5.0);
    let hi = (r0 + step).min(5.0);
    let (r, _) = golden_section_max(|r| log_fidelity_gain(alpha, r0, r), lo, hi, 1e-9);
    OptimalSqueezing {
        r,
        fidelity: objective(r),
        stationary_residual: stationary_residual(alpha, r),
    }
}

/// Comparison of the printed optimal-squeezing formula against the true
/// maximizer at one cat size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqueezingDiscrepancy {
    pub alpha: f64,
    pub r_printed: f64,
    pub fidelity_printed: f64,
    /// `d F / d r` at the printed value (with the odd-cat sign).
    pub slope_printed: f64,
    pub r_numeric: f64,
    pub fidelity_numeric: f64,
    pub residual_numeric: f64,
}

pub fn squeezing_discrepancy(alpha: f64) -> Result<SqueezingDiscrepancy> {
    let r_printed = arccosh_squeezing(alpha);
    let best = optimal_r_numeric(alpha);
    Ok(SqueezingDiscrepancy {
        alpha,
        r_printed,
        fidelity_printed: cat_fidelity_closed(alpha, -r_printed)?,
        slope_printed: cat_fidelity_slope(alpha, -r_printed)?,
        r_numeric: best.r,
        fidelity_numeric: best.fidelity,
        residual_numeric: best.stationary_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    /// Negative root of the stationary quadratic in `tanh r`.
    fn stationary_root(alpha: f64) -> f64 {
        let a2 = alpha * alpha;
        ((3.0 - (9.0 + 4.0 * a2 * a2).sqrt()) / (2.0 * a2)).atanh()
    }

    #[test]
    fn small_cats_look_like_number_states() {
        let odd = cat_state(CatSpec::odd(0.01), 24).unwrap();
        let even = cat_state(CatSpec::even(0.01), 24).unwrap();
        assert!(fock::fidelity(&FockVector::number_state(1, 24).unwrap(), &odd).unwrap() >= 0.9999);
        assert!(fock::fidelity(&FockVector::number_state(0, 24).unwrap(), &even).unwrap() >= 0.9999);
    }

    #[test]
    fn odd_cat_single_photon_amplitude() {
        let odd = cat_state(CatSpec::odd(1.0), 30).unwrap();
        let expected = 2.0 * (-0.5f64).exp() / (2.0 - 2.0 * (-2.0f64).exp()).sqrt();
        assert_abs_diff_eq!(odd.amplitudes()[1].re, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(odd.amplitudes()[1].re, 0.92239, epsilon = 1e-4);
        assert!(odd.amplitudes().iter().step_by(2).all(|a| a.norm() == 0.0));
    }

    #[test]
    fn cat_matches_coherent_difference() {
        for alpha in [0.3, 1.0, 2.0] {
            let dim = fock::cutoff_for_amplitude(alpha);
            let p = fock::coherent_state(C64::new(alpha, 0.0), dim).unwrap();
            let m = fock::coherent_state(C64::new(-alpha, 0.0), dim).unwrap();
            let diff = p.combine(C64::new(1.0, 0.0), &m, C64::new(-1.0, 0.0)).unwrap();
            assert_abs_diff_eq!(diff.norm_sqr(), CatSpec::odd(alpha).norm_sqr(), epsilon = 1e-12);
            let cat = cat_state(CatSpec::odd(alpha), dim).unwrap();
            assert!(fock::fidelity(&diff, &cat).unwrap() > 1.0 - 1e-13);
        }
    }

    #[test]
    fn qubit_state_cases() {
        let q = qubit_state(&QubitSpec::new(1.0, 0.0, 0.0), 24).unwrap();
        let a = fock::coherent_state(C64::new(1.0, 0.0), 24).unwrap();
        assert!(fock::fidelity(&a, &q).unwrap() > 1.0 - 1e-14);

        let q = qubit_state(&QubitSpec::new(1.0, FRAC_PI_4, PI), 24).unwrap();
        let cat = cat_state(CatSpec::odd(1.0), 24).unwrap();
        assert!(fock::fidelity(&cat, &q).unwrap() > 1.0 - 1e-13);
        assert!(q.amplitudes().iter().step_by(2).all(|a| a.norm() < 1e-15));

        let spec = QubitSpec::new(1.0, FRAC_PI_4, 0.0);
        assert_abs_diff_eq!(spec.norm_sqr(), 1.0 + (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(spec.norm_sqr(), 1.13534, epsilon = 1e-5);
    }

    #[test]
    fn degenerate_qubit_is_rejected() {
        let spec = QubitSpec::new(1e-7, FRAC_PI_4, PI);
        assert!(matches!(qubit_state(&spec, 24), Err(Error::DegenerateNormalization { .. })));
    }

    #[test]
    fn closed_fidelity_values() {
        assert!(cat_fidelity_closed(0.01, 0.0).unwrap() >= 0.9999);
        assert_abs_diff_eq!(cat_fidelity_closed(1.0, -0.31258).unwrap(), 0.997, epsilon = 1e-3);
        assert!(cat_fidelity_closed(0.0, 0.1).is_err());
        assert!(cat_fidelity_closed(-1.0, 0.1).is_err());
    }

    #[test]
    fn closed_fidelity_matches_truncated_overlap() {
        for &(alpha, r) in &[(0.5, -0.1), (1.0, -0.31), (1.0, 0.4), (1.5, -0.6), (2.0, -0.85)] {
            let dim = fock::cutoff_for_squeezing(r, alpha);
            let cat = cat_state(CatSpec::odd(alpha), dim).unwrap();
            let sq = fock::squeezed_photon(r, dim).unwrap();
            let brute = fock::fidelity(&cat, &sq).unwrap();
            assert_abs_diff_eq!(brute, cat_fidelity_closed(alpha, r).unwrap(), epsilon = 1e-8);
        }
    }

    #[test]
    fn printed_formula_values() {
        assert_eq!(arccosh_squeezing(0.0), 0.0);
        assert_abs_diff_eq!(arccosh_squeezing(1.0), 0.31258, epsilon = 1e-5);
        assert_abs_diff_eq!(arccosh_squeezing(2.0), (4.0f64 / 3.0).sqrt().acosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(arccosh_squeezing(2.0), 0.54931, epsilon = 1e-5);
    }

    #[test]
    fn numeric_optimum_matches_stationary_root() {
        for alpha in [0.1, 0.5, 1.0, 2f64.sqrt(), 2.0, 3.0] {
            let best = optimal_r_numeric(alpha);
            assert_abs_diff_eq!(best.r, stationary_root(alpha), epsilon = 1e-8);
            assert!(best.stationary_residual.abs() < 1e-8);
            assert!(best.r <= 0.0);
        }
        let best = optimal_r_numeric(1.0);
        assert_abs_diff_eq!(best.r.abs(), 0.31258, epsilon = 1e-5);
        assert_abs_diff_eq!(best.fidelity, 0.997, epsilon = 1e-3);
        let best = optimal_r_numeric(2f64.sqrt());
        assert_abs_diff_eq!(best.r.tanh(), -0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(best.fidelity, 0.9736, epsilon = 1e-4);
        assert!(optimal_r_numeric(1e-3).fidelity > 0.99999);
    }

    #[test]
    fn numeric_optimum_beats_fine_grid() {
        for alpha in [0.5, 1.0, 2.0] {
            let best = optimal_r_numeric(alpha);
            for i in 0..=10_000 {
                let r = -5.0 + 1e-3 * i as f64;
                assert!(cat_fidelity_closed(alpha, r).unwrap() <= best.fidelity + 1e-15);
            }
        }
    }

    #[test]
    fn maximum_fidelity_decreases_with_size() {
        let f: Vec<f64> = (1..=20).map(|i| optimal_r_numeric(0.1 * i as f64).fidelity).collect();
        assert!(f.windows(2).all(|w| w[1] < w[0]));
        let tail: Vec<f64> = [2.0, 4.0, 8.0, 16.0].iter().map(|&a| optimal_r_numeric(a).fidelity).collect();
        assert!(tail.windows(2).all(|w| w[1] < w[0]) && tail[3] < 0.3);
    }

    #[test]
    fn printed_formula_is_not_stationary_at_two() {
        let d = squeezing_discrepancy(2.0).unwrap();
        assert!(d.slope_printed.abs() > 0.1);
        assert!(d.residual_numeric.abs() < 1e-8);
        assert_abs_diff_eq!(d.r_numeric.abs(), 0.8540, epsilon = 1e-3);
        // the two formulas agree at alpha = 1
        let d = squeezing_discrepancy(1.0).unwrap();
        assert_abs_diff_eq!(d.r_printed, -d.r_numeric, epsilon = 1e-8);
    }
}
