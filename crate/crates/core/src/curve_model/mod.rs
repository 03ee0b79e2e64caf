//! Calibration of the excised model against quadratic twists of an
//! elliptic curve: matrix sizes, cutoff constants, the arithmetic factor
//! `a_s(E)`, and point counts over `F_p`.

mod arithmetic;
mod params;

pub use arithmetic::{
    a_s_truncated, ap_table, count_points_fp, count_points_naive, lambda_p, local_factor,
    log_euler_factor, EulerProduct,
};
pub use params::{CurveFamilyParams, Weierstrass, E11_CONFIG};

use crate::specfun::barnes_g;
use crate::{Result, ARTIFACT_VERSION};
use serde::Serialize;
use std::f64::consts::PI;

/// `N_std = log(√M X / 2π)`.
pub fn n_std(conductor: f64, x: f64) -> f64 {
    (conductor.sqrt() * x / (2.0 * PI)).ln()
}

/// `N_eff = N_std / (2 r₁)`.
pub fn n_eff(n_std_value: f64, r1: f64) -> f64 {
    n_std_value / (2.0 * r1)
}

/// `c_std = a_{-1/2}^{-2} δ κ_E`.
pub fn cutoff_std(p: &CurveFamilyParams) -> f64 {
    p.delta * p.kappa_e / (p.a_minus_half * p.a_minus_half)
}

/// `c_eff = a_{-1/2}^{-2} (2r₁)^{-3/4} δ κ_E`.
pub fn cutoff_eff(p: &CurveFamilyParams) -> f64 {
    cutoff_std(p) * (2.0 * p.r1).powf(-0.75)
}

/// Cutoff constants obtained by matching probabilities rather than
/// densities, `(a² δ κ_E, (2r₁)^{3/4} a² δ κ_E)`. Kept for comparison only.
pub fn probability_matched_cutoffs(p: &CurveFamilyParams) -> (f64, f64) {
    let c = p.a_minus_half * p.a_minus_half * p.delta * p.kappa_e;
    (c, (2.0 * p.r1).powf(0.75) * c)
}

/// `(8/3) 2^{-7/8} G(1/2) π^{-1/4}`; the normalized vanishing count is
/// this times `δ^{1/2}`.
pub fn vanishing_constant_factor() -> Result<f64> {
    Ok(8.0 / 3.0 * 2f64.powf(-0.875) * barnes_g(0.5)? * PI.powf(-0.25))
}

/// `δ` from the observed plateau of the normalized vanishing count.
pub fn delta_from_vanishing_constant(observed: f64) -> Result<f64> {
    Ok((observed / vanishing_constant_factor()?).powi(2))
}

/// Inverse of [`delta_from_vanishing_constant`].
pub fn vanishing_constant_from_delta(delta: f64) -> Result<f64> {
    Ok(vanishing_constant_factor()? * delta.sqrt())
}

/// Predicted number of vanishing twists with prime discriminant `d ≤ X`:
/// `(1/(4 log X)) · 2 a √κ_E 2^{-7/8} G(1/2) π^{-1/4} (log X)^{3/8} δ^{1/2} (4/3) X^{3/4}`.
pub fn expected_vanishing_count(x: f64, p: &CurveFamilyParams) -> Result<f64> {
    let l = x.ln();
    Ok(1.0 / (4.0 * l)
        * 2.0
        * p.a_minus_half
        * p.kappa_e.sqrt()
        * 2f64.powf(-0.875)
        * barnes_g(0.5)?
        * PI.powf(-0.25)
        * l.powf(0.375)
        * p.delta.sqrt()
        * (4.0 / 3.0)
        * x.powf(0.75))
}

/// Cutoffs for the random matrix model at discriminant bound `X`.
///
/// The absolute cutoffs use the integer matrix size `n_matrix =
/// round(N_std)` that is actually simulated; the `_unrounded` fields use
/// `N_std` itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffReport {
    pub x_bound: f64,
    pub n_std: f64,
    pub n_eff: f64,
    pub n_matrix: u32,
    pub c_std: f64,
    pub c_eff: f64,
    pub delta_kappa: f64,
    pub abs_cutoff_std: f64,
    pub abs_cutoff_eff: f64,
    pub abs_cutoff_std_unrounded: f64,
    pub abs_cutoff_eff_unrounded: f64,
}

impl CutoffReport {
    pub fn new(p: &CurveFamilyParams, x: f64) -> Self {
        let ns = n_std(p.conductor as f64, x);
        let n_matrix = ns.round().max(1.0) as u32;
        let (cs, ce) = (cutoff_std(p), cutoff_eff(p));
        let e_int = (-(n_matrix as f64) / 2.0).exp();
        let e_cont = (-ns / 2.0).exp();
        Self {
            x_bound: x,
            n_std: ns,
            n_eff: n_eff(ns, p.r1),
            n_matrix,
            c_std: cs,
            c_eff: ce,
            delta_kappa: p.delta * p.kappa_e,
            abs_cutoff_std: cs * e_int,
            abs_cutoff_eff: ce * e_int,
            abs_cutoff_std_unrounded: cs * e_cont,
            abs_cutoff_eff_unrounded: ce * e_cont,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain struct");
        v["version"] = ARTIFACT_VERSION.into();
        v
    }
}
