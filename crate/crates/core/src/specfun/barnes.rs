use super::gamma::{gamma_real, ln_gamma_pos, BERNOULLI_EVEN};
use crate::{Error, Result};
use num_traits::Float;
use std::f64::consts::PI;

/// `ζ'(-1)`.
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_93;

const ASYMPTOTIC_FROM: f64 = 20.0;

/// `log G(z+1)` for large positive `z`.
fn log_g_shifted_asymptotic(z: f64) -> f64 {
    let lz = z.ln();
    let mut s = z * z * (0.5 * lz - 0.75) + 0.5 * z * (2.0 * PI).ln() - lz / 12.0
        + ZETA_PRIME_MINUS_ONE;
    let inv2 = 1.0 / (z * z);
    let mut pow = inv2;
    for k in 1..=7usize {
        let b = BERNOULLI_EVEN[k];
        let kk = k as f64;
        s += b / (4.0 * kk * (kk + 1.0)) * pow;
        pow *= inv2;
    }
    s
}

/// `log G(z)` for real `z > 0`.
pub fn log_barnes_g(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("log_barnes_g needs z > 0, got {z}")));
    }
    // G(z+1) = Γ(z) G(z)
    let mut w = z;
    let mut shift = 0.0;
    while w - 1.0 < ASYMPTOTIC_FROM {
        shift += ln_gamma_pos(w);
        w += 1.0;
    }
    Ok(log_g_shifted_asymptotic(w - 1.0) - shift)
}

/// Barnes G-function for real arguments.
///
/// Positive arguments go through the asymptotic expansion of `log G` after
/// an upward shift; negative arguments use `G(z) = G(z+1)/Γ(z)`. At the
/// non-positive integers `G` vanishes and `0` is returned. Evaluation is
/// carried out in double precision whatever `F` is.
pub fn barnes_g<F: Float>(z: F) -> Result<F> {
    let x = z
        .to_f64()
        .ok_or_else(|| Error::domain("barnes_g argument not representable"))?;
    let v = barnes_g_f64(x)?;
    F::from(v).ok_or_else(|| Error::domain("barnes_g value not representable"))
}

fn barnes_g_f64(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("barnes_g of {x}")));
    }
    if x <= 0.0 && x == x.round() {
        return Ok(0.0);
    }
    if x > 0.0 {
        return Ok(log_barnes_g(x)?.exp());
    }
    let mut w = x;
    let mut denom = 1.0;
    while w <= 0.0 {
        denom *= gamma_real(w)?;
        w += 1.0;
    }
    Ok(log_barnes_g(w)?.exp() / denom)
}
