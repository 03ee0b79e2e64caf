use crate::specfun::{barnes_g, is_nonpositive_integer, ln_gamma_pos, log_gamma};
use crate::{Complex, Error, Result};
use std::f64::consts::{LN_2, PI};

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("number of eigenphase pairs must be at least 1"));
    }
    Ok(())
}

/// `sin((2N-1)θ)/sin θ` written as `1 + 2 Σ_{k<N} cos 2kθ`, which is
/// regular at `θ = 0` and `θ = π`.
fn dirichlet(n: usize, theta: f64) -> f64 {
    1.0 + 2.0 * (1..n).map(|k| (2.0 * k as f64 * theta).cos()).sum::<f64>()
}

/// One-level density of `SO(2N)` eigenphases on `[0, π]`:
/// `(2N-1)/(2π) + sin((2N-1)θ)/(2π sin θ)`.
pub fn r1_so2n_unscaled(n: usize, theta: f64) -> f64 {
    ((2 * n - 1) as f64 + dirichlet(n, theta)) / (2.0 * PI)
}

/// `∫_0^θ r1_so2n_unscaled(N, φ) dφ`; equals `N` at `θ = π`.
pub fn r1_so2n_cumulative(n: usize, theta: f64) -> f64 {
    let osc: f64 = (1..n)
        .map(|k| (2.0 * k as f64 * theta).sin() / k as f64)
        .sum();
    (2.0 * n as f64 * theta + osc) / (2.0 * PI)
}

/// Large-`N` expansion of the one-level density in the variable
/// `y = Nθ/π` (mean spacing one), truncated after the `N^{-order}` term.
pub fn r1_so2n_scaled_expansion(n: usize, y: f64, order: u32) -> Result<f64> {
    if order > 2 {
        return Err(Error::domain(format!("expansion order {order} > 2")));
    }
    if y < 0.0 {
        return Err(Error::domain("scaled variable must be non-negative"));
    }
    let nn = n as f64;
    let t = 2.0 * PI * y;
    let sinc = if y == 0.0 { 1.0 } else { t.sin() / t };
    let mut v = 1.0 + sinc;
    if order >= 1 {
        v -= (1.0 + t.cos()) / (2.0 * nn);
    }
    if order >= 2 {
        v -= PI * y * t.sin() / (6.0 * nn * nn);
    }
    Ok(v)
}

/// `∫_{[0,π]^N} Π(1-cos θ_j)^r (1+cos θ_j)^s Π_{j<k}(cos θ_j - cos θ_k)^2 dθ`.
pub fn selberg_integral(n: usize, r: Complex, s: Complex) -> Result<Complex> {
    check_n(n)?;
    if r.re <= -0.5 || s.re <= -0.5 {
        return Err(Error::domain(format!(
            "selberg_integral needs Re r, Re s > -1/2, got r = {r}, s = {s}"
        )));
    }
    let nn = n as f64;
    let mut l = (r + s + nn - 1.0) * (nn * LN_2);
    for j in 0..n {
        let j = j as f64;
        l += ln_gamma_pos(2.0 + j) + log_gamma(s + 0.5 + j)? + log_gamma(r + 0.5 + j)?
            - log_gamma(r + s + nn + j)?;
    }
    Ok(l.exp())
}

/// Normalization constant of the `SO(2N)` eigenphase density on `[0, π]^N`.
pub fn c_so2n(n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(log_c_so2n(n).exp())
}

pub(crate) fn log_c_so2n(n: usize) -> f64 {
    let nn = n as f64;
    let mut l = -nn * (nn - 1.0) * LN_2;
    for j in 0..n {
        let j = j as f64;
        l += ln_gamma_pos(nn + j) - ln_gamma_pos(2.0 + j) - 2.0 * ln_gamma_pos(0.5 + j);
    }
    l
}

/// `M_O(N, s)` continued to all `s` off its poles at `s = -1/2, -3/2, ...`.
pub(crate) fn moments_continued(n: usize, s: Complex) -> Result<Complex> {
    let nn = n as f64;
    let mut l = s * (2.0 * nn * LN_2);
    for j in 1..=n {
        let j = j as f64;
        let den = s + j + nn - 1.0;
        if is_nonpositive_integer(den) {
            return Ok(Complex::new(0.0, 0.0));
        }
        l += ln_gamma_pos(nn + j - 1.0) + log_gamma(s + j - 0.5)?
            - ln_gamma_pos(j - 0.5)
            - log_gamma(den)?;
    }
    Ok(l.exp())
}

/// `M_O(N, s) = E[Λ_A(1, N)^s]` over Haar `SO(2N)`, for `Re s > -1/2`.
pub fn moments_so2n(n: usize, s: Complex) -> Result<Complex> {
    check_n(n)?;
    if s.re <= -0.5 {
        return Err(Error::domain(format!(
            "moments_so2n needs Re s > -1/2, got {s}"
        )));
    }
    moments_continued(n, s)
}

/// Residue of `M_O(N, s)` at `s = -1/2`.
pub fn h_exact(n: usize) -> Result<f64> {
    check_n(n)?;
    let nn = n as f64;
    let mut l = -nn * LN_2 - ln_gamma_pos(nn);
    for j in 1..=n {
        let j = j as f64;
        l += ln_gamma_pos(nn + j - 1.0) + ln_gamma_pos(j)
            - ln_gamma_pos(j - 0.5)
            - ln_gamma_pos(j + nn - 1.5);
    }
    Ok(l.exp())
}

/// Large-`N` form `2^{-7/8} G(1/2) π^{-1/4} N^{3/8}` of [`h_exact`].
pub fn h_asymptotic(n: usize) -> Result<f64> {
    check_n(n)?;
    let g: f64 = barnes_g(0.5)?;
    Ok(2f64.powf(-7.0 / 8.0) * g * PI.powf(-0.25) * (n as f64).powf(0.375))
}

/// Leading small-`x` density of `Λ_A(1, N)`: `x^{-1/2} h(N)`.
pub fn value_density_small_x(n: usize, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("value density needs x > 0, got {x}")));
    }
    Ok(h_exact(n)? / x.sqrt())
}

/// Leading small-`x` form of `P(Λ_A(1, N) ≤ x)`: `2 √x h(N)`.
pub fn value_cdf_small_x(n: usize, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("value cdf needs x > 0, got {x}")));
    }
    Ok(2.0 * x.sqrt() * h_exact(n)?)
}
