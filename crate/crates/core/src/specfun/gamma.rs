use crate::{Complex, Error, Result};
use std::f64::consts::{LN_2, PI};

/// `B_2, B_4, ..., B_18`.
pub(crate) const BERNOULLI_EVEN: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_SHIFT: f64 = 12.0;

pub(crate) fn is_nonpositive_integer(z: Complex) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal branch of `log Γ(z)`.
///
/// The branch is the analytic continuation from the positive real axis with
/// a cut along the negative real axis, so the imaginary part is continuous
/// off the cut and is not reduced modulo `2π`.
pub fn log_gamma(z: Complex) -> Result<Complex> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!("log_gamma of non-finite {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::pole("log_gamma", z));
    }
    if z.re < 0.5 {
        return reflected(z);
    }
    let mut w = z;
    let mut shift = Complex::new(0.0, 0.0);
    while w.re < STIRLING_SHIFT {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

/// `log π - log sin(πz) - log Γ(1-z)` for `Re z < 1/2`, with `log sin`
/// continued so the result stays on the principal branch.
fn reflected(z: Complex) -> Result<Complex> {
    let x = z.re;
    if z.im == 0.0 {
        let sin = (PI * (x - x.round())).sin().abs();
        let lg = log_gamma(Complex::new(1.0 - x, 0.0))?.re;
        let im = if x < 0.0 { -PI * (-x).ceil() } else { 0.0 };
        return Ok(Complex::new(PI.ln() - sin.ln() - lg, im));
    }
    if z.im < 0.0 {
        return Ok(reflected(z.conj())?.conj());
    }
    // sin πz = (i/2) e^{-iπz} (1 - e^{2iπz}), and |e^{2iπz}| < 1 here
    let e = Complex::from_polar((-2.0 * PI * z.im).exp(), 2.0 * PI * (x - x.round()));
    let log_sin = Complex::new(-LN_2, 0.5 * PI)
        + Complex::new(PI * z.im, -PI * x)
        + (Complex::new(1.0, 0.0) - e).ln();
    Ok(Complex::new(PI.ln(), 0.0) - log_sin - log_gamma(Complex::new(1.0, 0.0) - z)?)
}

fn stirling(z: Complex) -> Complex {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut series = Complex::new(0.0, 0.0);
    for (k, b) in BERNOULLI_EVEN[..8].iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += pow * (b / (two_k * (two_k - 1.0)));
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series
}

/// `Γ(z)`; errors at the poles.
pub fn gamma(z: Complex) -> Result<Complex> {
    if z.im == 0.0 && z.re > 0.0 && z.re == z.re.round() && z.re <= 171.0 {
        let mut f = 1.0;
        for k in 2..(z.re as u32) {
            f *= k as f64;
        }
        return Ok(Complex::new(f, 0.0));
    }
    Ok(log_gamma(z)?.exp())
}

/// `1/Γ(z)`, entire; exactly zero at the non-positive integers.
pub fn rgamma(z: Complex) -> Complex {
    if is_nonpositive_integer(z) {
        return Complex::new(0.0, 0.0);
    }
    match log_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex::new(f64::NAN, f64::NAN),
    }
}

/// `log Γ(x)` for real `x > 0`.
pub fn ln_gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    log_gamma(Complex::new(x, 0.0)).map(|v| v.re).unwrap_or(f64::NAN)
}

/// `Γ(x)` for real non-pole `x`, with sign.
pub fn gamma_real(x: f64) -> Result<f64> {
    if x > 0.0 {
        return Ok(gamma(Complex::new(x, 0.0))?.re);
    }
    // reflection keeps the sign right on the negative axis
    let s = (PI * x).sin();
    if s == 0.0 {
        return Err(Error::pole("gamma", x));
    }
    Ok(PI / (s * gamma(Complex::new(1.0 - x, 0.0))?.re))
}
