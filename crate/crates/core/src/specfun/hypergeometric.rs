use super::gamma::log_gamma;
use crate::{Complex, Error, Result, Scalar};

/// Terminating Gauss series `₂F₁(a, b; c; z)` with `a = -m`, `m ≥ 0`.
///
/// Runs on any [`Scalar`], exact rationals included. Errors if `a > 0`
/// (the series would not terminate) or if a Pochhammer factor of `c`
/// vanishes before the series ends.
pub fn hyp2f1_terminating<S: Scalar>(a: i64, b: S, c: S, z: S) -> Result<S> {
    if a > 0 {
        return Err(Error::domain(format!(
            "hyp2f1_terminating needs a non-positive integer a, got {a}"
        )));
    }
    let m = -a;
    let mut term = S::one();
    let mut sum = S::one();
    for k in 0..m {
        let kk = S::from_i64(k);
        let ck = c.clone() + kk.clone();
        if ck.is_zero() {
            return Err(Error::pole("hyp2f1_terminating", format!("c = {:?}", c)));
        }
        term = term * S::from_i64(a + k) * (b.clone() + kk) / (ck * S::from_i64(k + 1))
            * z.clone();
        sum = sum + term.clone();
    }
    Ok(sum)
}

/// `binom(x, n) = x(x-1)...(x-n+1)/n!` for any scalar `x`.
pub fn generalized_binomial<S: Scalar>(x: S, n: u32) -> S {
    let mut acc = S::one();
    for k in 0..n as i64 {
        acc = acc * (x.clone() - S::from_i64(k)) / S::from_i64(k + 1);
    }
    acc
}

/// `binom(x, n)` through `Γ(x+1)/(Γ(n+1)Γ(x-n+1))`; errors when `x` is a
/// negative integer, where the gamma quotient is indeterminate.
pub fn generalized_binomial_gamma(x: Complex, n: u32) -> Result<Complex> {
    let nn = n as f64;
    let l = log_gamma(x + 1.0)? - log_gamma(Complex::new(nn + 1.0, 0.0))?;
    let rest = x - nn + 1.0;
    if super::gamma::is_nonpositive_integer(rest) {
        return Ok(Complex::new(0.0, 0.0));
    }
    Ok((l - log_gamma(rest)?).exp())
}
