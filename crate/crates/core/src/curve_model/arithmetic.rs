use super::params::Weierstrass;
use crate::{Error, Result};
use rayon::prelude::*;

fn check_prime(p: u64) -> Result<()> {
    if !primal::is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(())
}

fn modp(v: i128, p: u64) -> u64 {
    v.rem_euclid(p as i128) as u64
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

/// `a_p = p + 1 - #E(F_p)`, counting every affine solution plus the point
/// at infinity. For bad `p` this includes the singular point, which gives
/// the right `a_p` for multiplicative reduction.
///
/// For `p ≥ 5` each `x` contributes the number of square roots of the
/// discriminant of the quadratic in `y`; `p = 2, 3` enumerate all pairs.
pub fn count_points_fp(w: &Weierstrass, p: u64) -> Result<i64> {
    check_prime(p)?;
    if p <= 3 {
        return count_points_naive(w, p);
    }
    let mut roots = vec![0u8; p as usize];
    let (mut sq, mut step) = (0u64, 1u64);
    for _ in 0..p {
        roots[sq as usize] += 1;
        // (y+1)² = y² + (2y + 1)
        sq = add_mod(sq, step, p);
        step = add_mod(step, 2, p);
    }
    let [a1, a2, a3, a4, a6] = [w.c1, w.c2, w.c3, w.c4, w.c6].map(i128::from);
    // D(x) = (a1 x + a3)² + 4(x³ + a2 x² + a4 x + a6) is a cubic in x;
    // walk it with forward differences
    let d = |x: i128| modp((a1 * x + a3).pow(2) + 4 * (x * x * x + a2 * x * x + a4 * x + a6), p);
    let (d0, d1, d2, d3) = (d(0), d(1), d(2), d(3));
    let mut v = d0;
    let mut f1 = sub_mod(d1, d0, p);
    let mut f2 = sub_mod(sub_mod(d2, d1, p), f1, p);
    let f3 = sub_mod(sub_mod(sub_mod(d3, d2, p), sub_mod(d2, d1, p), p), f2, p);
    let mut affine = 0u64;
    for _ in 0..p {
        affine += roots[v as usize] as u64;
        v = add_mod(v, f1, p);
        f1 = add_mod(f1, f2, p);
        f2 = add_mod(f2, f3, p);
    }
    Ok(p as i64 - affine as i64)
}

/// Same count by testing every `(x, y) ∈ F_p²`.
pub fn count_points_naive(w: &Weierstrass, p: u64) -> Result<i64> {
    check_prime(p)?;
    let pi = p as i128;
    let mut affine = 0i64;
    for x in 0..pi {
        for y in 0..pi {
            let lhs = y * y + w.c1 as i128 * x * y + w.c3 as i128 * y;
            let rhs = x * x * x + w.c2 as i128 * x * x + w.c4 as i128 * x + w.c6 as i128;
            if (lhs - rhs).rem_euclid(pi) == 0 {
                affine += 1;
            }
        }
    }
    Ok(p as i64 - affine)
}

/// `λ(p) = a_p / √p`.
pub fn lambda_p(w: &Weierstrass, p: u64) -> Result<f64> {
    Ok(count_points_fp(w, p)? as f64 / (p as f64).sqrt())
}

/// `(a_p)` for all primes `p ≤ p_max`, in parallel.
pub fn ap_table(w: &Weierstrass, p_max: u64) -> Result<Vec<(u64, i64)>> {
    let primes: Vec<u64> = primal::Primes::all()
        .take_while(|&p| p as u64 <= p_max)
        .map(|p| p as u64)
        .collect();
    primes
        .into_par_iter()
        .map(|p| Ok((p, count_points_fp(w, p)?)))
        .collect()
}

/// Local factor `(1 - λ z + ψ z²)^{-1}`.
pub fn local_factor(lambda_p: f64, psi_p: f64, z: f64) -> Result<f64> {
    let d = 1.0 - lambda_p * z + psi_p * z * z;
    if d == 0.0 {
        return Err(Error::domain(format!(
            "local factor has a pole at z = {z} (λ = {lambda_p}, ψ = {psi_p})"
        )));
    }
    Ok(1.0 / d)
}

/// Truncated Euler product with convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EulerProduct {
    pub value: f64,
    pub p_max: u64,
    /// Number of primes in the product (the conductor always counts).
    pub primes: usize,
    /// `Π(p_max) - Π(p_max/2)`.
    pub last_doubling: f64,
    /// `Π(p_max) - Π(p_max/10)`.
    pub last_decade: f64,
}

/// Log of the per-prime factor of `a_s(E)`.
///
/// For `p ∤ M` the factor is
/// `(1-1/p)^{s(s-1)/2} · (1 + p·½[𝓛_p(p^{-1/2})^s + 𝓛_p(-p^{-1/2})^s])/(p+1)`,
/// and for `p = M` it is `(1-1/M)^{s(s-1)/2} · 𝓛_M(ω/√M)^s` with `ψ = 0`.
pub fn log_euler_factor(p: u64, a_p: i64, conductor: u64, omega: i8, s: f64) -> Result<f64> {
    let pf = p as f64;
    let root = pf.sqrt();
    let lambda = a_p as f64 / root;
    let lead = 0.5 * s * (s - 1.0) * (-1.0 / pf).ln_1p();
    if p == conductor {
        let l = local_factor(lambda, 0.0, omega as f64 / root)?;
        if l <= 0.0 {
            return Err(Error::domain(format!("𝓛_M = {l} has no real power")));
        }
        return Ok(lead + s * l.ln());
    }
    let plus = local_factor(lambda, 1.0, 1.0 / root)?;
    let minus = local_factor(lambda, 1.0, -1.0 / root)?;
    let mid = (1.0 + pf * 0.5 * (plus.powf(s) + minus.powf(s))) / (pf + 1.0);
    Ok(lead + mid.ln())
}

/// `a_s(E)` truncated to primes `p ≤ p_max`, the conductor always included.
///
/// The three displayed products are merged prime by prime; separately the
/// first one tends to `0` at `s = -1/2`.
pub fn a_s_truncated(
    w: &Weierstrass,
    conductor: u64,
    omega: i8,
    s: f64,
    p_max: u64,
) -> Result<EulerProduct> {
    if p_max < 2 {
        return Err(Error::domain("p_max must be at least 2"));
    }
    let mut table = ap_table(w, p_max)?;
    if conductor > p_max {
        table.push((conductor, count_points_fp(w, conductor)?));
    }
    let logs: Vec<(u64, f64)> = table
        .par_iter()
        .map(|&(p, a)| Ok((p, log_euler_factor(p, a, conductor, omega, s)?)))
        .collect::<Result<_>>()?;
    let partial = |bound: u64| -> f64 {
        logs.iter()
            .filter(|(p, _)| *p <= bound || *p == conductor)
            .map(|(_, l)| l)
            .sum::<f64>()
            .exp()
    };
    let value = partial(p_max);
    Ok(EulerProduct {
        value,
        p_max,
        primes: logs.len(),
        last_doubling: value - partial(p_max / 2),
        last_decade: value - partial(p_max / 10),
    })
}
