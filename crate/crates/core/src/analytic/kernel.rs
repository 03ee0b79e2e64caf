use crate::specfun::{
    is_nonpositive_integer, jacobi_leading_coefficient, jacobi_normalization, jacobi_p,
    jacobi_p_deriv, log_gamma, JacobiOrder,
};
use crate::{Complex, Error, Result};
use nalgebra::DMatrix;
use std::f64::consts::LN_2;

fn order(n: usize, r: Complex) -> JacobiOrder<Complex> {
    JacobiOrder::new(n as u32, r - 0.5, Complex::new(-0.5, 0.0))
}

/// `P(N, r, θ) = P_N'(x) P_{N-1}(x) - P_N(x) P_{N-1}'(x)` at `x = cos θ`,
/// with Jacobi parameters `(r - 1/2, -1/2)`.
pub fn wronskian_p(n: usize, r: Complex, theta: f64) -> Complex {
    let x = Complex::new(theta.cos(), 0.0);
    let (hi, lo) = (order(n, r), order(n - 1, r));
    jacobi_p_deriv(&hi, x) * jacobi_p(&lo, x) - jacobi_p(&hi, x) * jacobi_p_deriv(&lo, x)
}

fn check_interior(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::domain(format!("θ = {theta} must lie in (0, π)")));
    }
    Ok(())
}

/// Diagonal of the Christoffel–Darboux kernel of the Jacobi ensemble with
/// weight `(1-cos θ)^r` on `[0, π]`:
/// `(1-cos θ)^r 2^{1-r}/(2N+r-1) Γ(N+1)Γ(N+r)/(Γ(N+r-1/2)Γ(N-1/2)) P(N,r,θ)`.
pub fn cd_kernel_diag(n: usize, r: Complex, theta: f64) -> Result<Complex> {
    check_interior(theta)?;
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    let nn = n as f64;
    let den = r + 2.0 * nn - 1.0;
    if den.norm() == 0.0 || is_nonpositive_integer(r + nn - 0.5) {
        return Err(Error::pole("cd_kernel_diag", r));
    }
    let l = r * (1.0 - theta.cos()).ln() + (1.0 - r) * LN_2 + log_gamma(Complex::new(nn + 1.0, 0.0))?
        + log_gamma(r + nn)?
        - log_gamma(r + nn - 0.5)?
        - log_gamma(Complex::new(nn - 0.5, 0.0))?;
    Ok(l.exp() / den * wronskian_p(n, r, theta))
}

/// The same diagonal as [`cd_kernel_diag`], summed directly:
/// `(1-cos θ)^r Σ_{n<N} P_n(cos θ)^2 / h_n`.
pub fn kernel_diag_direct(n: usize, r: Complex, theta: f64) -> Result<Complex> {
    kernel_direct(n, r, theta, theta)
}

/// Off-diagonal kernel by direct summation over the orthonormal basis.
pub fn kernel_direct(n: usize, r: Complex, t1: f64, t2: f64) -> Result<Complex> {
    let (x, y) = (Complex::new(t1.cos(), 0.0), Complex::new(t2.cos(), 0.0));
    let mut acc = Complex::new(0.0, 0.0);
    for k in 0..n {
        let o = order(k, r);
        let h = jacobi_normalization(&o)?.h;
        acc += jacobi_p(&o, x) * jacobi_p(&o, y) / h;
    }
    let w = ((1.0 - t1.cos()).ln() * r * 0.5 + (1.0 - t2.cos()).ln() * r * 0.5).exp();
    Ok(acc * w)
}

/// Christoffel–Darboux kernel `f_N(θ_1, θ_2)` for real `r > -1/2`.
pub fn cd_kernel(n: usize, r: f64, t1: f64, t2: f64) -> Result<f64> {
    check_interior(t1)?;
    check_interior(t2)?;
    let rc = Complex::new(r, 0.0);
    let (x, y) = (t1.cos(), t2.cos());
    if x == y {
        return Ok(cd_kernel_diag(n, rc, t1)?.re);
    }
    let (hi, lo) = (order(n, rc), order(n - 1, rc));
    let (cx, cy) = (Complex::new(x, 0.0), Complex::new(y, 0.0));
    let num = jacobi_p(&hi, cx) * jacobi_p(&lo, cy) - jacobi_p(&lo, cx) * jacobi_p(&hi, cy);
    let pre = jacobi_leading_coefficient(&lo)
        / (jacobi_leading_coefficient(&hi) * jacobi_normalization(&lo)?.h);
    let w = ((1.0 - x) * (1.0 - y)).powf(0.5 * r);
    Ok((pre * num).re / (x - y) * w)
}

/// `n`-level correlation function of the Jacobi ensemble, as the determinant
/// of the kernel matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NLevelDensity {
    pub value: f64,
    /// Set when two of the points coincide; `value` is then `0`.
    pub degenerate: bool,
}

/// `det[f_N(θ_j, θ_k)]_{j,k ≤ n}` for `n ≤ N` points.
pub fn n_level_density(n_pairs: usize, r: f64, thetas: &[f64]) -> Result<NLevelDensity> {
    let m = thetas.len();
    if m == 0 || m > n_pairs {
        return Err(Error::domain(format!(
            "need 1 ≤ n ≤ N points, got {m} for N = {n_pairs}"
        )));
    }
    if r <= -0.5 {
        return Err(Error::domain(format!("n_level_density needs r > -1/2, got {r}")));
    }
    for (i, a) in thetas.iter().enumerate() {
        check_interior(*a)?;
        if thetas[..i].iter().any(|b| b.cos() == a.cos()) {
            return Ok(NLevelDensity {
                value: 0.0,
                degenerate: true,
            });
        }
    }
    let mut k = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            k[(i, j)] = cd_kernel(n_pairs, r, thetas[i], thetas[j])?;
        }
    }
    Ok(NLevelDensity {
        value: k.determinant(),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{c_so2n, r1_so2n_unscaled};
    use crate::quad::{gauss_legendre, integrate_real, Tolerance};
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex {
        Complex::new(x, 0.0)
    }

    #[test]
    fn r_zero_is_so2n_density() {
        for n in 1..=4 {
            for t in [0.1, 0.8, 1.9, 3.0] {
                let k = cd_kernel_diag(n, c(0.0), t).unwrap();
                assert!((k.re - r1_so2n_unscaled(n, t)).abs() < 1e-12, "N={n} θ={t}");
                assert!(k.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degree_one_by_hand() {
        // f_1 = (1 - cos θ) P_0^2 / h_0, h_0 = π for (α, β) = (1/2, -1/2)
        for t in [0.3, 1.0, 2.5] {
            let k = cd_kernel_diag(1, c(1.0), t).unwrap();
            assert!((k.re - (1.0 - t.cos()) / PI).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_routes_agree() {
        for n in 1..=5 {
            for r in [c(0.5), c(1.3), Complex::new(0.7, 0.4)] {
                for t in [0.2, 1.4, 2.9] {
                    let a = cd_kernel_diag(n, r, t).unwrap();
                    let b = kernel_diag_direct(n, r, t).unwrap();
                    assert!((a - b).norm() < 1e-11 * b.norm().max(1.0), "N={n} r={r} θ={t}");
                }
            }
        }
    }

    #[test]
    fn kernel_integrates_to_n() {
        let v = integrate_real(
            |t| Ok(cd_kernel_diag(2, c(0.5), t)?.re),
            1e-300,
            PI - 1e-15,
            Tolerance::default(),
        )
        .unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn off_diagonal_routes_agree() {
        for (t1, t2) in [(0.3, 1.1), (2.0, 2.9), (1.0, 1.0 + 1e-3)] {
            let a = cd_kernel(3, 0.7, t1, t2).unwrap();
            let b = kernel_direct(3, c(0.7), t1, t2).unwrap().re;
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn two_level_density_for_so4_and_so6() {
        let (t1, t2) = (0.7, 2.2);
        let d = n_level_density(2, 0.0, &[t1, t2]).unwrap();
        let want = 2.0 * c_so2n(2).unwrap() * (t1.cos() - t2.cos()).powi(2);
        assert!((d.value - want).abs() < 1e-12);

        let rule = gauss_legendre(40);
        let cs = c_so2n(3).unwrap();
        let q: f64 = rule
            .mapped(0.0, PI)
            .map(|(t, w)| {
                let (a, b, cc) = (t1.cos(), t2.cos(), t.cos());
                w * ((a - b) * (a - cc) * (b - cc)).powi(2)
            })
            .sum();
        let want = 6.0 * cs * q;
        let d = n_level_density(3, 0.0, &[t1, t2]).unwrap();
        assert!((d.value - want).abs() < 1e-5 * want, "{} vs {want}", d.value);
    }

    #[test]
    fn n_level_edge_cases() {
        let one = n_level_density(3, 0.5, &[1.2]).unwrap();
        assert!((one.value - cd_kernel_diag(3, c(0.5), 1.2).unwrap().re).abs() < 1e-14);
        let same = n_level_density(3, 0.5, &[1.2, 1.2]).unwrap();
        assert!(same.degenerate && same.value == 0.0);
        let near = n_level_density(3, 0.5, &[1.2, 1.2 + 1e-6]).unwrap();
        assert!(near.value.abs() < 1e-9);
        assert!(n_level_density(2, 0.0, &[0.1, 0.2, 0.3]).is_err());
        assert!(cd_kernel_diag(2, c(0.0), 0.0).is_err());
    }
}
