use super::gamma::log_gamma;
use super::hypergeometric::{generalized_binomial, hyp2f1_terminating};
use crate::{Complex, Error, Result, Scalar};

/// Degree and parameters of a Jacobi polynomial `P_n^{(α,β)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiOrder<S> {
    pub n: u32,
    pub alpha: S,
    pub beta: S,
}

impl<S: Scalar> JacobiOrder<S> {
    pub fn new(n: u32, alpha: S, beta: S) -> Self {
        JacobiOrder { n, alpha, beta }
    }

    fn ab1(&self) -> S {
        S::from_i64(self.n as i64) + self.alpha.clone() + self.beta.clone() + S::one()
    }
}

/// `P_n^{(α,β)}(x)` from the explicit sum
/// `Σ_ℓ (n+α+β+1)_ℓ (α+ℓ+1)_{n-ℓ} / (ℓ!(n-ℓ)!) ((x-1)/2)^ℓ`.
///
/// Every coefficient is a polynomial in `α, β`, so this is valid for all
/// parameters, including those where `α+1` is a non-positive integer and the
/// hypergeometric form below has a removable singularity.
pub fn jacobi_p<S: Scalar>(order: &JacobiOrder<S>, x: S) -> S {
    let n = order.n as usize;
    // tail[ℓ] = (α+ℓ+1)_{n-ℓ} / (n-ℓ)!
    let mut tail = vec![S::one(); n + 1];
    for l in (0..n).rev() {
        let k = (n - l) as i64;
        tail[l] = tail[l + 1].clone() * (order.alpha.clone() + S::from_i64(l as i64 + 1))
            / S::from_i64(k);
    }
    let y = (x - S::one()) / S::from_i64(2);
    let ab1 = order.ab1();
    let mut head = S::one(); // (n+α+β+1)_ℓ / ℓ! * y^ℓ
    let mut sum = S::zero();
    for (l, t) in tail.iter().enumerate() {
        sum = sum + head.clone() * t.clone();
        let ll = S::from_i64(l as i64);
        head = head * (ab1.clone() + ll) / S::from_i64(l as i64 + 1) * y.clone();
    }
    sum
}

/// `binom(n+α, n) ₂F₁(-n, n+α+β+1; α+1; (1-x)/2)`.
pub fn jacobi_p_hypergeometric<S: Scalar>(order: &JacobiOrder<S>, x: S) -> Result<S> {
    let n = order.n as i64;
    let pre = generalized_binomial(S::from_i64(n) + order.alpha.clone(), order.n);
    let z = (S::one() - x) / S::from_i64(2);
    let f = hyp2f1_terminating(-n, order.ab1(), order.alpha.clone() + S::one(), z)?;
    Ok(pre * f)
}

/// `P_n^{(α,β)}(x)` by the three-term recurrence in `n`.
pub fn jacobi_p_recurrence<S: Scalar>(order: &JacobiOrder<S>, x: S) -> Result<S> {
    let (a, b) = (order.alpha.clone(), order.beta.clone());
    let two = S::from_i64(2);
    let p0 = S::one();
    if order.n == 0 {
        return Ok(p0);
    }
    let p1 = a.clone()
        + S::one()
        + (a.clone() + b.clone() + two.clone()) * (x.clone() - S::one()) / two.clone();
    let (mut prev, mut cur) = (p0, p1);
    for k in 2..=order.n as i64 {
        let kk = S::from_i64(k);
        let s = S::from_i64(2 * k) + a.clone() + b.clone();
        let denom = two.clone()
            * kk.clone()
            * (kk.clone() + a.clone() + b.clone())
            * (s.clone() - two.clone());
        if denom.is_zero() {
            return Err(Error::pole("jacobi_p_recurrence", format!("n = {k}")));
        }
        let c1 = (s.clone() - S::one())
            * (s.clone() * (s.clone() - two.clone()) * x.clone() + a.clone() * a.clone()
                - b.clone() * b.clone());
        let c2 = two.clone()
            * (kk.clone() + a.clone() - S::one())
            * (kk + b.clone() - S::one())
            * s;
        let next = (c1 * cur.clone() - c2 * prev) / denom;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `d/dx P_n^{(α,β)}(x)`.
///
/// Differentiating the terminating series termwise shifts every parameter
/// by one, which gives `(n+α+β+1)/2 · P_{n-1}^{(α+1,β+1)}(x)`.
pub fn jacobi_p_deriv<S: Scalar>(order: &JacobiOrder<S>, x: S) -> S {
    if order.n == 0 {
        return S::zero();
    }
    let shifted = JacobiOrder::new(
        order.n - 1,
        order.alpha.clone() + S::one(),
        order.beta.clone() + S::one(),
    );
    order.ab1() / S::from_i64(2) * jacobi_p(&shifted, x)
}

/// Leading coefficient `ℓ_n = 2^{-n} binom(2n+α+β, n)`.
pub fn jacobi_leading_coefficient<S: Scalar>(order: &JacobiOrder<S>) -> S {
    let n = order.n as i64;
    let b = generalized_binomial(
        S::from_i64(2 * n) + order.alpha.clone() + order.beta.clone(),
        order.n,
    );
    let mut p = S::one();
    for _ in 0..n {
        p = p * S::from_i64(2);
    }
    b / p
}

/// Squared norm and leading coefficient of `P_n^{(α,β)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationData {
    /// `h_n = ∫_{-1}^{1} (1-x)^α (1+x)^β P_n(x)^2 dx`.
    pub h: Complex,
    pub leading: Complex,
}

/// `h_n` and `ℓ_n` for complex parameters with `Re α, Re β > -1`.
pub fn jacobi_normalization(order: &JacobiOrder<Complex>) -> Result<NormalizationData> {
    let (a, b) = (order.alpha, order.beta);
    if a.re <= -1.0 || b.re <= -1.0 {
        return Err(Error::domain(format!(
            "jacobi_normalization needs Re α, Re β > -1, got α = {a}, β = {b}"
        )));
    }
    let n = order.n as f64;
    let ln2 = std::f64::consts::LN_2;
    let s = a + b + 1.0;
    let lg = |z: Complex| log_gamma(z);
    let log_h = if order.n == 0 {
        s * ln2 + lg(a + 1.0)? + lg(b + 1.0)? - lg(s + 1.0)?
    } else {
        s * ln2 - (s + 2.0 * n).ln() + lg(a + n + 1.0)? + lg(b + n + 1.0)?
            - lg(Complex::new(n + 1.0, 0.0))?
            - lg(s + n)?
    };
    Ok(NormalizationData {
        h: log_h.exp(),
        leading: jacobi_leading_coefficient(order),
    })
}

/// Which variable a Jacobi weight is written in.
///
/// The two conventions describe the same measure:
/// `(1-x)^α (1+x)^β dx` on `[-1, 1]` equals
/// `(1-cos θ)^r (1+cos θ)^s dθ` on `[0, π]` under `x = cos θ`,
/// `α = r - 1/2`, `β = s - 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightConvention {
    /// Density in `x` with exponents `(α, β)`.
    Algebraic,
    /// Density in `θ` with exponents `(r, s)`.
    Angular,
}

/// Jacobi weight in the chosen convention. `t` is `x` or `θ` accordingly
/// and `(p, q)` are `(α, β)` or `(r, s)`.
pub fn jacobi_weight(convention: WeightConvention, p: f64, q: f64, t: f64) -> f64 {
    match convention {
        WeightConvention::Algebraic => (1.0 - t).powf(p) * (1.0 + t).powf(q),
        WeightConvention::Angular => (1.0 - t.cos()).powf(p) * (1.0 + t.cos()).powf(q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn low_degrees_in_closed_form() {
        let o = JacobiOrder::new(1, 0.3, -0.2);
        let x: f64 = 0.4;
        let want = 1.3 + 2.1 * (x - 1.0) / 2.0;
        assert!((jacobi_p(&o, x) - want).abs() < 1e-15);
        assert_eq!(jacobi_p(&JacobiOrder::new(0, 5.0, 2.0), 0.1), 1.0);
    }

    #[test]
    fn reference_value() {
        let o = JacobiOrder::new(3, 0.7f64, -0.5);
        for v in [
            jacobi_p(&o, 0.3),
            jacobi_p_hypergeometric(&o, 0.3).unwrap(),
            jacobi_p_recurrence(&o, 0.3).unwrap(),
        ] {
            assert!((v + 0.530_263).abs() < 1e-6, "{v}");
        }
    }

    #[test]
    fn three_routes_agree_exactly() {
        for n in 0..7u32 {
            let o = JacobiOrder::new(n, q(3, 7), q(-1, 2));
            for x in [q(1, 3), q(-5, 6), q(1, 1)] {
                let a = jacobi_p(&o, x.clone());
                assert_eq!(a, jacobi_p_hypergeometric(&o, x.clone()).unwrap());
                assert_eq!(a, jacobi_p_recurrence(&o, x).unwrap());
            }
        }
    }

    #[test]
    fn value_at_one_is_binomial() {
        for n in 0..8u32 {
            let o = JacobiOrder::new(n, q(5, 2), q(-1, 3));
            assert_eq!(
                jacobi_p(&o, q(1, 1)),
                generalized_binomial(q(n as i64, 1) + q(5, 2), n)
            );
        }
    }

    #[test]
    fn removable_point_of_hypergeometric_form() {
        // α = -2: α+1 = -1 is a pole of ₂F₁'s c but P stays finite
        let o = JacobiOrder::new(3, q(-2, 1), q(1, 2));
        assert!(jacobi_p_hypergeometric(&o, q(1, 5)).is_err());
        let v = jacobi_p(&o, q(1, 5));
        let eps = q(1, 1_000_000_000);
        let near = JacobiOrder::new(3, q(-2, 1) + eps, q(1, 2));
        let w = jacobi_p_hypergeometric(&near, q(1, 5)).unwrap();
        let d = (v - w).abs();
        assert!(d < q(1, 10_000_000));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let o = JacobiOrder::new(5, Complex::new(0.2, 0.4), Complex::new(-0.5, 0.0));
        let x = Complex::new(0.35, 0.0);
        let h = 1e-6;
        let fd = (jacobi_p(&o, x + h) - jacobi_p(&o, x - h)) / (2.0 * h);
        let d = jacobi_p_deriv(&o, x);
        assert!((fd - d).norm() < 1e-7 * d.norm().max(1.0));
        // exact: derivative of x-polynomial with rational coefficients
        let o = JacobiOrder::new(2, q(1, 2), q(-1, 2));
        // central difference is exact on a quadratic
        let e = q(1, 1000);
        let x = q(1, 3);
        let fd = (jacobi_p(&o, x.clone() + e.clone()) - jacobi_p(&o, x.clone() - e.clone()))
            / (q(2, 1) * e);
        assert_eq!(fd, jacobi_p_deriv(&o, x));
    }

    #[test]
    fn norms_by_quadrature() {
        use crate::quad::gauss_legendre;
        let rule = gauss_legendre(60);
        for (n, a, b) in [(0u32, 0.5, -0.5), (3, 0.5, -0.5), (4, 1.5, -0.5), (2, 0.0, 0.0)] {
            let o = JacobiOrder::new(n, a, b);
            // θ form avoids the endpoint singularities
            let f = |t: f64| {
                let x = t.cos();
                jacobi_weight(WeightConvention::Angular, a + 0.5, b + 0.5, t)
                    * jacobi_p(&o, x).powi(2)
            };
            let num = rule.integrate(f, 0.0, std::f64::consts::PI);
            let oc = JacobiOrder::new(n, Complex::new(a, 0.0), Complex::new(b, 0.0));
            let h = jacobi_normalization(&oc).unwrap().h.re;
            assert!((num - h).abs() < 1e-12 * h, "n={n}: {num} vs {h}");
        }
    }

    #[test]
    fn leading_coefficient() {
        // P_2^{(0,0)} = (3x^2 - 1)/2
        let o = JacobiOrder::new(2, q(0, 1), q(0, 1));
        assert_eq!(jacobi_leading_coefficient(&o), q(3, 2));
    }

    #[test]
    fn weight_conventions_are_the_same_measure() {
        let (r, s) = (1.3, 0.2);
        let t: f64 = 0.9;
        let ang = jacobi_weight(WeightConvention::Angular, r, s, t);
        let alg = jacobi_weight(WeightConvention::Algebraic, r - 0.5, s - 0.5, t.cos()) * t.sin();
        assert!((ang - alg).abs() < 1e-14);
    }
}
