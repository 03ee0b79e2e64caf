//! Numerical integration: fixed Gauss–Legendre rules, adaptive
//! Gauss–Kronrod, residues by the trapezoid rule on a circle, and inverse
//! Mellin (vertical-line and parabolic) contour integrals.

use crate::{Complex, Error, Result};
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point Gauss–Legendre rule, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> GaussLegendre {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussLegendre { nodes, weights }
}

impl GaussLegendre {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(m + h * x))
            .sum::<f64>()
            * h
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (m + h * x, w * h))
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(Complex, f64)>
where
    F: FnMut(f64) -> Result<Complex>,
{
    let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
    let fc = f(m)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(m - x)? + f(m + x)?;
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    Ok((k * h, ((k - g) * h).norm()))
}

/// Absolute/relative error targets for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-12,
            max_intervals: 2000,
        }
    }
}

/// Integral value with an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: Complex,
    pub error: f64,
}

/// Globally adaptive 15-point Gauss–Kronrod for complex integrands.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Complex>,
{
    if a == b {
        return Ok(Estimate {
            value: Complex::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let (v, e) = gk15(&mut f, a, b)?;
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: Complex = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= tol.abs.max(tol.rel * total.norm()) {
            return Ok(Estimate { value: total, error: err });
        }
        if parts.len() >= tol.max_intervals {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                estimate: err,
                tolerance: tol.abs.max(tol.rel * total.norm()),
            });
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Convergence {
                what: "adaptive quadrature (interval underflow)",
                estimate: err,
                tolerance: tol.abs,
            });
        }
        let (v1, e1) = gk15(&mut f, lo, mid)?;
        let (v2, e2) = gk15(&mut f, mid, hi)?;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Real-valued wrapper around [`integrate`].
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok(integrate(|x| f(x).map(|v| Complex::new(v, 0.0)), a, b, tol)?
        .value
        .re)
}

/// Residue of `f` at `center` from the trapezoid rule on a circle:
/// `(1/M) Σ f(z_j) (z_j - center)`.
pub fn circle_residue<F>(mut f: F, center: Complex, radius: f64, nodes: usize) -> Result<Complex>
where
    F: FnMut(Complex) -> Result<Complex>,
{
    let mut acc = Complex::new(0.0, 0.0);
    for j in 0..nodes {
        let w = Complex::from_polar(radius, 2.0 * PI * (j as f64 + 0.5) / nodes as f64);
        acc += f(center + w)? * w;
    }
    Ok(acc / nodes as f64)
}

/// Wynn's epsilon algorithm; returns the accelerated limit of `seq`.
pub fn wynn_epsilon(seq: &[Complex]) -> Complex {
    let n = seq.len();
    if n < 3 {
        return *seq.last().unwrap_or(&Complex::new(0.0, 0.0));
    }
    // e[k] holds column k of the table, shrinking by one each column.
    let mut prev = vec![Complex::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex> = seq.to_vec();
    let mut best = *seq.last().unwrap();
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d.norm() == 0.0 {
                return if col % 2 == 1 { best } else { cur[i + 1] };
            }
            next.push(prev[i + 1] + d.inv());
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            best = *cur.last().unwrap();
        }
    }
    best
}

/// Options for [`bromwich_line`].
#[derive(Debug, Clone, Copy)]
pub struct LineOptions {
    /// Abscissa `c` of the vertical line.
    pub abscissa: f64,
    /// Expected oscillation rate: the integrand behaves like `e^{i ω t}` times
    /// an algebraic factor for large `t`.
    pub omega: f64,
    /// Largest height integrated directly before giving up.
    pub max_height: f64,
    pub tol: f64,
}

/// Result of a vertical-line contour integral.
#[derive(Debug, Clone, Copy)]
pub struct LineIntegral {
    /// `(1/2πi) ∫_{c-i∞}^{c+i∞} f(r) dr`.
    pub value: Complex,
    /// Estimated error from truncation and extrapolation of the tail.
    pub tail_estimate: f64,
    /// Height up to which the integrand was sampled.
    pub height: f64,
}

/// `(1/2πi) ∫ f(r) dr` along `Re r = c`.
///
/// The line is cut into panels of half an oscillation period, each panel is
/// integrated by adaptive Gauss–Kronrod, and the partial sums are
/// extrapolated with Wynn's epsilon algorithm. Both halves `c ± it` are
/// integrated, so no symmetry of `f` is assumed.
pub fn bromwich_line<F>(mut f: F, opts: LineOptions) -> Result<LineIntegral>
where
    F: FnMut(Complex) -> Result<Complex>,
{
    let c = opts.abscissa;
    let width = (PI / opts.omega.abs().max(1e-9)).clamp(0.05, 1e6);
    let mut g = |t: f64| -> Result<Complex> {
        Ok(f(Complex::new(c, t))? + f(Complex::new(c, -t))?)
    };
    let panel_tol = Tolerance {
        abs: opts.tol * 1e-2,
        rel: 1e-14,
        max_intervals: 4000,
    };
    let mut sums: Vec<Complex> = Vec::new();
    let mut total = Complex::new(0.0, 0.0);
    let mut t = 0.0;
    let mut extrap = Vec::new();
    let mut small_panels = 0;
    loop {
        let panel = integrate(&mut g, t, t + width, panel_tol)?.value;
        t += width;
        total += panel;
        sums.push(total);
        let scale = 2.0 * PI;
        if panel.norm() / scale < opts.tol * 1e-3 {
            small_panels += 1;
        } else {
            small_panels = 0;
        }
        if small_panels >= 3 && sums.len() >= 4 {
            return Ok(LineIntegral {
                value: total / scale,
                tail_estimate: panel.norm() / scale,
                height: t,
            });
        }
        if sums.len() >= 6 {
            let start = sums.len().saturating_sub(24);
            let e = wynn_epsilon(&sums[start..]);
            extrap.push(e);
            let k = extrap.len();
            if k >= 3 {
                let d1 = (extrap[k - 1] - extrap[k - 2]).norm() / scale;
                let d2 = (extrap[k - 2] - extrap[k - 3]).norm() / scale;
                let est = d1.max(d2);
                if est <= opts.tol && sums.len() >= 12 {
                    return Ok(LineIntegral {
                        value: extrap[k - 1] / scale,
                        tail_estimate: est,
                        height: t,
                    });
                }
                if t > opts.max_height {
                    return Err(Error::Convergence {
                        what: "vertical-line contour integral",
                        estimate: est,
                        tolerance: opts.tol,
                    });
                }
            }
        }
        if t > opts.max_height && sums.len() < 6 {
            return Err(Error::Convergence {
                what: "vertical-line contour integral",
                estimate: panel.norm(),
                tolerance: opts.tol,
            });
        }
    }
}

/// `(1/2πi) ∫ f(r) dr` along `Re r = vertex`, deformed onto the parabola
/// `r(u) = vertex + μ((1+iu)^2 - 1)` that opens to the left.
///
/// Valid when `f` is analytic between the line and the parabola and decays
/// like `e^{r d}` with `d > 0` as `Re r → -∞`; the integral then equals the
/// sum of the residues to the left of `vertex`. The parametrised integrand
/// decays like `e^{-μ d u²}`, but for small `d` only algebraically, so the
/// trapezoid rule runs in `t` with `u = sinh t`, where both tails are
/// exponential. The step is halved until two successive estimates agree.
pub fn parabolic_contour<F>(mut f: F, vertex: f64, mu: f64, tol: f64) -> Result<Estimate>
where
    F: FnMut(Complex) -> Result<Complex>,
{
    let mut h = 0.25;
    let mut eval = |t: f64| -> Result<Complex> {
        let w = Complex::new(1.0, t.sinh());
        let r = Complex::new(vertex, 0.0) + (w * w - 1.0) * mu;
        Ok(f(r)? * w * t.cosh())
    };
    // integrand samples on the grid t = j h for j ≥ 0 (negative side separately)
    let trapezoid = |h: f64, eval: &mut dyn FnMut(f64) -> Result<Complex>| -> Result<Complex> {
        let mut acc = eval(0.0)?;
        for sign in [1.0, -1.0] {
            let mut quiet = 0;
            let mut j = 1usize;
            loop {
                let t = sign * j as f64 * h;
                let v = eval(t)?;
                acc += v;
                if v.norm() * h < tol * 1e-4 && t.abs() > 2.0 {
                    quiet += 1;
                    if quiet >= 4 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                j += 1;
                if j > 1_000_000 {
                    return Err(Error::Convergence {
                        what: "parabolic contour truncation",
                        estimate: v.norm(),
                        tolerance: tol,
                    });
                }
            }
        }
        Ok(acc * h * mu / PI)
    };
    let mut prev = trapezoid(h, &mut eval)?;
    let mut prev_err = f64::INFINITY;
    for _ in 0..8 {
        h *= 0.5;
        let cur = trapezoid(h, &mut eval)?;
        let err = (cur - prev).norm();
        if err <= tol {
            return Ok(Estimate { value: cur, error: err });
        }
        // stalled at the rounding floor of the integrand
        if err > 0.25 * prev_err && err <= 1e-9 * cur.norm().max(1.0) {
            return Ok(Estimate { value: cur, error: err });
        }
        prev = cur;
        prev_err = err;
    }
    Err(Error::Convergence {
        what: "parabolic contour",
        estimate: prev_err,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        for n in 1..12 {
            let r = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got = r.integrate(|x| x.powi(deg as i32), -1.0, 1.0);
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-14, "n={n} deg={deg}");
            }
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = integrate_real(|x| Ok(x.sqrt()), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        let v = integrate_real(|x| Ok((-x * x).exp()), -8.0, 8.0, Tolerance::default()).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn circle_residue_of_double_pole() {
        // Res_{z=1} e^z/(z-1)^2 = e
        let r = circle_residue(
            |z| Ok(z.exp() / ((z - 1.0) * (z - 1.0))),
            Complex::new(1.0, 0.0),
            0.1,
            128,
        )
        .unwrap();
        assert!((r - Complex::new(std::f64::consts::E, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // log 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let seq: Vec<Complex> = (1..=15)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                Complex::new(s, 0.0)
            })
            .collect();
        assert!((wynn_epsilon(&seq).re - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn bromwich_recovers_step_function() {
        // (1/2πi) ∫ e^{r d} / r dr over Re r = c > 0 equals 1 for d > 0, 0 for d < 0;
        // e^{r d}/(r(r+1)) gives 1 - e^{-d}
        for d in [0.7, 2.0, -0.5] {
            let res = bromwich_line(
                |r| Ok((r * d).exp() / (r * (r + 1.0))),
                LineOptions {
                    abscissa: 0.5,
                    omega: d,
                    max_height: 1e6,
                    tol: 1e-11,
                },
            )
            .unwrap();
            let want = if d > 0.0 { 1.0 - (-d).exp() } else { 0.0 };
            assert!((res.value.re - want).abs() < 1e-9, "d={d}: {:?}", res);
            assert!(res.value.im.abs() < 1e-10);
        }
    }

    #[test]
    fn parabola_sums_residues_to_the_left() {
        // poles of e^{rd}/(r(r+1)(r+2)) at 0, -1, -2; vertex -1.5 picks up only -2
        let d = 0.4;
        let f = |r: Complex| Ok((r * d).exp() / (r * (r + 1.0) * (r + 2.0)));
        let est = parabolic_contour(f, -1.5, 0.5, 1e-13).unwrap();
        let want = (-2.0 * d).exp() / 2.0;
        assert!((est.value.re - want).abs() < 1e-12, "{:?} vs {want}", est);
    }
}
