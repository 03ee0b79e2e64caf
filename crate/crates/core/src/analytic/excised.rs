use super::kernel::wronskian_p;
use super::so2n::{h_exact, log_c_so2n, moments_continued, r1_so2n_unscaled};
use crate::quad::{bromwich_line, circle_residue, parabolic_contour, LineOptions};
use crate::specfun::{is_nonpositive_integer, ln_gamma_pos, log_gamma};
use crate::{Complex, Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};
use std::io::Write;

/// Radius of the circles used to extract residues numerically.
pub const RESIDUE_RADIUS: f64 = 0.1;
/// Trapezoid nodes on each residue circle.
pub const RESIDUE_NODES: usize = 128;
/// Default number of half-integer poles summed.
pub const DEFAULT_POLES: usize = 10;
/// Absolute tail tolerance above which the residue series is completed by a
/// contour integral for the remaining poles.
pub const SERIES_TOLERANCE: f64 = 1e-12;
/// Default abscissa of the vertical line for the direct contour route.
pub const LINE_ABSCISSA: f64 = 0.5;

const PARABOLA_MU: f64 = 0.5;

fn check_cutoff(n: usize, log_cutoff: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    if !(log_cutoff < 2.0 * n as f64 * LN_2) {
        return Err(Error::domain(format!(
            "cutoff 𝒳 = {log_cutoff} ≥ 2N log 2 leaves the excised ensemble empty"
        )));
    }
    Ok(())
}

/// Edge of the hard gap: no eigenphase of an accepted matrix lies in
/// `[0, θ_inf]`, `θ_inf = arccos(1 - 2^{-(2N-1)} e^𝒳)`.
pub fn theta_inf(n: usize, log_cutoff: f64) -> Result<f64> {
    check_cutoff(n, log_cutoff)?;
    let t = (log_cutoff - (2 * n - 1) as f64 * LN_2).exp();
    Ok((1.0 - t).max(-1.0).acos())
}

/// `d(θ, 𝒳) = (2N-1) log 2 + log(1 - cos θ) - 𝒳`; the excised density
/// vanishes where this is negative.
pub fn gap_exponent(n: usize, log_cutoff: f64, theta: f64) -> f64 {
    (2 * n - 1) as f64 * LN_2 + (1.0 - theta.cos()).ln() - log_cutoff
}

/// The `r`-integrand whose residues give the excised one-level density,
/// with the cancelling Gamma factors removed. Constant pieces are cached.
#[derive(Debug, Clone, Copy)]
struct Integrand {
    n: usize,
    log_cutoff: f64,
    log_k0: f64,
}

impl Integrand {
    fn new(n: usize, log_cutoff: f64) -> Self {
        let nn = n as f64;
        let mut log_k0 = ln_gamma_pos(nn + 1.0) - ln_gamma_pos(nn - 0.5);
        for j in 0..n {
            let j = j as f64;
            log_k0 += ln_gamma_pos(2.0 + j) + ln_gamma_pos(0.5 + j);
        }
        Integrand {
            n,
            log_cutoff,
            log_k0,
        }
    }

    /// `(e^{-r𝒳}/r) 2^{N²+2Nr-N} Π_j Γ(2+j)Γ(1/2+j)Γ(r+1/2+j)/Γ(r+N+j) f_N(θ,θ)`.
    ///
    /// `Γ(N+r)` and `Γ(N+r-1/2)` cancel against the kernel prefactor, and
    /// `(2N+r-1)Γ(r+2N-1) = Γ(r+2N)`; what is left has poles only at
    /// `r = 0` and the negative half-integers.
    fn eval(&self, theta: f64, r: Complex) -> Result<Complex> {
        let n = self.n;
        let nn = n as f64;
        if r.norm() == 0.0 {
            return Err(Error::pole("excised integrand", r));
        }
        let d = gap_exponent(n, self.log_cutoff, theta);
        if n == 1 {
            // everything but e^{rd}/r cancels
            return Ok((r * d).exp() / r);
        }
        let mut l = r * d - r.ln() + (nn * nn - nn + 1.0) * LN_2 + self.log_k0;
        for j in 0..n - 1 {
            let z = r + 0.5 + j as f64;
            if is_nonpositive_integer(z) {
                return Err(Error::pole("excised integrand", r));
            }
            l += log_gamma(z)?;
        }
        let dens = (1..n - 1)
            .map(|j| r + nn + j as f64)
            .chain(std::iter::once(r + 2.0 * nn));
        for z in dens {
            if is_nonpositive_integer(z) {
                return Ok(Complex::new(0.0, 0.0));
            }
            l -= log_gamma(z)?;
        }
        Ok(l.exp() * wronskian_p(n, r, theta))
    }

    /// Closed-form residue at `r = -1/2` (simple pole), `N ≥ 2`.
    fn residue_half(&self, theta: f64) -> Complex {
        let n = self.n;
        let nn = n as f64;
        let mut l = 0.5 * self.log_cutoff + (nn * nn - 2.0 * nn + 1.5) * LN_2
            - 0.5 * (1.0 - theta.cos()).ln()
            - (2.0 * nn - 1.5).ln()
            + ln_gamma_pos(nn + 1.0)
            + ln_gamma_pos(0.5)
            - ln_gamma_pos(nn - 1.0)
            - ln_gamma_pos(nn - 0.5);
        for j in 1..n {
            let j = j as f64;
            l += ln_gamma_pos(2.0 + j) + ln_gamma_pos(0.5 + j) + ln_gamma_pos(j)
                - ln_gamma_pos(nn + j - 0.5);
        }
        -2.0 * l.exp() * wronskian_p(n, Complex::new(-0.5, 0.0), theta)
    }

    fn residue(&self, theta: f64, pole: f64) -> Result<Complex> {
        if self.n == 1 {
            return Ok(Complex::new(0.0, 0.0));
        }
        if pole == -0.5 {
            return Ok(self.residue_half(theta));
        }
        circle_residue(
            |r| self.eval(theta, r),
            Complex::new(pole, 0.0),
            RESIDUE_RADIUS,
            RESIDUE_NODES,
        )
    }
}

/// Closed-form residue of the excised integrand at `r = 0`. It equals
/// `R_1^{SO(2N)}(θ) / C_{SO(2N)}`.
pub fn excised_residue_at_zero(n: usize, theta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    let nn = n as f64;
    let mut l = (nn * nn - nn + 1.0) * LN_2 - (2.0 * nn - 1.0).ln() + ln_gamma_pos(nn + 1.0)
        + ln_gamma_pos(nn)
        - 2.0 * ln_gamma_pos(nn - 0.5);
    for j in 0..n {
        let j = j as f64;
        l += ln_gamma_pos(2.0 + j) + 2.0 * ln_gamma_pos(0.5 + j) - ln_gamma_pos(nn + j);
    }
    Ok(l.exp() * wronskian_p(n, Complex::new(0.0, 0.0), theta).re)
}

/// The integrand of the contour representation of the excised one-level
/// density (before multiplication by `C_𝒳`).
pub fn excised_integrand(n: usize, log_cutoff: f64, theta: f64, r: Complex) -> Result<Complex> {
    check_cutoff(n, log_cutoff)?;
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::domain(format!("θ = {theta} must lie in (0, π)")));
    }
    Integrand::new(n, log_cutoff).eval(theta, r)
}

/// Residues at `r = 0, -1/2, -3/2, ..., -(2K+1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueSeries {
    /// Pole locations, starting with `0`.
    pub poles: Vec<f64>,
    /// Residue at each pole, including its `e^{-r𝒳}` factor.
    pub residues: Vec<Complex>,
    pub truncation_k: usize,
    /// Whether the `r = 0` term is part of `residues`.
    pub leading_term_included: bool,
    /// Estimated size of the omitted poles.
    pub tail_estimate: f64,
    /// `tail_estimate` exceeded the series tolerance.
    pub warning: bool,
    pub log_cutoff: f64,
}

impl ResidueSeries {
    /// `𝒳`-free coefficients `residue · e^{pole·𝒳}`.
    pub fn coefficients(&self) -> Vec<Complex> {
        self.poles
            .iter()
            .zip(&self.residues)
            .map(|(p, r)| r * (p * self.log_cutoff).exp())
            .collect()
    }

    pub fn sum(&self) -> Complex {
        self.residues.iter().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs = self.coefficients();
        serde_json::json!({
            "poles": self.poles,
            "coefficients_re": coeffs.iter().map(|c| c.re).collect::<Vec<_>>(),
            "coefficients_im": coeffs.iter().map(|c| c.im).collect::<Vec<_>>(),
            "K": self.truncation_k,
            "warning": self.warning,
            "tail_estimate": self.tail_estimate,
        })
    }
}

fn poles(k: usize) -> Vec<f64> {
    std::iter::once(0.0)
        .chain((0..=k).map(|j| -(j as f64) - 0.5))
        .collect()
}

/// Geometric tail estimate from the last two term magnitudes.
fn tail_from(prev: f64, last: f64) -> f64 {
    if last == 0.0 {
        return 0.0;
    }
    let rho = last / prev;
    if rho.is_finite() && rho < 0.9 {
        last * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    }
}

/// `C_{SO(2N)}/C_𝒳`, the Haar probability that `log Λ_A(1, N) ≥ 𝒳`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationRatio {
    pub value: f64,
    pub series: ResidueSeries,
    /// Contribution of the poles beyond `K`, added when the series tail
    /// exceeded tolerance.
    pub remainder: Option<f64>,
}

fn ratio_integrand(n: usize, log_cutoff: f64, s: Complex) -> Result<Complex> {
    if s.norm() == 0.0 {
        return Err(Error::pole("normalization integrand", s));
    }
    Ok(moments_continued(n, s)? * (-s * log_cutoff).exp() / s)
}

/// Closed-form residue of `e^{-s𝒳} M_O(N, s)/s` at `s = -1/2`.
fn ratio_residue_half(n: usize, log_cutoff: f64) -> f64 {
    let nn = n as f64;
    let mut l = 0.5 * log_cutoff - (nn - 1.0) * LN_2 + ln_gamma_pos(nn)
        - ln_gamma_pos(nn - 0.5)
        - ln_gamma_pos(0.5);
    for j in 1..n {
        let j = j as f64;
        l += ln_gamma_pos(nn + j) + ln_gamma_pos(j) - ln_gamma_pos(nn + j - 0.5) - ln_gamma_pos(0.5 + j);
    }
    -l.exp()
}

/// `C_{SO(2N)}/C_𝒳` by residues of `e^{-s𝒳} M_O(N, s)/s` at `s = 0`,
/// `-1/2` (closed form) and `-3/2, ..., -(2K+1)/2` (numerical).
pub fn normalization_ratio(n: usize, log_cutoff: f64, k: usize) -> Result<NormalizationRatio> {
    check_cutoff(n, log_cutoff)?;
    if k < 1 {
        return Err(Error::domain("K must be at least 1"));
    }
    let ps = poles(k);
    let mut residues = vec![Complex::new(1.0, 0.0), Complex::new(ratio_residue_half(n, log_cutoff), 0.0)];
    for &p in &ps[2..] {
        residues.push(circle_residue(
            |s| ratio_integrand(n, log_cutoff, s),
            Complex::new(p, 0.0),
            RESIDUE_RADIUS,
            RESIDUE_NODES,
        )?);
    }
    let next = circle_residue(
        |s| ratio_integrand(n, log_cutoff, s),
        Complex::new(-(k as f64) - 1.5, 0.0),
        RESIDUE_RADIUS,
        RESIDUE_NODES,
    )?;
    let tail = tail_from(residues[k + 1].norm(), next.norm());
    let warning = tail > SERIES_TOLERANCE;
    let mut remainder = None;
    if warning {
        let est = parabolic_contour(
            |s| ratio_integrand(n, log_cutoff, s),
            -(k as f64) - 1.0,
            PARABOLA_MU,
            SERIES_TOLERANCE * 1e-2,
        )?;
        remainder = Some(est.value.re);
    }
    let series = ResidueSeries {
        poles: ps,
        residues,
        truncation_k: k,
        leading_term_included: true,
        tail_estimate: tail,
        warning,
        log_cutoff,
    };
    let value = series.sum().re + remainder.unwrap_or(0.0);
    Ok(NormalizationRatio {
        value,
        series,
        remainder,
    })
}

/// `C_{SO(2N)}/C_𝒳` by direct quadrature along `Re s = c`.
pub fn normalization_ratio_line_integral(
    n: usize,
    log_cutoff: f64,
    c: f64,
    max_height: f64,
) -> Result<f64> {
    check_cutoff(n, log_cutoff)?;
    let omega = 2.0 * n as f64 * LN_2 - log_cutoff;
    let li = bromwich_line(
        |s| ratio_integrand(n, log_cutoff, s),
        LineOptions {
            abscissa: c,
            omega,
            max_height,
            tol: 1e-12,
        },
    )
    .map_err(line_error)?;
    Ok(li.value.re)
}

fn line_error(e: Error) -> Error {
    match e {
        Error::Convergence { estimate, tolerance, .. } => Error::domain(format!(
            "line-integral tail estimate {estimate:e} exceeds tolerance {tolerance:e}"
        )),
        other => other,
    }
}

/// One evaluation of the excised one-level density.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcisedValue {
    pub theta: f64,
    pub value: f64,
    /// `None` inside the hard gap.
    pub series: Option<ResidueSeries>,
    /// Contribution of poles beyond `K`, when it was needed.
    pub remainder: Option<f64>,
    pub warning: bool,
}

/// Excised one-level density for fixed `(N, 𝒳, K)`; the normalization is
/// computed once and shared across `θ`.
#[derive(Debug, Clone)]
pub struct ExcisedDensity {
    n: usize,
    log_cutoff: f64,
    k: usize,
    integrand: Integrand,
    ratio: NormalizationRatio,
    /// `C_𝒳 = C_{SO(2N)} / ratio`.
    c_x: f64,
}

impl ExcisedDensity {
    pub fn new(n: usize, log_cutoff: f64, k: usize) -> Result<Self> {
        let ratio = normalization_ratio(n, log_cutoff, k)?;
        let c_x = (log_c_so2n(n)).exp() / ratio.value;
        Ok(ExcisedDensity {
            n,
            log_cutoff,
            k,
            integrand: Integrand::new(n, log_cutoff),
            ratio,
            c_x,
        })
    }

    pub fn n_pairs(&self) -> usize {
        self.n
    }

    pub fn log_cutoff(&self) -> f64 {
        self.log_cutoff
    }

    pub fn normalization(&self) -> &NormalizationRatio {
        &self.ratio
    }

    /// `C_𝒳`.
    pub fn c_x(&self) -> f64 {
        self.c_x
    }

    pub fn theta_inf(&self) -> f64 {
        theta_inf(self.n, self.log_cutoff).expect("checked at construction")
    }

    /// `R_1^{T_𝒳}(θ) = C_𝒳 Σ residues`; exactly `0` for `d(θ, 𝒳) ≤ 0`.
    pub fn evaluate(&self, theta: f64) -> Result<ExcisedValue> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::domain(format!("θ = {theta} outside [0, π]")));
        }
        let d = gap_exponent(self.n, self.log_cutoff, theta);
        if !(d > 0.0) {
            return Ok(ExcisedValue {
                theta,
                value: 0.0,
                series: None,
                remainder: None,
                warning: false,
            });
        }
        let lead = r1_so2n_unscaled(self.n, theta) / log_c_so2n(self.n).exp();
        let ps = poles(self.k);
        let mut residues = vec![Complex::new(lead, 0.0)];
        for &p in &ps[1..] {
            residues.push(self.integrand.residue(theta, p)?);
        }
        let next = self.integrand.residue(theta, -(self.k as f64) - 1.5)?;
        let tail = self.c_x * tail_from(residues[self.k + 1].norm(), next.norm());
        let warning = tail > SERIES_TOLERANCE;
        let mut remainder = None;
        if warning && self.n > 1 {
            let est = parabolic_contour(
                |r| self.integrand.eval(theta, r),
                -(self.k as f64) - 1.0,
                PARABOLA_MU,
                SERIES_TOLERANCE * 1e-2 / self.c_x,
            )?;
            remainder = Some(est.value.re);
        }
        let series = ResidueSeries {
            poles: ps,
            residues,
            truncation_k: self.k,
            leading_term_included: true,
            tail_estimate: tail,
            warning,
            log_cutoff: self.log_cutoff,
        };
        let value = self.c_x * (series.sum().re + remainder.unwrap_or(0.0));
        Ok(ExcisedValue {
            theta,
            value,
            series: Some(series),
            remainder: remainder.map(|v| v * self.c_x),
            warning,
        })
    }

    pub fn value(&self, theta: f64) -> Result<f64> {
        Ok(self.evaluate(theta)?.value)
    }

    /// [`ExcisedDensity::evaluate`] at every point, in parallel.
    pub fn evaluate_many(&self, thetas: &[f64]) -> Result<Vec<ExcisedValue>> {
        thetas.par_iter().map(|&t| self.evaluate(t)).collect()
    }

    /// Evaluate on a grid, in parallel.
    pub fn grid(&self, thetas: &[f64]) -> Result<DensityGrid> {
        let values = self.evaluate_many(thetas)?.iter().map(|v| v.value).collect();
        DensityGrid::new(self.n, self.log_cutoff, thetas.to_vec(), values)
    }
}

/// `R_1^{T_𝒳}(θ)` from `K` half-integer poles (plus the tail, if needed).
pub fn r1_excised(n: usize, log_cutoff: f64, theta: f64, k: usize) -> Result<ExcisedValue> {
    ExcisedDensity::new(n, log_cutoff, k)?.evaluate(theta)
}

/// Result of the direct contour route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineValue {
    pub value: f64,
    /// Imaginary part of the quadrature, zero up to rounding.
    pub imag: f64,
    pub tail_estimate: f64,
}

/// `R_1^{T_𝒳}(θ)` by quadrature along `Re r = c`, with the normalization
/// also computed by a line integral. `max_height` bounds the part of the
/// line that is sampled before the tail is extrapolated.
pub fn r1_excised_line_integral(
    n: usize,
    log_cutoff: f64,
    theta: f64,
    c: f64,
    max_height: f64,
) -> Result<LineValue> {
    check_cutoff(n, log_cutoff)?;
    if !(c > 0.0) {
        return Err(Error::domain("line abscissa must be positive"));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::domain(format!("θ = {theta} must lie in (0, π)")));
    }
    let d = gap_exponent(n, log_cutoff, theta);
    if d == 0.0 {
        return Err(Error::domain("θ on the gap edge"));
    }
    let ratio = normalization_ratio_line_integral(n, log_cutoff, c, max_height)?;
    let c_x = log_c_so2n(n).exp() / ratio;
    let f = Integrand::new(n, log_cutoff);
    let li = bromwich_line(
        |r| f.eval(theta, r),
        LineOptions {
            abscissa: c,
            omega: d,
            max_height,
            tol: 1e-11 / c_x,
        },
    )
    .map_err(line_error)?;
    Ok(LineValue {
        value: c_x * li.value.re,
        imag: c_x * li.value.im,
        tail_estimate: c_x * li.tail_estimate,
    })
}

/// Analytic density values on a `θ` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub n_pairs: usize,
    pub log_cutoff: f64,
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityGrid {
    /// Validates the grid. Rounding noise in `(-1e-10, 0)` is set to `0`;
    /// anything more negative is an integrity error.
    pub fn new(n_pairs: usize, log_cutoff: f64, thetas: Vec<f64>, mut values: Vec<f64>) -> Result<Self> {
        if thetas.len() != values.len() {
            return Err(Error::Integrity("grid and value lengths differ".into()));
        }
        if thetas.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("grid must be ascending"));
        }
        for (t, v) in thetas.iter().zip(values.iter_mut()) {
            if *v < 0.0 {
                if *v > -1e-10 {
                    *v = 0.0;
                } else {
                    return Err(Error::Integrity(format!("negative density {v} at θ = {t}")));
                }
            }
        }
        Ok(DensityGrid {
            n_pairs,
            log_cutoff,
            thetas,
            values,
        })
    }

    /// CSV with header `theta,r1`, plus `theta_scaled` (`θN/π`) when asked.
    pub fn write_csv<W: Write>(&self, mut w: W, scaled: bool) -> Result<()> {
        if scaled {
            writeln!(w, "theta,r1,theta_scaled")?;
        } else {
            writeln!(w, "theta,r1")?;
        }
        let s = self.n_pairs as f64 / PI;
        for (t, v) in self.thetas.iter().zip(&self.values) {
            if scaled {
                writeln!(w, "{},{},{}", t, v, t * s)?;
            } else {
                writeln!(w, "{},{}", t, v)?;
            }
        }
        Ok(())
    }
}

/// Probability that `log Λ_A(1, N) ≥ 𝒳` to leading order in `e^{𝒳/2}`:
/// `1 - 2 e^{𝒳/2} h(N)`.
pub fn normalization_ratio_leading(n: usize, log_cutoff: f64) -> Result<f64> {
    Ok(1.0 - 2.0 * (0.5 * log_cutoff).exp() * h_exact(n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{c_so2n, cd_kernel_diag};

    const LOG_TENTH: f64 = -2.302_585_092_994_046;

    #[test]
    fn theta_inf_values() {
        assert!((theta_inf(1, LN_2).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((theta_inf(2, LOG_TENTH).unwrap() - (1.0 - 0.1f64 / 8.0).acos()).abs() < 1e-15);
        assert!(theta_inf(2, -700.0).unwrap() < 1e-100);
        assert!(theta_inf(2, 4.0 * LN_2).is_err());
        assert!(theta_inf(3, -1.0).unwrap() < theta_inf(2, -1.0).unwrap());
        assert!(theta_inf(2, -1.0).unwrap() < theta_inf(2, -0.5).unwrap());
    }

    #[test]
    fn residue_at_zero_closed_form() {
        for n in 1..=4 {
            for t in [0.4, 1.0, 2.7] {
                let want = r1_so2n_unscaled(n, t) / c_so2n(n).unwrap();
                let closed = excised_residue_at_zero(n, t).unwrap();
                assert!((closed - want).abs() < 1e-11 * want, "N={n} θ={t}");
            }
        }
        let f = Integrand::new(2, LOG_TENTH);
        let num = circle_residue(|r| f.eval(1.0, r), Complex::new(0.0, 0.0), 0.1, 128).unwrap();
        let closed = excised_residue_at_zero(2, 1.0).unwrap();
        assert!((num.re - closed).abs() < 1e-9 * closed && num.im.abs() < 1e-12);
    }

    #[test]
    fn residue_at_minus_half_closed_form() {
        for n in 2..=5 {
            let f = Integrand::new(n, -1.3);
            for t in [0.9, 2.0] {
                let closed = f.residue_half(t);
                let num = circle_residue(|r| f.eval(t, r), Complex::new(-0.5, 0.0), 0.1, 128)
                    .unwrap();
                assert!((num - closed).norm() < 1e-10 * closed.norm(), "N={n}: {num} vs {closed}");
            }
        }
    }

    #[test]
    fn integrand_matches_unsimplified_form() {
        // (e^{-r𝒳}/r) 2^{N²+2Nr-N} Π Γ(2+j)Γ(1/2+j)Γ(r+1/2+j)/Γ(r+N+j) f_N(θ,θ)
        let (n, x, t) = (3usize, -0.7, 1.3);
        for r in [Complex::new(0.4, 2.0), Complex::new(-1.2, 0.3), Complex::new(2.5, -7.0)] {
            let nn = n as f64;
            let mut l = -r * x - r.ln() + (nn * nn + 2.0 * nn * r - nn) * LN_2;
            for j in 0..n {
                let j = j as f64;
                l += ln_gamma_pos(2.0 + j) + ln_gamma_pos(0.5 + j) + log_gamma(r + 0.5 + j).unwrap()
                    - log_gamma(r + nn + j).unwrap();
            }
            let want = l.exp() * cd_kernel_diag(n, r, t).unwrap();
            let got = excised_integrand(n, x, t, r).unwrap();
            assert!((got - want).norm() < 1e-11 * want.norm(), "{r}: {got} vs {want}");
        }
    }

    #[test]
    fn integrand_conjugate_symmetry_and_growth() {
        let r = Complex::new(0.5, 3.7);
        let a = excised_integrand(2, LOG_TENTH, 1.0, r).unwrap();
        let b = excised_integrand(2, LOG_TENTH, 1.0, r.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-15 * a.norm());
        // for N = 2, |F| |r|^{3/2} e^{-Re r d} tends to a constant along Re r = c
        let d = gap_exponent(2, LOG_TENTH, 1.0);
        let g = |t: f64| {
            let r = Complex::new(0.5, t);
            excised_integrand(2, LOG_TENTH, 1.0, r).unwrap().norm()
                * r.norm().powf(1.5)
                * (-0.5 * d).exp()
        };
        let (g1, g2) = (g(1e3), g(1e4));
        assert!(((g1 - g2) / g2).abs() < 1e-3, "{g1} {g2}");
    }

    #[test]
    fn ratio_matches_reference() {
        let r = normalization_ratio(2, LOG_TENTH, 10).unwrap();
        assert!((r.value - 0.831_122_244_771_235_4).abs() < 1e-12, "{}", r.value);
        let half = r.series.residues[1].re;
        assert!((half + 2.0 * (0.5 * LOG_TENTH).exp() * h_exact(2).unwrap()).abs() < 1e-14);
        let num = circle_residue(
            |s| ratio_integrand(2, LOG_TENTH, s),
            Complex::new(-0.5, 0.0),
            0.1,
            128,
        )
        .unwrap();
        assert!((num.re - half).abs() < 1e-12);
        assert!((normalization_ratio(2, -40.0, 10).unwrap().value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ratio_for_so2_is_arc_length() {
        for x in [-3.0f64, 0.0, 1.0] {
            let want = (PI - (1.0 - x.exp() / 2.0).acos()) / PI;
            let got = normalization_ratio(1, x, 10).unwrap().value;
            assert!((got - want).abs() < 1e-11, "𝒳={x}: {got} vs {want}");
        }
    }

    #[test]
    fn ratio_line_integral_agrees() {
        let v = normalization_ratio_line_integral(2, LOG_TENTH, 0.5, 1e7).unwrap();
        assert!((v - 0.831_122_244_771_235_4).abs() < 1e-10, "{v}");
    }

    #[test]
    fn r1_reference_values() {
        let e = ExcisedDensity::new(2, LOG_TENTH, 10).unwrap();
        for (t, want) in [
            (1.0, 0.590_829_543_574_183_8),
            (0.3, 1.068_146_143_366_890_0),
            (2.5, 0.743_352_224_788_529_8),
        ] {
            let v = e.evaluate(t).unwrap();
            assert!((v.value - want).abs() < 1e-10, "θ={t}: {} vs {want}", v.value);
        }
        assert_eq!(e.value(0.1).unwrap(), 0.0);
        assert_eq!(e.value(0.0).unwrap(), 0.0);
    }

    #[test]
    fn so2_excised_density_is_flat() {
        let e = ExcisedDensity::new(1, -0.5, 10).unwrap();
        let ti = e.theta_inf();
        let ratio = (PI - ti) / PI;
        for t in [ti + 1e-3, 1.5, 3.0] {
            assert!((e.value(t).unwrap() - 1.0 / (PI * ratio)).abs() < 1e-11);
        }
    }

    #[test]
    fn line_route_agrees_at_reference_point() {
        let v = r1_excised_line_integral(2, LOG_TENTH, 1.0, 0.5, 1e7).unwrap();
        assert!((v.value - 0.590_829_543_574_183_8).abs() < 1e-8, "{v:?}");
        assert!(v.imag.abs() < 1e-10);
        let inside = r1_excised_line_integral(2, LOG_TENTH, 0.1, 0.5, 1e7).unwrap();
        assert!(inside.value.abs() < 1e-8, "{inside:?}");
    }

    #[test]
    fn square_root_onset_at_gap_edge() {
        let e = ExcisedDensity::new(2, LOG_TENTH, 10).unwrap();
        let g = e.theta_inf();
        let v: Vec<f64> = [1e-6, 1e-8, 1e-10].iter().map(|d| e.value(g + d).unwrap()).collect();
        for w in v.windows(2) {
            assert!((w[0] / w[1] - 10.0).abs() < 1e-3, "{v:?}");
        }
    }
}
