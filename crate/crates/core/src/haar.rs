//! Haar-distributed `SO(2N)` matrices and their eigenphases.
//!
//! Sampling is QR of a Gaussian matrix with the sign of `diag(R)` folded
//! back into `Q`, followed by a column flip when `det Q = -1`.
//!
//! Streams are cut into fixed chunks of [`CHUNK_SIZE`] draws. Chunk `c` of
//! seed `s` always uses the ChaCha stream `(s, c)`, so results do not depend
//! on how many threads run the chunks.

use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::{LN_2, PI};
use std::io::Write;

/// Tolerance on `max |A Aᵀ - I|`.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
/// Tolerance on `|det A - 1|`.
pub const DETERMINANT_TOL: f64 = 1e-8;
/// Phases this close to `0` or `π` are snapped onto the endpoint.
pub const PHASE_SNAP: f64 = 1e-12;
/// Draws per independently seeded chunk.
pub const CHUNK_SIZE: u64 = 4096;

/// A validated element of `SO(2N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialOrthogonalMatrix {
    a: DMatrix<f64>,
}

impl SpecialOrthogonalMatrix {
    /// Checks `A Aᵀ = I` and `det A = 1`.
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let d = a.nrows();
        if d == 0 || d % 2 != 0 || a.ncols() != d {
            return Err(Error::Integrity(format!(
                "expected an even square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let defect = (&a * a.transpose() - DMatrix::<f64>::identity(d, d)).amax();
        if !(defect <= ORTHOGONALITY_TOL) {
            return Err(Error::Integrity(format!("max |AAᵀ - I| = {defect:e}")));
        }
        let det = a.determinant();
        if !((det - 1.0).abs() <= DETERMINANT_TOL) {
            return Err(Error::Integrity(format!("det A = {det}")));
        }
        Ok(Self { a })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn dimension(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_pairs(&self) -> usize {
        self.a.nrows() / 2
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.a
    }
}

/// The `N` eigenphases in `[0, π]`, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenphaseSpectrum {
    phases: Vec<f64>,
}

impl EigenphaseSpectrum {
    /// Sorts the phases and checks they lie in `[0, π]`.
    pub fn new(mut phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::domain("a spectrum needs at least one phase"));
        }
        if let Some(bad) = phases.iter().find(|t| !(0.0..=PI).contains(*t)) {
            return Err(Error::domain(format!("phase {bad} outside [0, π]")));
        }
        phases.sort_by(f64::total_cmp);
        Ok(Self { phases })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn n_pairs(&self) -> usize {
        self.phases.len()
    }

    /// Smallest phase.
    pub fn first(&self) -> f64 {
        self.phases[0]
    }

    /// `log Λ_A(1, N)`, see [`log_char_poly_at_1`].
    pub fn log_lambda(&self) -> f64 {
        log_char_poly_at_1(self)
    }
}

/// Haar sample from `SO(2N)` driven by the given generator.
pub fn sample_so2n_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SpecialOrthogonalMatrix> {
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    let d = 2 * n;
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(d - 1).neg_mut();
    }
    SpecialOrthogonalMatrix::new(q)
}

/// Haar sample from `SO(2N)`, deterministic in `seed`.
pub fn sample_so2n(n: usize, seed: u64) -> Result<SpecialOrthogonalMatrix> {
    sample_so2n_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Generator for chunk `chunk` of the stream keyed by `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Eigenphases of `A`.
///
/// Each conjugate pair `e^{±iθ}` gives two values `atan2(|Im λ|, Re λ)`;
/// after sorting, adjacent values are paired and averaged. A pairing that
/// does not match signals a broken matrix.
pub fn eigenphases(a: &SpecialOrthogonalMatrix) -> Result<EigenphaseSpectrum> {
    let ev = a
        .matrix()
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::Integrity("Schur decomposition did not converge".into()))?
        .complex_eigenvalues();
    let mut phi: Vec<f64> = ev.iter().map(|z| z.im.abs().atan2(z.re)).collect();
    phi.sort_by(f64::total_cmp);
    let mut phases = Vec::with_capacity(a.n_pairs());
    for pair in phi.chunks_exact(2) {
        if (pair[1] - pair[0]).abs() > 1e-6 {
            return Err(Error::Integrity(format!(
                "eigenvalues do not pair up: phases {} and {}",
                pair[0], pair[1]
            )));
        }
        let t = 0.5 * (pair[0] + pair[1]);
        phases.push(if t < PHASE_SNAP {
            0.0
        } else if PI - t < PHASE_SNAP {
            PI
        } else {
            t
        });
    }
    EigenphaseSpectrum::new(phases)
}

/// `log Λ_A(1, N) = N log 2 + Σ log(1 - cos θ_j)`; `-∞` if some `θ_j = 0`.
pub fn log_char_poly_at_1(spectrum: &EigenphaseSpectrum) -> f64 {
    // 1 - cos θ = 2 sin²(θ/2), which keeps precision for small θ
    spectrum
        .phases
        .iter()
        .map(|t| 2.0 * LN_2 + 2.0 * (0.5 * t).sin().ln())
        .sum()
}

/// Draws `count` spectra of Haar `SO(2N)` matrices in parallel.
///
/// Draw `i` is the same for every thread count.
pub fn sample_spectra(n: usize, count: u64, seed: u64) -> Result<Vec<EigenphaseSpectrum>> {
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    let chunks = count.div_ceil(CHUNK_SIZE);
    let parts: Vec<Vec<EigenphaseSpectrum>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_SIZE.min(count - c * CHUNK_SIZE);
            draw_chunk(n, seed, c, len)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// The first `len` spectra of chunk `chunk`.
pub fn draw_chunk(n: usize, seed: u64, chunk: u64, len: u64) -> Result<Vec<EigenphaseSpectrum>> {
    let mut rng = chunk_rng(seed, chunk);
    (0..len)
        .map(|_| eigenphases(&sample_so2n_with(n, &mut rng)?))
        .collect()
}

/// CSV with header `theta_1,...,theta_N,log_lambda`, one row per spectrum.
pub fn write_spectra_csv<'a, W, I>(mut w: W, spectra: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a EigenphaseSpectrum>,
{
    let mut it = spectra.into_iter().peekable();
    let n = match it.peek() {
        Some(s) => s.n_pairs(),
        None => return Err(Error::domain("no spectra to write")),
    };
    let header: Vec<String> = (1..=n).map(|j| format!("theta_{j}")).collect();
    writeln!(w, "{},log_lambda", header.join(","))?;
    for s in it {
        if s.n_pairs() != n {
            return Err(Error::domain("spectra of different sizes in one file"));
        }
        for t in s.phases() {
            write!(w, "{t},")?;
        }
        writeln!(w, "{}", s.log_lambda())?;
    }
    Ok(())
}
