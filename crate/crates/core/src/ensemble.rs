//! The excised ensemble by rejection, and binned statistics of its spectra.

use crate::analytic::theta_inf;
use crate::haar::{chunk_rng, eigenphases, sample_so2n_with, EigenphaseSpectrum, CHUNK_SIZE};
use crate::{Error, Result, ARTIFACT_VERSION};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::io::{BufRead, Write};

/// Default number of histogram bins.
pub const DEFAULT_BINS: usize = 100;
/// Default number of grid points for [`cdf_distance`].
pub const DEFAULT_GRID_POINTS: usize = 64;
/// Default minimal acceptance rate before sampling is abandoned.
pub const DEFAULT_ACCEPTANCE_FLOOR: f64 = 1e-6;
/// Number of leading draws over which the acceptance floor is checked.
pub const FLOOR_WINDOW: u64 = 100_000;

/// Most chunks processed per parallel round of [`sample_excised`].
const MAX_ROUND_CHUNKS: u64 = 256;

/// Matrix half-size `N` and log-cutoff `𝒳` of the ensemble `T_𝒳`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcisionSpec {
    pub n_pairs: usize,
    pub log_cutoff: f64,
}

impl ExcisionSpec {
    /// Requires `N ≥ 1` and `𝒳 < 2N log 2`. `𝒳 = -∞` means no excision.
    pub fn new(n_pairs: usize, log_cutoff: f64) -> Result<Self> {
        if n_pairs == 0 {
            return Err(Error::domain("N must be at least 1"));
        }
        let max = 2.0 * n_pairs as f64 * LN_2;
        if log_cutoff.is_nan() || log_cutoff >= max {
            return Err(Error::domain(format!(
                "log-cutoff {log_cutoff} must be below 2N log 2 = {max}; T_X would be empty"
            )));
        }
        Ok(Self {
            n_pairs,
            log_cutoff,
        })
    }

    /// From a linear cutoff `e^𝒳 > 0`.
    pub fn from_cutoff(n_pairs: usize, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::domain(format!("cutoff {cutoff} must be positive")));
        }
        Self::new(n_pairs, cutoff.ln())
    }

    pub fn accepts(&self, spectrum: &EigenphaseSpectrum) -> bool {
        spectrum.n_pairs() == self.n_pairs && spectrum.log_lambda() >= self.log_cutoff
    }

    /// Edge of the hard gap; `0` without excision.
    pub fn theta_inf(&self) -> f64 {
        theta_inf(self.n_pairs, self.log_cutoff).unwrap_or(0.0)
    }
}

/// Knobs for [`sample_excised_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    /// Sampling aborts when the acceptance rate over the first
    /// [`FLOOR_WINDOW`] draws is below this.
    pub acceptance_floor: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            acceptance_floor: DEFAULT_ACCEPTANCE_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub total_drawn: u64,
    pub accepted: u64,
    pub acceptance_rate: f64,
    pub mean_first_phase: f64,
}

impl SampleSummary {
    /// Summary of `accepted` spectra taken from `total_drawn` draws.
    pub fn new(total_drawn: u64, spectra: &[EigenphaseSpectrum]) -> Self {
        let accepted = spectra.len() as u64;
        let mean_first_phase = if spectra.is_empty() {
            f64::NAN
        } else {
            spectra.iter().map(|s| s.first()).sum::<f64>() / spectra.len() as f64
        };
        Self {
            total_drawn,
            accepted,
            acceptance_rate: accepted as f64 / total_drawn as f64,
            mean_first_phase,
        }
    }

    /// JSON record with the run parameters and artifact version.
    pub fn to_json(&self, spec: &ExcisionSpec, seed: u64) -> serde_json::Value {
        serde_json::json!({
            "total_drawn": self.total_drawn,
            "accepted": self.accepted,
            "acceptance_rate": self.acceptance_rate,
            "mean_first_phase": self.mean_first_phase,
            "seed": seed,
            "n_pairs": spec.n_pairs,
            "log_cutoff": spec.log_cutoff,
            "version": ARTIFACT_VERSION,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcisedSample {
    pub spectra: Vec<EigenphaseSpectrum>,
    pub summary: SampleSummary,
}

/// Draws Haar `SO(2N)` matrices until `count` of them satisfy
/// `log Λ_A(1, N) ≥ 𝒳`.
pub fn sample_excised(spec: ExcisionSpec, count: u64, seed: u64) -> Result<ExcisedSample> {
    sample_excised_with(spec, count, seed, SamplingOptions::default())
}

pub fn sample_excised_with(
    spec: ExcisionSpec,
    count: u64,
    seed: u64,
    opts: SamplingOptions,
) -> Result<ExcisedSample> {
    if count == 0 {
        return Err(Error::domain("count must be at least 1"));
    }
    let spec = ExcisionSpec::new(spec.n_pairs, spec.log_cutoff)?;
    let mut spectra = Vec::with_capacity(count.min(1 << 24) as usize);
    let mut in_window = 0u64;
    let mut next_chunk = 0u64;
    loop {
        // size the round from the acceptance rate so far; the output depends
        // only on chunk order, not on the round size
        let drawn = next_chunk * CHUNK_SIZE;
        let rate = if drawn == 0 {
            1.0
        } else {
            (spectra.len() as f64 / drawn as f64).max(1.0 / drawn as f64)
        };
        let need = (count - spectra.len() as u64) as f64 / rate / CHUNK_SIZE as f64;
        let round_chunks = (need.ceil() as u64).clamp(1, MAX_ROUND_CHUNKS);
        let round: Vec<Vec<(u64, EigenphaseSpectrum)>> = (next_chunk..next_chunk + round_chunks)
            .into_par_iter()
            .map(|c| accepted_in_chunk(&spec, seed, c))
            .collect::<Result<_>>()?;
        for (c, hits) in (next_chunk..).zip(round) {
            for (i, s) in hits {
                let index = c * CHUNK_SIZE + i;
                if index < FLOOR_WINDOW {
                    in_window += 1;
                }
                spectra.push(s);
                if spectra.len() as u64 == count {
                    let summary = SampleSummary::new(index + 1, &spectra);
                    return Ok(ExcisedSample { spectra, summary });
                }
            }
            let drawn = (c + 1) * CHUNK_SIZE;
            if drawn >= FLOOR_WINDOW && drawn - CHUNK_SIZE < FLOOR_WINDOW {
                let rate = in_window as f64 / FLOOR_WINDOW as f64;
                if rate < opts.acceptance_floor {
                    return Err(Error::domain(format!(
                        "acceptance rate {rate:e} over the first {FLOOR_WINDOW} draws is below \
                         the floor {:e} (N = {}, log-cutoff = {})",
                        opts.acceptance_floor, spec.n_pairs, spec.log_cutoff
                    )));
                }
            }
        }
        next_chunk += round_chunks;
    }
}

fn accepted_in_chunk(
    spec: &ExcisionSpec,
    seed: u64,
    chunk: u64,
) -> Result<Vec<(u64, EigenphaseSpectrum)>> {
    let mut rng = chunk_rng(seed, chunk);
    let mut out = Vec::new();
    for i in 0..CHUNK_SIZE {
        let s = eigenphases(&sample_so2n_with(spec.n_pairs, &mut rng)?)?;
        if spec.accepts(&s) {
            out.push((i, s));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HistogramMode {
    Counts,
    Pdf,
    Cdf,
}

/// Binned samples. Counts are kept as integers; [`Histogram::values`]
/// converts them according to the mode.
///
/// In pdf mode the densities integrate to `mass` (1 for a probability
/// density, `N` for a one-level density). In cdf mode each value is the
/// fraction of in-range samples up to the bin's right edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    mode: HistogramMode,
    scale_factor: f64,
    mass: f64,
    outside: u64,
}

/// `bins + 1` evenly spaced edges on `[lo, hi]`.
pub fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Result<Vec<f64>> {
    if bins == 0 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(format!(
            "need bins ≥ 1 and lo < hi, got {bins} bins on [{lo}, {hi}]"
        )));
    }
    let w = (hi - lo) / bins as f64;
    let mut e: Vec<f64> = (0..bins).map(|k| lo + w * k as f64).collect();
    e.push(hi);
    Ok(e)
}

/// [`DEFAULT_BINS`] bins on `[0, π·scale]`.
pub fn default_edges(scale: f64) -> Result<Vec<f64>> {
    uniform_edges(0.0, PI * scale, DEFAULT_BINS)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn evenly_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

impl Histogram {
    pub fn new(edges: Vec<f64>, mode: HistogramMode, scale_factor: f64, mass: f64) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("bin edges must be strictly ascending, at least two"));
        }
        if !(scale_factor > 0.0 && scale_factor.is_finite()) || !(mass > 0.0) {
            return Err(Error::domain("scale factor and mass must be positive"));
        }
        let bins = edges.len() - 1;
        Ok(Self {
            edges,
            counts: vec![0; bins],
            mode,
            scale_factor,
            mass,
            outside: 0,
        })
    }

    /// Histogram of raw values (already scaled), e.g. loaded from a file.
    pub fn from_values(values: &[f64], edges: Vec<f64>, mode: HistogramMode) -> Result<Self> {
        let mut h = Self::new(edges, mode, 1.0, 1.0)?;
        for &v in values {
            h.add(v);
        }
        Ok(h)
    }

    /// Bins `value`; the right edge belongs to the last bin.
    pub fn add(&mut self, value: f64) {
        let (lo, hi) = (self.edges[0], *self.edges.last().unwrap());
        if !(value >= lo && value <= hi) {
            self.outside += 1;
            return;
        }
        let bins = self.counts.len();
        let k = self.edges.partition_point(|e| *e <= value);
        self.counts[k.clamp(1, bins) - 1] += 1;
    }

    /// Adds the counts of `other`, which must share edges, mode, scale and mass.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.edges != other.edges
            || self.mode != other.mode
            || self.scale_factor != other.scale_factor
            || self.mass != other.mass
        {
            return Err(Error::domain("histograms with different layouts cannot be merged"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.outside += other.outside;
        Ok(())
    }

    pub fn with_mode(mut self, mode: HistogramMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn mode(&self) -> HistogramMode {
        self.mode
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale_factor
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Samples that fell outside the edges.
    pub fn outside(&self) -> u64 {
        self.outside
    }

    /// In-range samples.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    fn width(&self, k: usize) -> f64 {
        self.edges[k + 1] - self.edges[k]
    }

    /// Per-bin values in the current mode.
    pub fn values(&self) -> Vec<f64> {
        let total = self.total() as f64;
        match self.mode {
            HistogramMode::Counts => self.counts.iter().map(|&c| c as f64).collect(),
            HistogramMode::Pdf => (0..self.bins())
                .map(|k| self.mass * self.counts[k] as f64 / (total * self.width(k)))
                .collect(),
            HistogramMode::Cdf => {
                let mut acc = 0u64;
                self.counts
                    .iter()
                    .map(|&c| {
                        acc += c;
                        acc as f64 / total
                    })
                    .collect()
            }
        }
    }

    /// `Σ density · width` of the pdf-mode values.
    pub fn integral(&self) -> f64 {
        let pdf = self.clone().with_mode(HistogramMode::Pdf).values();
        pdf.iter().enumerate().map(|(k, d)| d * self.width(k)).sum()
    }

    /// Smallest interval holding every nonempty bin.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.counts.iter().position(|&c| c > 0)?;
        let last = self.counts.iter().rposition(|&c| c > 0)?;
        Some((self.edges[first], self.edges[last + 1]))
    }

    /// Empirical CDF, linear inside each bin, `0` left and `1` right of the edges.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let total = self.total();
        if total == 0 || x <= self.edges[0] {
            return 0.0;
        }
        if x >= *self.edges.last().unwrap() {
            return 1.0;
        }
        let k = self.edges.partition_point(|e| *e <= x) - 1;
        let below: u64 = self.counts[..k].iter().sum();
        let frac = (x - self.edges[k]) / self.width(k);
        (below as f64 + frac * self.counts[k] as f64) / total as f64
    }

    /// CSV with header `bin_left,bin_right,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "bin_left,bin_right,value")?;
        for (k, v) in self.values().iter().enumerate() {
            writeln!(w, "{},{},{}", self.edges[k], self.edges[k + 1], v)?;
        }
        Ok(())
    }
}

fn nonempty<'a, I>(stream: I) -> Result<std::iter::Peekable<I::IntoIter>>
where
    I: IntoIterator<Item = &'a EigenphaseSpectrum>,
{
    let mut it = stream.into_iter().peekable();
    if it.peek().is_none() {
        return Err(Error::domain("empty stream of spectra"));
    }
    Ok(it)
}

/// Pdf-mode histogram of `scale · min(θ)`.
pub fn first_eigenvalue_distribution<'a, I>(stream: I, edges: Vec<f64>, scale: f64) -> Result<Histogram>
where
    I: IntoIterator<Item = &'a EigenphaseSpectrum>,
{
    let it = nonempty(stream)?;
    let mut h = Histogram::new(edges, HistogramMode::Pdf, scale, 1.0)?;
    for s in it {
        h.add(scale * s.first());
    }
    Ok(h)
}

/// Pdf-mode histogram of all phases, normalized to integrate to `N`.
pub fn empirical_one_level_density<'a, I>(stream: I, edges: Vec<f64>) -> Result<Histogram>
where
    I: IntoIterator<Item = &'a EigenphaseSpectrum>,
{
    empirical_one_level_density_scaled(stream, edges, 1.0)
}

/// As [`empirical_one_level_density`], with the phases multiplied by `scale`.
pub fn empirical_one_level_density_scaled<'a, I>(
    stream: I,
    edges: Vec<f64>,
    scale: f64,
) -> Result<Histogram>
where
    I: IntoIterator<Item = &'a EigenphaseSpectrum>,
{
    let mut it = nonempty(stream)?;
    let n = it.peek().unwrap().n_pairs();
    let mut h = Histogram::new(edges, HistogramMode::Pdf, scale, n as f64)?;
    for s in it {
        if s.n_pairs() != n {
            return Err(Error::domain("spectra of different sizes in one stream"));
        }
        for t in s.phases() {
            h.add(scale * t);
        }
    }
    Ok(h)
}

/// Mean over `grid` of `|CDF_a - CDF_b|`.
///
/// Fails when the two supports are disjoint with a gap between them, or
/// either histogram is empty.
pub fn cdf_distance(a: &Histogram, b: &Histogram, grid: &[f64]) -> Result<f64> {
    let (sa, sb) = match (a.support(), b.support()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::domain("cdf_distance of an empty histogram")),
    };
    if sa.1 < sb.0 || sb.1 < sa.0 {
        return Err(Error::domain(format!(
            "disjoint supports [{}, {}] and [{}, {}]",
            sa.0, sa.1, sb.0, sb.1
        )));
    }
    if grid.is_empty() {
        return Err(Error::domain("empty comparison grid"));
    }
    let s: f64 = grid.iter().map(|&x| (a.cdf_at(x) - b.cdf_at(x)).abs()).sum();
    Ok(s / grid.len() as f64)
}

/// [`DEFAULT_GRID_POINTS`] points spanning the support of `reference`.
pub fn default_grid(reference: &Histogram) -> Result<Vec<f64>> {
    let (lo, hi) = reference
        .support()
        .ok_or_else(|| Error::domain("reference histogram is empty"))?;
    Ok(evenly_spaced(lo, hi, DEFAULT_GRID_POINTS))
}

/// Reads one number per line. A first line that does not parse is taken
/// as a header; blank lines are skipped.
pub fn load_samples_csv<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ if i == 0 => continue,
            _ => {
                return Err(Error::domain(format!(
                    "line {}: '{field}' is not a finite number",
                    i + 1
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::domain("no samples in input"));
    }
    Ok(out)
}
