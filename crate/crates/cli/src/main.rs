//! `excised`: sampling, analytic densities and calibration from the shell.
//!
//! Exit status is 0 on success, 1 on a domain or numerical error, 2 on a
//! usage, configuration or I/O error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use excised::analytic::{
    moments_so2n, r1_excised_line_integral, theta_inf, DensityGrid, ExcisedDensity, LINE_ABSCISSA,
};
use excised::curve_model::{
    a_s_truncated, ap_table, delta_from_vanishing_constant, CurveFamilyParams, CutoffReport,
};
use excised::ensemble::{
    cdf_distance, default_grid, evenly_spaced, load_samples_csv, sample_excised_with,
    uniform_edges, ExcisionSpec, Histogram, HistogramMode, SamplingOptions,
    DEFAULT_ACCEPTANCE_FLOOR, DEFAULT_BINS, DEFAULT_GRID_POINTS,
};
use excised::haar::{sample_spectra, write_spectra_csv};
use excised::{Complex, Error, ARTIFACT_VERSION};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "excised", version, about = "Excised SO(2N) ensembles: sampling, densities, calibration")]
struct Cli {
    /// Worker threads for sampling and grid evaluation (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Sample the excised ensemble and bin all eigenphases (one-level density).
    Sample(SampleArgs),
    /// Analytic one-level density of the excised ensemble on a θ grid.
    Density(DensityArgs),
    /// Sample the excised ensemble and bin the lowest eigenphase.
    FirstEigenvalue(SampleArgs),
    /// Moments E[Λ_A(1,N)^s] over SO(2N), optionally with a Monte Carlo estimate.
    Moments(MomentsArgs),
    /// Matrix sizes and cutoff constants for a curve family.
    Cutoff(CutoffArgs),
    /// a_p by point counting, optionally with the Euler product a_s(E).
    ApCount(ApCountArgs),
    /// CDF distance between two one-column sample files.
    Compare(CompareArgs),
}

#[derive(Args, Debug, Serialize)]
struct CutoffFlags {
    /// Linear cutoff e^X on |Λ_A(1,N)|.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Log-scale cutoff X; wins over --cutoff.
    #[arg(long, allow_hyphen_values = true)]
    cutoff_log: Option<f64>,
}

impl CutoffFlags {
    fn log_cutoff(&self) -> Result<Option<f64>, Failure> {
        match (self.cutoff_log, self.cutoff) {
            (Some(x), _) => Ok(Some(x)),
            (None, Some(c)) if c > 0.0 => Ok(Some(c.ln())),
            (None, Some(c)) => Err(Failure::usage(format!("--cutoff must be positive, got {c}"))),
            (None, None) => Ok(None),
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct OutputFlags {
    /// Main output (CSV or JSON); stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// JSON run summary; defaults to <output>.json, or stderr without --output.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
enum AngleScale {
    /// Radians only.
    Raw,
    /// Add a column θN/π.
    MeanDensity,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    /// Matrix half-size N.
    #[arg(long)]
    n: usize,
    /// Accepted samples to collect.
    #[arg(long)]
    count: u64,
    #[command(flatten)]
    #[serde(flatten)]
    cutoff: CutoffFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Factor applied to sample values before binning (mean matching).
    #[arg(long, default_value_t = 1.0)]
    scale_factor: f64,
    #[arg(long, value_enum, default_value_t = AngleScale::Raw)]
    scale: AngleScale,
    /// Abort if fewer than this fraction of the first 10^5 draws is accepted.
    #[arg(long, default_value_t = DEFAULT_ACCEPTANCE_FLOOR)]
    acceptance_floor: f64,
    /// Also dump every accepted spectrum to this CSV.
    #[arg(long)]
    spectra: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputFlags,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
enum DensityMethod {
    /// Residue series with K poles plus the exact remainder.
    Residue,
    /// Quadrature along Re r = 1/2.
    Line,
}

#[derive(Args, Debug, Serialize)]
struct DensityArgs {
    /// Matrix half-size N; non-integers are rounded.
    #[arg(long)]
    n: f64,
    #[command(flatten)]
    #[serde(flatten)]
    cutoff: CutoffFlags,
    /// Number of θ points (cell midpoints on [0, π]).
    #[arg(long, default_value_t = 500)]
    grid: usize,
    /// Half-integer poles K summed before the remainder.
    #[arg(long, default_value_t = 10)]
    poles: usize,
    #[arg(long, value_enum, default_value_t = DensityMethod::Residue)]
    method: DensityMethod,
    /// Height cap for --method line.
    #[arg(long, default_value_t = 1e5)]
    max_height: f64,
    #[arg(long, value_enum, default_value_t = AngleScale::Raw)]
    scale: AngleScale,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputFlags,
}

#[derive(Args, Debug, Serialize)]
struct MomentsArgs {
    #[arg(long)]
    n: usize,
    /// Exponent s > -1/2.
    #[arg(long, allow_hyphen_values = true)]
    s: f64,
    /// Also estimate the moment from this many Haar samples.
    #[arg(long)]
    mc_count: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputFlags,
}

#[derive(Args, Debug, Serialize)]
struct CurveFlags {
    /// Flat key = value curve config; the bundled E11 family when absent.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CurveFlags {
    fn load(&self) -> Result<CurveFamilyParams, Failure> {
        match &self.config {
            Some(p) => Ok(CurveFamilyParams::load(p)?),
            None => Ok(CurveFamilyParams::e11()),
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct CutoffArgs {
    #[command(flatten)]
    #[serde(flatten)]
    curve: CurveFlags,
    /// Discriminant bound X; defaults to X_bound from the config.
    #[arg(long)]
    x: Option<f64>,
    /// Observed plateau of the normalized vanishing count, to derive δ from.
    #[arg(long)]
    observed: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputFlags,
}

#[derive(Args, Debug, Serialize)]
struct ApCountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    curve: CurveFlags,
    #[arg(long, default_value_t = 100)]
    p_max: u64,
    /// Also evaluate the truncated Euler product a_s(E) at this s.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputFlags,
}

#[derive(Args, Debug, Serialize)]
struct CompareArgs {
    /// Reference samples (one number per line); the grid spans their support.
    #[arg(long)]
    a: PathBuf,
    /// Samples to compare against the reference.
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Histogram range; defaults to the range of both samples.
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputFlags,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Io(_) | Error::Json(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_json(path: Option<&Path>, v: &Value) -> Outcome {
    let mut w = open_output(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes the run summary next to the main output, or to stderr.
fn write_summary(out: &OutputFlags, v: &Value) -> Outcome {
    let path = out.summary.clone().or_else(|| {
        out.output.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".json");
            PathBuf::from(s)
        })
    });
    match path {
        Some(p) => write_json(Some(&p), v),
        None => {
            let mut e = io::stderr().lock();
            serde_json::to_writer_pretty(&mut e, v).map_err(Error::from)?;
            writeln!(e)?;
            Ok(())
        }
    }
}

/// `extra` plus the command name, its parameters and the artifact version.
fn record(command: &Command, extra: Value) -> Value {
    let tagged = serde_json::to_value(command).expect("flags serialize");
    let (name, params) = tagged
        .as_object()
        .and_then(|o| o.iter().next())
        .map(|(k, v)| (k.clone(), v.clone()))
        .expect("externally tagged enum");
    let mut v = extra;
    v["command"] = name.into();
    v["parameters"] = params;
    v["version"] = ARTIFACT_VERSION.into();
    v
}

fn write_histogram(w: &mut dyn Write, h: &Histogram, n: usize, scale: AngleScale) -> Outcome {
    let values = h.values();
    let e = h.edges();
    let s = n as f64 / PI;
    if scale == AngleScale::MeanDensity {
        writeln!(w, "bin_left,bin_right,value,bin_left_scaled,bin_right_scaled")?;
        for (k, v) in values.iter().enumerate() {
            writeln!(w, "{},{},{},{},{}", e[k], e[k + 1], v, e[k] * s, e[k + 1] * s)?;
        }
    } else {
        h.write_csv(&mut *w)?;
    }
    w.flush()?;
    Ok(())
}

fn run_sampling(cmd: &Command, a: &SampleArgs, first: bool) -> Outcome {
    let log_cutoff = a.cutoff.log_cutoff()?.unwrap_or(f64::NEG_INFINITY);
    let spec = ExcisionSpec::new(a.n, log_cutoff)?;
    let opts = SamplingOptions {
        acceptance_floor: a.acceptance_floor,
    };
    let sample = sample_excised_with(spec, a.count, a.seed, opts)?;
    let edges = uniform_edges(0.0, PI * a.scale_factor, a.bins)?;
    let h = if first {
        excised::ensemble::first_eigenvalue_distribution(&sample.spectra, edges, a.scale_factor)?
    } else {
        excised::ensemble::empirical_one_level_density_scaled(&sample.spectra, edges, a.scale_factor)?
    };
    let mut w = open_output(a.out.output.as_deref())?;
    write_histogram(&mut *w, &h, a.n, a.scale)?;
    if let Some(p) = &a.spectra {
        let mut sw = open_output(Some(p))?;
        write_spectra_csv(&mut sw, &sample.spectra)?;
        sw.flush()?;
    }
    let mut summary = sample.summary.to_json(&spec, a.seed);
    summary["theta_inf"] = spec.theta_inf().into();
    summary["histogram_integral"] = h.integral().into();
    write_summary(&a.out, &record(cmd, summary))
}

fn run_density(cmd: &Command, a: &DensityArgs) -> Outcome {
    if !(a.n >= 0.5) {
        return Err(Failure::usage(format!("--n must be at least 1, got {}", a.n)));
    }
    let n = a.n.round() as usize;
    let log_cutoff = a
        .cutoff
        .log_cutoff()?
        .ok_or_else(|| Failure::usage("density needs --cutoff or --cutoff-log"))?;
    if a.grid == 0 {
        return Err(Failure::usage("--grid must be positive"));
    }
    let thetas: Vec<f64> = (0..a.grid)
        .map(|k| PI * (k as f64 + 0.5) / a.grid as f64)
        .collect();
    let gap = theta_inf(n, log_cutoff)?;
    let mut summary = json!({
        "n_pairs": n,
        "log_cutoff": log_cutoff,
        "theta_inf": gap,
        "method": a.method,
    });
    let grid = match a.method {
        DensityMethod::Residue => {
            let d = ExcisedDensity::new(n, log_cutoff, a.poles)?;
            let vals = d.evaluate_many(&thetas)?;
            summary["acceptance_probability"] = d.normalization().value.into();
            summary["c_x"] = d.c_x().into();
            summary["poles"] = a.poles.into();
            summary["series_warnings"] = vals.iter().filter(|v| v.warning).count().into();
            DensityGrid::new(n, log_cutoff, thetas, vals.iter().map(|v| v.value).collect())?
        }
        DensityMethod::Line => {
            let vals = thetas
                .par_iter()
                .map(|&t| {
                    if t <= gap {
                        return Ok(0.0);
                    }
                    Ok(r1_excised_line_integral(n, log_cutoff, t, LINE_ABSCISSA, a.max_height)?.value)
                })
                .collect::<Result<Vec<f64>, Error>>()?;
            DensityGrid::new(n, log_cutoff, thetas, vals)?
        }
    };
    let mut w = open_output(a.out.output.as_deref())?;
    grid.write_csv(&mut w, a.scale == AngleScale::MeanDensity)?;
    w.flush()?;
    write_summary(&a.out, &record(cmd, summary))
}

fn run_moments(cmd: &Command, a: &MomentsArgs) -> Outcome {
    let m = moments_so2n(a.n, Complex::new(a.s, 0.0))?;
    let mut v = json!({ "n_pairs": a.n, "s": a.s, "moment": m.re, "seed": a.seed });
    if let Some(count) = a.mc_count {
        if count < 2 {
            return Err(Failure::usage("--mc-count must be at least 2"));
        }
        let spectra = sample_spectra(a.n, count, a.seed)?;
        let xs: Vec<f64> = spectra.iter().map(|s| (a.s * s.log_lambda()).exp()).collect();
        let mean = xs.iter().sum::<f64>() / count as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        v["mc_mean"] = mean.into();
        v["mc_stderr"] = (var / count as f64).sqrt().into();
    }
    write_json(a.out.output.as_deref(), &record(cmd, v))
}

fn run_cutoff(cmd: &Command, a: &CutoffArgs) -> Outcome {
    let params = a.curve.load()?;
    let x = a
        .x
        .or(params.x_bound)
        .ok_or_else(|| Failure::usage("no --x given and the config has no X_bound"))?;
    if !(x > 0.0) {
        return Err(Failure::usage(format!("--x must be positive, got {x}")));
    }
    let mut v = CutoffReport::new(&params, x).to_json();
    if let Some(obs) = a.observed {
        v["delta_from_observed"] = delta_from_vanishing_constant(obs)?.into();
    }
    write_json(a.out.output.as_deref(), &record(cmd, v))
}

fn run_ap_count(cmd: &Command, a: &ApCountArgs) -> Outcome {
    let params = a.curve.load()?;
    if a.p_max < 2 {
        return Err(Failure::usage("--p-max must be at least 2"));
    }
    let table = ap_table(&params.weierstrass, a.p_max)?;
    let mut w = open_output(a.out.output.as_deref())?;
    writeln!(w, "p,a_p,lambda_p")?;
    for (p, ap) in &table {
        writeln!(w, "{},{},{}", p, ap, *ap as f64 / (*p as f64).sqrt())?;
    }
    w.flush()?;
    let mut v = json!({ "conductor": params.conductor, "primes": table.len() });
    if let Some(s) = a.s {
        let e = a_s_truncated(&params.weierstrass, params.conductor, params.omega, s, a.p_max)?;
        v["euler_product"] = serde_json::to_value(e).map_err(Error::from)?;
    }
    write_summary(&a.out, &record(cmd, v))
}

fn read_samples(p: &Path) -> Result<Vec<f64>, Failure> {
    let f = File::open(p).map_err(|e| Failure::usage(format!("cannot read {}: {e}", p.display())))?;
    Ok(load_samples_csv(BufReader::new(f))?)
}

fn run_compare(cmd: &Command, a: &CompareArgs) -> Outcome {
    let (xa, xb) = (read_samples(&a.a)?, read_samples(&a.b)?);
    let all = xa.iter().chain(&xb);
    let lo = a.lo.unwrap_or_else(|| all.clone().copied().fold(f64::INFINITY, f64::min));
    let hi = a.hi.unwrap_or_else(|| all.copied().fold(f64::NEG_INFINITY, f64::max));
    let edges = uniform_edges(lo, hi, a.bins)?;
    let ha = Histogram::from_values(&xa, edges.clone(), HistogramMode::Counts)?;
    let hb = Histogram::from_values(&xb, edges, HistogramMode::Counts)?;
    let grid = if a.grid_points == DEFAULT_GRID_POINTS {
        default_grid(&ha)?
    } else {
        let (s, t) = ha.support().ok_or_else(|| Failure::usage("reference has no samples in range"))?;
        evenly_spaced(s, t, a.grid_points)
    };
    let d = cdf_distance(&ha, &hb, &grid)?;
    let v = json!({
        "distance": d,
        "samples_a": xa.len(),
        "samples_b": xb.len(),
        "outside_a": ha.outside(),
        "outside_b": hb.outside(),
        "lo": lo,
        "hi": hi,
    });
    write_json(a.out.output.as_deref(), &record(cmd, v))
}

fn run(cli: &Cli) -> Outcome {
    let cmd = &cli.command;
    match cmd {
        Command::Sample(a) => run_sampling(cmd, a, false),
        Command::FirstEigenvalue(a) => run_sampling(cmd, a, true),
        Command::Density(a) => run_density(cmd, a),
        Command::Moments(a) => run_moments(cmd, a),
        Command::Cutoff(a) => run_cutoff(cmd, a),
        Command::ApCount(a) => run_ap_count(cmd, a),
        Command::Compare(a) => run_compare(cmd, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.workers {
        Some(0) => Err(Failure::usage("--workers must be positive")),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::usage(e.to_string())),
        },
        None => run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
