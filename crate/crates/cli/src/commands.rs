use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use pfunctional::filters::tri;
use pfunctional::parametric::{SingleTimeFunctional, TwoTimeFunctional};
use pfunctional::sampling::{generate_samples_with, read_samples, reconstruct_grid, write_samples, PhaseMode};
use pfunctional::trapped_ion::scan_delta_phi;
use pfunctional::{Axis, DetectionConfig, IonParams, ParametricParams, PhaseSpaceGrid};

use crate::manifest::RunManifest;
use crate::CliError;

type CmdResult<T> = std::result::Result<T, CliError>;

const DEFAULT_RATIO: f64 = 10.0 / PI;

#[derive(Debug, Parser)]
#[command(name = "pfunctional", version, about = "Regularized multitime P functionals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangular filter times a rising exponential, tri(x/w)·exp(|x|^m).
    FilterDemo(FilterDemoArgs),
    /// Single-time filtered P function along Re α for each requested time.
    ParametricSingle(SingleArgs),
    /// Two-time filtered P functional over (Re α₁, Re α₂).
    ParametricTwoTime(TwoTimeArgs),
    /// ΔΦ of the trapped ion over (φ, τ).
    IonScan(IonScanArgs),
    /// Synthetic correlated homodyne events.
    Sample(SampleArgs),
    /// Pattern-function reconstruction from a sample file.
    Reconstruct(ReconstructArgs),
    /// Re-run a command from its manifest.
    Replay {
        /// Path to a `.manifest.json` file.
        manifest: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct FilterDemoArgs {
    #[arg(long, default_value_t = 1.0)]
    pub w: f64,
    /// Exponent(s) of the rising function; each of 2, 4, 6.
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 4, 6])]
    pub m: Vec<u32>,
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    /// Half-width of the x range.
    #[arg(long, default_value_t = 1.5)]
    pub extent: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SingleArgs {
    /// Mismatch ratio δ/κ.
    #[arg(long, default_value_t = DEFAULT_RATIO)]
    pub r: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.2, 0.4, 0.6])]
    pub tau: Vec<f64>,
    #[arg(long, default_value_t = 2.3)]
    pub w: f64,
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    /// Half-width of the Re α range.
    #[arg(long, default_value_t = 4.0)]
    pub extent: f64,
    /// Fixed Im α of the cross section.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub im: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TwoTimeArgs {
    #[arg(long, default_value_t = DEFAULT_RATIO)]
    pub r: f64,
    #[arg(long, default_value_t = 0.1)]
    pub tau1: f64,
    #[arg(long, default_value_t = 0.45)]
    pub tau2: f64,
    #[arg(long, default_value_t = 2.9)]
    pub w: f64,
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    #[arg(long, default_value_t = 3.0)]
    pub extent: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IonScanArgs {
    /// Fock input state |p⟩.
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    /// Lamb-Dicke parameter.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Common modulus |β₁| = |β₂|.
    #[arg(long, default_value_t = 1.3)]
    pub beta: f64,
    #[arg(long, default_value_t = IonParams::DEFAULT_CUTOFF)]
    pub cutoff: usize,
    /// Points per axis; φ covers [0, 2π), τ covers (0, tau-max].
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, default_value_t = 2.0)]
    pub tau_max: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value_t = DEFAULT_RATIO)]
    pub r: f64,
    #[arg(long, default_value_t = 0.1)]
    pub tau1: f64,
    #[arg(long, default_value_t = 0.45)]
    pub tau2: f64,
    /// Efficiency of the first homodyne detector.
    #[arg(long, default_value_t = 0.9)]
    pub eta_det: f64,
    /// Efficiency of the second detector; defaults to `--eta-det`.
    #[arg(long)]
    pub eta_det2: Option<f64>,
    /// Local-oscillator amplitude.
    #[arg(long = "R", default_value_t = 1.0)]
    pub r_lo: f64,
    /// Number of events.
    #[arg(long = "M", default_value_t = 100_000)]
    pub m: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Use an n×n grid of fixed phases instead of continuous phases.
    #[arg(long)]
    pub phase_grid: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Sample CSV written by `sample`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.9)]
    pub w: f64,
    /// Points per α axis.
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
    /// Half-width of the Re α₁, Re α₂ range.
    #[arg(long, default_value_t = 1.0)]
    pub extent: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli, argv: &[String]) -> CmdResult<()> {
    match cli.command {
        Command::FilterDemo(a) => filter_demo(a, argv),
        Command::ParametricSingle(a) => parametric_single(a, argv),
        Command::ParametricTwoTime(a) => parametric_two_time(a, argv),
        Command::IonScan(a) => ion_scan(a, argv),
        Command::Sample(a) => sample(a, argv),
        Command::Reconstruct(a) => reconstruct(a, argv),
        Command::Replay { manifest } => replay(&manifest),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_grid(n: usize, min: usize) -> CmdResult<()> {
    if n < min {
        return Err(usage(format!("--grid must be >= {min}, got {n}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> CmdResult<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(usage(format!("--{name} must be > 0, got {x}")));
    }
    Ok(())
}

/// `dir/stem_<label>.ext` for commands writing one file per value.
fn suffixed(out: &Path, label: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{label}"),
    };
    out.with_file_name(name)
}

fn finish(mut manifest: RunManifest, out: &Path, outputs: Vec<PathBuf>, start: Instant) -> CmdResult<()> {
    manifest.finish(outputs, start.elapsed());
    let path = manifest.write(out)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn filter_demo(a: FilterDemoArgs, argv: &[String]) -> CmdResult<()> {
    let start = Instant::now();
    check_positive("w", a.w)?;
    check_positive("extent", a.extent)?;
    check_grid(a.grid, 2)?;
    if a.m.is_empty() || a.m.iter().any(|m| ![2, 4, 6].contains(m)) {
        return Err(usage(format!("--m values must be 2, 4 or 6, got {:?}", a.m)));
    }
    let mut outputs = Vec::new();
    for &m in &a.m {
        let axis = Axis::new("x", -a.extent, a.extent, a.grid)?;
        let grid = PhaseSpaceGrid::from_fn(vec![axis], |c| Ok(tri(c[0] / a.w) * c[0].abs().powi(m as i32).exp()))?
            .with_meta("w", a.w)
            .with_meta("m", m);
        let path = if a.m.len() == 1 { a.out.clone() } else { suffixed(&a.out, &format!("m{m}")) };
        grid.write_csv(&path)?;
        outputs.push(path);
    }
    let params = json!({ "w": a.w, "m": a.m, "grid": a.grid, "extent": a.extent });
    finish(RunManifest::new("filter-demo", params, None, argv), &a.out, outputs, start)
}

fn parametric_single(a: SingleArgs, argv: &[String]) -> CmdResult<()> {
    let start = Instant::now();
    check_positive("extent", a.extent)?;
    check_grid(a.grid, 2)?;
    if a.tau.is_empty() {
        return Err(usage("--tau needs at least one value"));
    }
    let p = ParametricParams::from_ratio(a.r)?;
    let mut outputs = Vec::new();
    for &tau in &a.tau {
        let f = SingleTimeFunctional::new(&p, tau, a.w)?;
        let axis = Axis::new("re_alpha", -a.extent, a.extent, a.grid)?;
        let grid = PhaseSpaceGrid::from_fn(vec![axis], |c| f.eval(Complex64::new(c[0], a.im)))?
            .with_meta("r", a.r)
            .with_meta("tau", tau)
            .with_meta("w", a.w)
            .with_meta("im_alpha", a.im);
        let path = if a.tau.len() == 1 { a.out.clone() } else { suffixed(&a.out, &format!("tau{tau}")) };
        grid.write_csv(&path)?;
        eprintln!("tau={tau}: min {} max {}", grid.min(), grid.max());
        outputs.push(path);
    }
    let params = json!({ "r": a.r, "tau": a.tau, "w": a.w, "grid": a.grid, "extent": a.extent, "im_alpha": a.im });
    finish(RunManifest::new("parametric-single", params, None, argv), &a.out, outputs, start)
}

fn parametric_two_time(a: TwoTimeArgs, argv: &[String]) -> CmdResult<()> {
    let start = Instant::now();
    check_positive("extent", a.extent)?;
    check_grid(a.grid, 2)?;
    let p = ParametricParams::from_ratio(a.r)?;
    let f = TwoTimeFunctional::new(&p, a.tau1, a.tau2, a.w)?;
    let axes = vec![
        Axis::new("re_alpha1", -a.extent, a.extent, a.grid)?,
        Axis::new("re_alpha2", -a.extent, a.extent, a.grid)?,
    ];
    let grid = PhaseSpaceGrid::from_fn(axes, |c| f.eval(Complex64::new(c[0], 0.0), Complex64::new(c[1], 0.0)))?;
    grid.write_csv(&a.out)?;
    eprintln!("min {} max {}", grid.min(), grid.max());
    let params = json!({ "r": a.r, "tau1": a.tau1, "tau2": a.tau2, "w": a.w, "grid": a.grid, "extent": a.extent });
    finish(RunManifest::new("parametric-two-time", params, None, argv), &a.out, vec![a.out.clone()], start)
}

fn ion_scan(a: IonScanArgs, argv: &[String]) -> CmdResult<()> {
    let start = Instant::now();
    check_grid(a.grid, 2)?;
    check_positive("tau-max", a.tau_max)?;
    if !(a.beta.is_finite() && a.beta >= 0.0) {
        return Err(usage(format!("--beta must be >= 0, got {}", a.beta)));
    }
    let params = IonParams::new(1.0, a.eta, a.cutoff)?;
    let n = a.grid;
    let phi_axis = Axis::new("phi", 0.0, 2.0 * PI * (n - 1) as f64 / n as f64, n)?;
    let tau_axis = Axis::new("tau", a.tau_max / n as f64, a.tau_max, n)?;
    let values = scan_delta_phi(&params, a.p, a.beta, &phi_axis.points(), &tau_axis.points())?;
    let grid = PhaseSpaceGrid::new(vec![phi_axis, tau_axis], values)?;
    grid.write_csv(&a.out)?;
    eprintln!("max delta_phi {}", grid.max());
    let params = json!({
        "p": a.p, "eta": a.eta, "beta": a.beta, "cutoff": a.cutoff, "grid": a.grid, "tau_max": a.tau_max
    });
    finish(RunManifest::new("ion-scan", params, None, argv), &a.out, vec![a.out.clone()], start)
}

fn sample(a: SampleArgs, argv: &[String]) -> CmdResult<()> {
    let start = Instant::now();
    let p = ParametricParams::from_ratio(a.r)?;
    let eta2 = a.eta_det2.unwrap_or(a.eta_det);
    let cfg = DetectionConfig::new(a.eta_det, eta2, a.r_lo, a.tau1, a.tau2)?;
    let mode = match a.phase_grid {
        Some(steps) => PhaseMode::Grid { steps },
        None => PhaseMode::Continuous,
    };
    let set = generate_samples_with(&p, &cfg, a.m, a.seed, mode)?;
    write_samples(&set, &a.out)?;
    let params = json!({
        "r": a.r, "tau1": a.tau1, "tau2": a.tau2, "eta": a.eta_det, "eta_prime": eta2,
        "R": a.r_lo, "M": a.m, "phase_grid": a.phase_grid
    });
    let outputs = vec![a.out.clone(), pfunctional::sampling::meta_path(&a.out)];
    finish(RunManifest::new("sample", params, Some(a.seed), argv), &a.out, outputs, start)
}

fn reconstruct(a: ReconstructArgs, argv: &[String]) -> CmdResult<()> {
    let start = Instant::now();
    check_grid(a.grid, 1)?;
    if !(a.extent.is_finite() && a.extent >= 0.0) {
        return Err(usage(format!("--extent must be >= 0, got {}", a.extent)));
    }
    let set = read_samples(&a.input)?;
    let axis = Axis::new("re_alpha", -a.extent, a.extent, a.grid)?;
    let alphas: Vec<Complex64> = axis.points().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    let results = reconstruct_grid(&set, &alphas, &alphas, a.w)?;
    let mut out = BufWriter::new(File::create(&a.out)?);
    writeln!(out, "re_alpha1,re_alpha2,estimate,std_error,imag_mean")?;
    let rows: Vec<String> = results
        .par_iter()
        .enumerate()
        .map(|(k, r)| {
            let (i, j) = (k / alphas.len(), k % alphas.len());
            format!("{},{},{},{},{}", alphas[i].re, alphas[j].re, r.estimate, r.std_error, r.imag_mean)
        })
        .collect();
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    let params = json!({
        "input": a.input, "w": a.w, "grid": a.grid, "extent": a.extent, "M": set.len()
    });
    finish(RunManifest::new("reconstruct", params, Some(set.seed), argv), &a.out, vec![a.out.clone()], start)
}

fn replay(path: &Path) -> CmdResult<()> {
    let manifest = RunManifest::read(path)?;
    let mut argv = vec!["pfunctional".to_string()];
    argv.extend(manifest.argv.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| usage(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(usage("a manifest cannot replay another replay"));
    }
    run(cli, &argv)
}
