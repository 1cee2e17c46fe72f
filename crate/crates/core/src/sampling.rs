//! Synthetic correlated balanced-homodyne data for the parametric process
//! and pattern-function reconstruction of the two-time filtered P functional.
//!
//! Each event consists of two photocount differences `v`, `v'` recorded at
//! local-oscillator phases `φ`, `φ'` in the strong-oscillator (Gaussian)
//! limit. With `y` conjugate to `v`, the characteristic function of the
//! difference statistics is
//!
//! ```text
//! E[e^{i(yv + y'v')}] = Φ(iyηRe^{iφ}, iy'η'Re^{iφ'}) e^{-y²R²η/2 - y'²R²η'/2},
//! ```
//!
//! so the sampled quadrature ray is `iβ e^{iφ}` with real `β`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::radial_filter;
use crate::numerics::{gauss_legendre, integrate_breaks, sample_bivariate_normal, stream_rng, QuadratureSpec};
use crate::parametric::{two_time_form, ParametricParams};

/// Events generated per random substream.
const CHUNK: usize = 1 << 14;

/// Detector efficiencies, oscillator amplitude and the two measurement
/// times (dimensionless, `τ₁ <= τ₂`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub eta: f64,
    pub eta_prime: f64,
    pub r_lo: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl DetectionConfig {
    pub fn new(eta: f64, eta_prime: f64, r_lo: f64, tau1: f64, tau2: f64) -> Result<Self> {
        for (name, e) in [("eta", eta), ("eta_prime", eta_prime)] {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1], got {e}")));
            }
        }
        if !(r_lo.is_finite() && r_lo > 0.0) {
            return Err(Error::InvalidParameter(format!("R must be > 0, got {r_lo}")));
        }
        if !(tau1.is_finite() && tau2.is_finite()) {
            return Err(Error::NonFinite("measurement times"));
        }
        if tau1 > tau2 {
            return Err(Error::TimeOrderViolation { tau1, tau2 });
        }
        Ok(Self {
            eta,
            eta_prime,
            r_lo,
            tau1,
            tau2,
        })
    }

    /// Measurement at laboratory times `t` and `t + dt`.
    pub fn from_lab_times(
        params: &ParametricParams,
        eta: f64,
        eta_prime: f64,
        r_lo: f64,
        t: f64,
        dt: f64,
    ) -> Result<Self> {
        Self::new(eta, eta_prime, r_lo, params.tau_of(t), params.tau_of(t + dt))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSample {
    pub v: f64,
    pub v_prime: f64,
    pub phi: f64,
    pub phi_prime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<QuadratureSample>,
    pub seed: u64,
    pub config: DetectionConfig,
    pub params: ParametricParams,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// How the oscillator phases are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMode {
    /// Independent uniform phases on `[0, π)` for every event.
    #[default]
    Continuous,
    /// Event `j` uses phases `(j mod n)π/n` and `(⌊j/n⌋ mod n)π/n`.
    Grid { steps: usize },
}

/// Covariance of `(v, v')` as a function of the oscillator phases.
#[derive(Debug, Clone)]
pub struct CovarianceModel {
    q: DMatrix<f64>,
    cfg: DetectionConfig,
}

impl CovarianceModel {
    pub fn new(params: &ParametricParams, cfg: &DetectionConfig) -> Result<Self> {
        let form = two_time_form(params, cfg.tau1, cfg.tau2)?;
        Ok(Self {
            q: form.matrix().clone(),
            cfg: *cfg,
        })
    }

    pub fn covariance(&self, phi: f64, phi_prime: f64) -> Result<[[f64; 2]; 2]> {
        let (s1, c1) = phi.sin_cos();
        let (s2, c2) = phi_prime.sin_cos();
        // unit vectors of the rays i e^{iφ}
        let e1 = [-s1, c1];
        let e2 = [-s2, c2];
        let block = |i: usize, j: usize, a: [f64; 2], b: [f64; 2]| {
            let mut s = 0.0;
            #[allow(clippy::needless_range_loop)]
            for k in 0..2 {
                for l in 0..2 {
                    s += a[k] * self.q[(i + k, j + l)] * b[l];
                }
            }
            s
        };
        let q11 = block(0, 0, e1, e1);
        let q22 = block(2, 2, e2, e2);
        let q12 = block(0, 2, e1, e2);
        let DetectionConfig {
            eta,
            eta_prime,
            r_lo,
            ..
        } = self.cfg;
        let r2 = r_lo * r_lo;
        let s11 = r2 * eta * (1.0 - 2.0 * eta * q11);
        let s22 = r2 * eta_prime * (1.0 - 2.0 * eta_prime * q22);
        let s12 = -2.0 * eta * eta_prime * r2 * q12;
        let scale = s11.abs().max(s22.abs());
        let det = s11 * s22 - s12 * s12;
        if s11 < 0.0 || s22 < 0.0 || det < -1e-12 * scale * scale {
            return Err(Error::NotPsd(format!(
                "difference covariance [[{s11}, {s12}], [{s12}, {s22}]] at phases ({phi}, {phi_prime})"
            )));
        }
        Ok([[s11, s12], [s12, s22]])
    }
}

/// Covariance of the difference events at phases `(φ, φ')`.
pub fn difference_covariance(
    params: &ParametricParams,
    cfg: &DetectionConfig,
    phi: f64,
    phi_prime: f64,
) -> Result<[[f64; 2]; 2]> {
    CovarianceModel::new(params, cfg)?.covariance(phi, phi_prime)
}

pub fn generate_samples(params: &ParametricParams, cfg: &DetectionConfig, m: usize, seed: u64) -> Result<SampleSet> {
    generate_samples_with(params, cfg, m, seed, PhaseMode::Continuous)
}

/// Generates `m` events. Events are produced in fixed-size chunks, chunk
/// `k` drawing from substream `k` of `seed`, so the output does not depend
/// on the number of worker threads.
pub fn generate_samples_with(
    params: &ParametricParams,
    cfg: &DetectionConfig,
    m: usize,
    seed: u64,
    mode: PhaseMode,
) -> Result<SampleSet> {
    if m == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    if let PhaseMode::Grid { steps: 0 } = mode {
        return Err(Error::InvalidParameter("phase grid needs >= 1 step".into()));
    }
    let model = CovarianceModel::new(params, cfg)?;
    let chunks = m.div_ceil(CHUNK);
    let parts: Vec<Vec<QuadratureSample>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let start = k * CHUNK;
            let end = (start + CHUNK).min(m);
            (start..end)
                .map(|j| {
                    let (phi, phi_prime) = match mode {
                        PhaseMode::Continuous => (rng.random::<f64>() * PI, rng.random::<f64>() * PI),
                        PhaseMode::Grid { steps } => {
                            let step = PI / steps as f64;
                            ((j % steps) as f64 * step, ((j / steps) % steps) as f64 * step)
                        }
                    };
                    let cov = model.covariance(phi, phi_prime)?;
                    let [v, v_prime] = sample_bivariate_normal([0.0, 0.0], cov, &mut rng)?;
                    Ok(QuadratureSample {
                        v,
                        v_prime,
                        phi,
                        phi_prime,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(SampleSet {
        samples: parts.into_iter().flatten().collect(),
        seed,
        config: *cfg,
        params: *params,
    })
}

/// Argument `s` of the pattern function: `f_Ω = (1/π)∫ |b| Ω(|b|) e^{b²/(2η) + isb} db`.
fn pattern_argument(z: f64, phi: f64, alpha: Complex64, eta_z: f64, r_lo: f64) -> f64 {
    z / (eta_z * r_lo) + 2.0 * alpha.norm() * (alpha.arg() - phi - FRAC_PI_2).sin()
}

/// Pattern function for the radial filter of width `w`, by adaptive
/// quadrature over `b ∈ [-w, w]`.
pub fn pattern_function(z: f64, phi: f64, alpha: Complex64, w: f64, eta_z: f64, r_lo: f64) -> Result<Complex64> {
    pattern_function_with(z, phi, alpha, w, eta_z, r_lo, &QuadratureSpec::default())
}

pub fn pattern_function_with(
    z: f64,
    phi: f64,
    alpha: Complex64,
    w: f64,
    eta_z: f64,
    r_lo: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::InvalidParameter(format!("filter width must be > 0, got {w}")));
    }
    let s = pattern_argument(z, phi, alpha, eta_z, r_lo);
    integrate_breaks(
        |b| {
            let amp = b.abs() / PI * radial_filter(b, w) * (b * b / (2.0 * eta_z)).exp();
            Complex64::from_polar(amp, s * b)
        },
        &[-w, 0.0, w],
        spec,
    )
}

/// Gauss-Legendre rule on `[0, w]` after `b = w sin ϑ`, which makes the
/// radial filter analytic up to the edge of its support. Returns nodes and
/// weights.
fn radial_nodes(w: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, g) = gauss_legendre(n);
    let quarter = 0.25 * PI;
    x.iter()
        .zip(&g)
        .map(|(xi, gi)| {
            let t = quarter * (xi + 1.0);
            (w * t.sin(), quarter * gi * w * t.cos())
        })
        .unzip()
}

/// Tabulation of the pattern function for fixed `w` and
/// efficiency.
///
/// The integrand at `-b` is the complex conjugate of that at `b`, so the
/// pattern function is real: `f_Ω(s) = Σₖ Wₖ cos(s bₖ)` over nodes in `(0, w)`.
#[derive(Debug, Clone)]
pub struct PatternKernel {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    eta_z: f64,
    r_lo: f64,
}

impl PatternKernel {
    pub const DEFAULT_NODES: usize = 64;

    pub fn new(w: f64, eta_z: f64, r_lo: f64) -> Result<Self> {
        Self::with_nodes(w, eta_z, r_lo, Self::DEFAULT_NODES)
    }

    pub fn with_nodes(w: f64, eta_z: f64, r_lo: f64, n: usize) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter(format!("filter width must be > 0, got {w}")));
        }
        if !(eta_z > 0.0 && r_lo > 0.0) {
            return Err(Error::InvalidParameter("efficiency and R must be > 0".into()));
        }
        let (nodes, jacobian) = radial_nodes(w, n);
        let weights = nodes
            .iter()
            .zip(&jacobian)
            .map(|(&b, &j)| 2.0 * j * b / PI * radial_filter(b, w) * (b * b / (2.0 * eta_z)).exp())
            .collect();
        Ok(Self {
            nodes,
            weights,
            eta_z,
            r_lo,
        })
    }

    pub fn eval(&self, z: f64, phi: f64, alpha: Complex64) -> f64 {
        self.eval_at(pattern_argument(z, phi, alpha, self.eta_z, self.r_lo))
    }

    fn eval_at(&self, s: f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(b, wt)| wt * (s * b).cos()).sum()
    }
}

/// Empirical estimate of the filtered P functional at one phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub estimate: f64,
    pub std_error: f64,
    /// Mean imaginary part of the summands; zero up to sampling noise.
    pub imag_mean: f64,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
    sum_imag: f64,
}

impl Moments {
    fn add(&mut self, x: Complex64) {
        self.sum += x.re;
        self.sum_sq += x.re * x.re;
        self.sum_imag += x.im;
    }

    fn merge(&mut self, o: &Moments) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.sum_imag += o.sum_imag;
    }

    fn finish(&self, m: usize) -> Reconstruction {
        let mf = m as f64;
        let mean = self.sum / mf;
        let var = ((self.sum_sq - mf * mean * mean) / (mf - 1.0)).max(0.0);
        Reconstruction {
            estimate: mean,
            std_error: (var / mf).sqrt(),
            imag_mean: self.sum_imag / mf,
        }
    }
}

fn check_reconstruction_input(samples: &SampleSet) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("reconstruction needs at least 2 samples".into()));
    }
    Ok(())
}

/// `P_Ω(α₁, α₂) ≈ (1/M) Σⱼ f_Ω(vⱼ, φⱼ; α₁) f_Ω(v'ⱼ, φ'ⱼ; α₂)` with the radial
/// filter of width `w`.
pub fn reconstruct(samples: &SampleSet, alpha1: Complex64, alpha2: Complex64, w: f64) -> Result<Reconstruction> {
    Ok(reconstruct_grid(samples, &[alpha1], &[alpha2], w)?[0])
}

/// Reconstruction on the product grid `alphas1 × alphas2` (row-major,
/// `alphas1` outer). Each event's pattern functions are evaluated once per
/// grid coordinate.
pub fn reconstruct_grid(
    samples: &SampleSet,
    alphas1: &[Complex64],
    alphas2: &[Complex64],
    w: f64,
) -> Result<Vec<Reconstruction>> {
    check_reconstruction_input(samples)?;
    let cfg = &samples.config;
    let k1 = PatternKernel::new(w, cfg.eta, cfg.r_lo)?;
    let k2 = PatternKernel::new(w, cfg.eta_prime, cfg.r_lo)?;
    let (n1, n2) = (alphas1.len(), alphas2.len());
    let partial: Vec<Vec<Moments>> = samples
        .samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![Moments::default(); n1 * n2];
            let mut f1 = vec![0.0; n1];
            let mut f2 = vec![0.0; n2];
            for s in chunk {
                for (f, a) in f1.iter_mut().zip(alphas1) {
                    *f = k1.eval(s.v, s.phi, *a);
                }
                for (f, a) in f2.iter_mut().zip(alphas2) {
                    *f = k2.eval(s.v_prime, s.phi_prime, *a);
                }
                for (i, a) in f1.iter().enumerate() {
                    for (j, b) in f2.iter().enumerate() {
                        acc[i * n2 + j].add(Complex64::new(a * b, 0.0));
                    }
                }
            }
            acc
        })
        .collect();
    Ok(merge_moments(partial, n1 * n2, samples.len()))
}

/// Same estimator with pattern functions from adaptive complex quadrature.
/// Much slower; used to check the tabulated kernel and the realness of the
/// summands.
pub fn reconstruct_adaptive(
    samples: &SampleSet,
    alpha1: Complex64,
    alpha2: Complex64,
    w: f64,
) -> Result<Reconstruction> {
    check_reconstruction_input(samples)?;
    let cfg = samples.config;
    let partial: Vec<Vec<Moments>> = samples
        .samples
        .par_chunks(1024)
        .map(|chunk| {
            let mut acc = Moments::default();
            for s in chunk {
                let f1 = pattern_function(s.v, s.phi, alpha1, w, cfg.eta, cfg.r_lo)?;
                let f2 = pattern_function(s.v_prime, s.phi_prime, alpha2, w, cfg.eta_prime, cfg.r_lo)?;
                acc.add(f1 * f2);
            }
            Ok(vec![acc])
        })
        .collect::<Result<_>>()?;
    Ok(merge_moments(partial, 1, samples.len())[0])
}

fn merge_moments(partial: Vec<Vec<Moments>>, n: usize, m: usize) -> Vec<Reconstruction> {
    let mut total = vec![Moments::default(); n];
    for part in &partial {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    total.iter().map(|t| t.finish(m)).collect()
}

/// Direct evaluation of the radial-filtered two-time P functional,
///
/// ```text
/// P_Ω(α₁, α₂) = π⁻⁴ ∫ d²β₁ d²β₂ Φ(β₁, β₂) Ω(|β₁|) Ω(|β₂|) e^{Σⱼ αⱼβⱼ* - αⱼ*βⱼ},
/// ```
///
/// in polar coordinates: Gauss-Legendre in `|β| = w sin ϑ` and the trapezoidal rule in
/// `arg β`.
#[derive(Debug, Clone)]
pub struct RadialQuadrature {
    /// `(β, weight)` of the two-dimensional product rule.
    nodes: Vec<(Complex64, f64)>,
    q: DMatrix<f64>,
}

impl RadialQuadrature {
    pub const DEFAULT_RADIAL: usize = 40;
    pub const DEFAULT_ANGULAR: usize = 96;

    pub fn new(params: &ParametricParams, tau1: f64, tau2: f64, w: f64) -> Result<Self> {
        Self::with_resolution(params, tau1, tau2, w, Self::DEFAULT_RADIAL, Self::DEFAULT_ANGULAR)
    }

    pub fn with_resolution(
        params: &ParametricParams,
        tau1: f64,
        tau2: f64,
        w: f64,
        radial: usize,
        angular: usize,
    ) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter(format!("filter width must be > 0, got {w}")));
        }
        if radial == 0 || angular == 0 {
            return Err(Error::InvalidParameter("quadrature resolution must be >= 1".into()));
        }
        let form = two_time_form(params, tau1, tau2)?;
        let (bs, jacobian) = radial_nodes(w, radial);
        let dtheta = 2.0 * PI / angular as f64;
        let mut nodes = Vec::with_capacity(radial * angular);
        for (&b, &j) in bs.iter().zip(&jacobian) {
            let wb = j * b * radial_filter(b, w) * dtheta / (PI * PI);
            for k in 0..angular {
                nodes.push((Complex64::from_polar(b, k as f64 * dtheta), wb));
            }
        }
        Ok(Self {
            nodes,
            q: form.matrix().clone(),
        })
    }

    pub fn eval(&self, alpha1: Complex64, alpha2: Complex64) -> f64 {
        self.eval_many(&[(alpha1, alpha2)])[0]
    }

    /// Evaluates several points in one pass over the node pairs.
    pub fn eval_many(&self, points: &[(Complex64, Complex64)]) -> Vec<f64> {
        let n = self.nodes.len();
        let q = &self.q;
        // e^{iθ} factors of each mode, split into cos and sin.
        let phase = |a: Complex64, b: Complex64| 2.0 * (a * b.conj()).im;
        let trig = |sel: usize| -> Vec<Vec<(f64, f64)>> {
            points
                .iter()
                .map(|p| {
                    let a = if sel == 0 { p.0 } else { p.1 };
                    self.nodes.iter().map(|(b, _)| phase(a, *b).sin_cos()).collect()
                })
                .collect()
        };
        let t1 = trig(0);
        let t2 = trig(1);
        let quad = |b: Complex64, off: usize| {
            let (x, y) = (b.re, b.im);
            q[(off, off)] * x * x + 2.0 * q[(off, off + 1)] * x * y + q[(off + 1, off + 1)] * y * y
        };
        let diag1: Vec<f64> = self.nodes.iter().map(|(b, _)| quad(*b, 0)).collect();
        let diag2: Vec<f64> = self.nodes.iter().map(|(b, _)| quad(*b, 2)).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (b1, w1) = self.nodes[i];
                // 2 v₁ᵀ Q₁₂ v₂ = c_re Re β₂ + c_im Im β₂
                let c_re = 2.0 * (b1.re * q[(0, 2)] + b1.im * q[(1, 2)]);
                let c_im = 2.0 * (b1.re * q[(0, 3)] + b1.im * q[(1, 3)]);
                let mut cos_sum = vec![0.0; points.len()];
                let mut sin_sum = vec![0.0; points.len()];
                for j in 0..n {
                    let (b2, w2) = self.nodes[j];
                    let e = w2 * (diag1[i] + diag2[j] + c_re * b2.re + c_im * b2.im).exp();
                    for k in 0..points.len() {
                        let (s2, c2) = t2[k][j];
                        cos_sum[k] += e * c2;
                        sin_sum[k] += e * s2;
                    }
                }
                (0..points.len())
                    .map(|k| {
                        let (s1, c1) = t1[k][i];
                        w1 * (c1 * cos_sum[k] - s1 * sin_sum[k])
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![0.0; points.len()];
        for row in &rows {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }
}

/// One-shot direct radial-filtered P functional.
pub fn direct_radial_p_omega(
    params: &ParametricParams,
    tau1: f64,
    tau2: f64,
    alpha1: Complex64,
    alpha2: Complex64,
    w: f64,
) -> Result<f64> {
    Ok(RadialQuadrature::new(params, tau1, tau2, w)?.eval(alpha1, alpha2))
}

/// Sidecar metadata path: `<path>.meta`.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes `v,v_prime,phi,phi_prime` rows plus the `.meta` sidecar. Floats
/// use the shortest representation that round-trips exactly.
pub fn write_samples(set: &SampleSet, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "v,v_prime,phi,phi_prime")?;
    for s in &set.samples {
        writeln!(out, "{},{},{},{}", s.v, s.v_prime, s.phi, s.phi_prime)?;
    }
    out.flush()?;
    let mut meta = BufWriter::new(File::create(meta_path(path))?);
    let c = &set.config;
    writeln!(meta, "seed={}", set.seed)?;
    writeln!(meta, "M={}", set.len())?;
    writeln!(meta, "eta={}", c.eta)?;
    writeln!(meta, "eta_prime={}", c.eta_prime)?;
    writeln!(meta, "R={}", c.r_lo)?;
    writeln!(meta, "kappa={}", set.params.kappa)?;
    writeln!(meta, "delta={}", set.params.delta)?;
    writeln!(meta, "tau1={}", c.tau1)?;
    writeln!(meta, "tau2={}", c.tau2)?;
    meta.flush()?;
    Ok(())
}

pub fn read_samples(path: &Path) -> Result<SampleSet> {
    let meta_text = std::fs::read_to_string(meta_path(path))?;
    let mut meta = BTreeMap::new();
    for line in meta_text.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad metadata line '{line}'")))?;
        meta.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| -> Result<f64> {
        meta.get(k)
            .ok_or_else(|| Error::Parse(format!("missing metadata key '{k}'")))?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("metadata '{k}': {e}")))
    };
    let seed: u64 = meta
        .get("seed")
        .ok_or_else(|| Error::Parse("missing metadata key 'seed'".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("metadata 'seed': {e}")))?;
    let params = ParametricParams::new(get("kappa")?, get("delta")?)?;
    let config = DetectionConfig::new(get("eta")?, get("eta_prime")?, get("R")?, get("tau1")?, get("tau2")?)?;

    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != "v,v_prime,phi,phi_prime" {
        return Err(Error::Parse(format!("unexpected header '{header}'")));
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", i + 2)))?;
        if vals.len() != 4 {
            return Err(Error::Parse(format!("row {}: expected 4 fields", i + 2)));
        }
        samples.push(QuadratureSample {
            v: vals[0],
            v_prime: vals[1],
            phi: vals[2],
            phi_prime: vals[3],
        });
    }
    let m = get("M")? as usize;
    if m != samples.len() {
        return Err(Error::Parse(format!("metadata M={m} but {} rows", samples.len())));
    }
    Ok(SampleSet {
        samples,
        seed,
        config,
        params,
    })
}
