//! Truncated-Fock dynamics of the nonlinear vibrational motion of a
//! laser-driven trapped ion, `Ĥ₃ = ħε f̂₃(â†â; η)(iηâ)³ + H.c.`.
//!
//! Time is the dimensionless `τ = εt` throughout and `ħε = 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::expm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonParams {
    /// Effective coupling; only used to convert laboratory times.
    pub epsilon: f64,
    /// Lamb-Dicke parameter.
    pub eta: f64,
    /// Fock-space dimension `N_c`.
    pub cutoff: usize,
}

impl IonParams {
    pub const DEFAULT_CUTOFF: usize = 200;

    pub fn new(epsilon: f64, eta: f64, cutoff: usize) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {epsilon}")));
        }
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be > 0, got {eta}")));
        }
        if cutoff < 8 {
            return Err(Error::InvalidParameter(format!("cutoff must be >= 8, got {cutoff}")));
        }
        Ok(Self { epsilon, eta, cutoff })
    }

    pub fn tau_of(&self, t: f64) -> f64 {
        self.epsilon * t
    }
}

/// Dense operator in the number basis `|0⟩ … |N_c - 1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub matrix: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        self.matrix[(m, n)]
    }

    /// Largest entry of `A - A†`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    /// Largest deviation of `U†U` from the identity on the leading
    /// `interior × interior` block.
    pub fn unitarity_error(&self, interior: usize) -> f64 {
        let k = interior.min(self.dim());
        let gram = self.matrix.adjoint() * &self.matrix;
        (gram.view((0, 0), (k, k)) - DMatrix::<Complex64>::identity(k, k)).camax()
    }
}

/// Generalized Laguerre polynomial `L_n^{(α)}(x)` by upward recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Recoil nonlinearity `f₃(n; η) = e^{-η²/2} n!/(n+3)! L_n^{(3)}(η²)`.
pub fn f3_coefficient(n: usize, eta: f64) -> f64 {
    let nf = n as f64;
    (-0.5 * eta * eta).exp() * laguerre(n, 3.0, eta * eta) / ((nf + 1.0) * (nf + 2.0) * (nf + 3.0))
}

/// `g₃(n; η) = f₃(n; η) √((n+1)(n+2)(n+3))`.
pub fn g3_coefficient(n: usize, eta: f64) -> f64 {
    let nf = n as f64;
    f3_coefficient(n, eta) * ((nf + 1.0) * (nf + 2.0) * (nf + 3.0)).sqrt()
}

/// Real generator `K = -iĤ₃/(ħε)`; `Û(τ) = e^{τK}`.
fn generator(p: &IonParams) -> DMatrix<f64> {
    let n = p.cutoff;
    let eta3 = p.eta.powi(3);
    let mut k = DMatrix::zeros(n, n);
    for j in 0..n.saturating_sub(3) {
        let g = eta3 * g3_coefficient(j, p.eta);
        k[(j + 3, j)] = g;
        k[(j, j + 3)] = -g;
    }
    k
}

/// `Ĥ₃/(ħε) = iη³ Σₙ g₃(n)(|n+3⟩⟨n| - |n⟩⟨n+3|)`.
pub fn build_h3(p: &IonParams) -> FockOperator {
    let k = generator(p);
    // Ĥ = iK
    FockOperator {
        matrix: k.map(|x| Complex64::new(0.0, x)),
    }
}

/// Propagator `Û(τ) = exp(-iτĤ₃)` in the truncated basis.
pub fn evolve(p: &IonParams, tau: f64) -> Result<FockOperator> {
    if !tau.is_finite() {
        return Err(Error::NonFinite("evolve time"));
    }
    let u = expm(&(generator(p) * tau))?;
    Ok(FockOperator {
        matrix: u.map(|x| Complex64::new(x, 0.0)),
    })
}

/// Columns `Û(τ)|k⟩` for the requested basis states, computed in real
/// arithmetic.
fn evolved_columns(p: &IonParams, tau: f64, states: &[usize]) -> Result<Vec<DVector<f64>>> {
    let u = expm(&(generator(p) * tau))?;
    Ok(states.iter().map(|&k| u.column(k).clone_owned()).collect())
}

/// Total population of `Û(τ)|input⟩` in levels `n >= from`.
pub fn population_above(p: &IonParams, input_n: usize, tau: f64, from: usize) -> Result<f64> {
    let col = &evolved_columns(p, tau, &[input_n])?[0];
    Ok(col.iter().skip(from).map(|x| x * x).sum())
}

/// Displacement operator `D̂(β) = exp(βâ† - β*â)` from its exact matrix
/// elements, restricted to the first `cutoff` number states:
///
/// ```text
/// ⟨n+d|D̂|n⟩ = √(n!/(n+d)!) e^{-|β|²/2} βᵈ L_n^{(d)}(|β|²)
/// ⟨n|D̂|n+d⟩ = √(n!/(n+d)!) e^{-|β|²/2} (-β*)ᵈ L_n^{(d)}(|β|²)
/// ```
///
/// The modulus prefactor is accumulated in logarithms to avoid overflow.
pub fn displacement_matrix(beta: Complex64, cutoff: usize) -> FockOperator {
    let n = cutoff;
    if beta.norm_sqr() == 0.0 {
        return FockOperator {
            matrix: DMatrix::identity(n, n),
        };
    }
    let mut d = DMatrix::<Complex64>::zeros(n, n);
    let x = beta.norm_sqr();
    let (ln_mod, arg) = (beta.norm().ln(), beta.arg());
    let mut ln_fact = vec![0.0; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    for off in 0..n {
        let a = off as f64;
        let lower_phase = Complex64::from_polar(1.0, a * arg);
        let upper_phase = Complex64::from_polar(1.0, a * (std::f64::consts::PI - arg));
        let (mut prev, mut cur) = (0.0, 1.0);
        for k in 0..n - off {
            if k > 0 {
                let kf = (k - 1) as f64;
                let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            let modulus = (-0.5 * x + a * ln_mod + 0.5 * (ln_fact[k] - ln_fact[k + off])).exp() * cur;
            d[(k + off, k)] = lower_phase * modulus;
            if off > 0 {
                d[(k, k + off)] = upper_phase * modulus;
            }
        }
    }
    FockOperator { matrix: d }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Precomputed `Û(τ)|p - m⟩`, `m = 0..=p`, for repeated evaluation of the
/// two-time characteristic function at a fixed time.
#[derive(Debug, Clone)]
pub struct EvolvedInput {
    input_n: usize,
    /// `columns[k] = Û(τ)|k⟩` for `k = 0..=p`, truncated to `support`.
    columns: Vec<DVector<f64>>,
    support: usize,
}

impl EvolvedInput {
    pub fn new(p: &IonParams, input_n: usize, tau: f64) -> Result<Self> {
        if input_n > p.cutoff / 4 {
            return Err(Error::InvalidParameter(format!(
                "input Fock state {input_n} exceeds cutoff/4 = {}",
                p.cutoff / 4
            )));
        }
        let states: Vec<usize> = (0..=input_n).collect();
        let full = evolved_columns(p, tau, &states)?;
        // Amplitudes below 1e-20 cannot affect the result; drop them so the
        // displacement block stays small.
        let support = full
            .iter()
            .filter_map(|c| c.iter().rposition(|x| x.abs() > 1e-20))
            .max()
            .map_or(1, |i| i + 1);
        let columns = full.into_iter().map(|c| c.rows(0, support).clone_owned()).collect();
        Ok(Self {
            input_n,
            columns,
            support,
        })
    }

    pub fn support(&self) -> usize {
        self.support
    }

    /// `Φ(β₁, β₂; 0, τ)` for the Fock input `|p⟩⟨p|`.
    pub fn mtcf(&self, beta1: Complex64, beta2: Complex64) -> Complex64 {
        let d = displacement_matrix(beta2, self.support);
        self.mtcf_with(&d, beta1, beta2)
    }

    fn mtcf_with(&self, d: &FockOperator, beta1: Complex64, beta2: Complex64) -> Complex64 {
        let p = self.input_n;
        let cols: Vec<DVector<Complex64>> = self
            .columns
            .iter()
            .map(|c| c.map(|x| Complex64::new(x, 0.0)))
            .collect();
        let d_cols: Vec<DVector<Complex64>> = cols.iter().map(|c| &d.matrix * c).collect();
        let pf = factorial(p);
        let mut total = Complex64::new(0.0, 0.0);
        for n in 0..=p {
            let left = &cols[p - n];
            let bra = beta1.powu(n as u32) / factorial(n);
            for m in 0..=p {
                let ket = (-beta1.conj()).powu(m as u32) / factorial(m);
                let weight = pf / (factorial(p - n) * factorial(p - m)).sqrt();
                // ⟨p-n|Û†D̂Û|p-m⟩ with real Û columns
                let elem = left.dot(&d_cols[p - m]);
                total += bra * ket * weight * elem;
            }
        }
        total * (0.5 * beta2.norm_sqr()).exp()
    }
}

/// Two-time characteristic function `Φ(β₁, β₂; 0, τ)` for the Fock input
/// `|p⟩⟨p|`, `p = input_n`.
pub fn mtcf_zero_t(
    p: &IonParams,
    input_n: usize,
    beta1: Complex64,
    beta2: Complex64,
    tau: f64,
) -> Result<Complex64> {
    Ok(EvolvedInput::new(p, input_n, tau)?.mtcf(beta1, beta2))
}

/// Excess of `|Φ|²` over the two-mode single-time bound `e^{|β₁|² + |β₂|²}`.
pub fn delta_phi(
    p: &IonParams,
    input_n: usize,
    beta1: Complex64,
    beta2: Complex64,
    tau: f64,
) -> Result<f64> {
    let phi = mtcf_zero_t(p, input_n, beta1, beta2, tau)?;
    Ok(phi.norm_sqr() - (beta1.norm_sqr() + beta2.norm_sqr()).exp())
}

/// `ΔΦ` over a grid of common phases `φ₁ = φ₂ = φ` and times, with fixed
/// moduli `|β₁| = |β₂| = modulus`. Row-major with `φ` as the slow index.
pub fn scan_delta_phi(
    p: &IonParams,
    input_n: usize,
    modulus: f64,
    phis: &[f64],
    taus: &[f64],
) -> Result<Vec<f64>> {
    let evolved: Vec<EvolvedInput> = taus
        .par_iter()
        .map(|&tau| EvolvedInput::new(p, input_n, tau))
        .collect::<Result<_>>()?;
    let bound = (2.0 * modulus * modulus).exp();
    let rows: Vec<Vec<f64>> = phis
        .par_iter()
        .map(|&phi| {
            let beta = Complex64::from_polar(modulus, phi);
            let max_support = evolved.iter().map(|e| e.support).max().unwrap_or(1);
            let d_full = displacement_matrix(beta, max_support);
            evolved
                .iter()
                .map(|e| {
                    let d = FockOperator {
                        matrix: d_full.matrix.view((0, 0), (e.support, e.support)).clone_owned(),
                    };
                    e.mtcf_with(&d, beta, beta).norm_sqr() - bound
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}
