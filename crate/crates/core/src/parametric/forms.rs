use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{solve_bogoliubov, ParametricParams};
use crate::error::{Error, Result};
use crate::numerics::eig_sym;

/// Real quadratic form `Q` of a Gaussian characteristic function,
/// `Φ = exp[vᵀQv]` with `v = (Re β₁, Im β₁[, Re β₂, Im β₂])`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianForm {
    q: DMatrix<f64>,
}

impl GaussianForm {
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        let n = q.nrows();
        if q.ncols() != n || !(n == 2 || n == 4) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian form must be 2x2 or 4x4, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        let asymmetry = (&q - q.transpose()).amax();
        if asymmetry > 1e-12 * q.amax().max(1.0) {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(Self { q })
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Phase-space vector of complex amplitudes, real parts first.
    pub fn coordinates(betas: &[Complex64]) -> DVector<f64> {
        DVector::from_iterator(2 * betas.len(), betas.iter().flat_map(|b| [b.re, b.im]))
    }

    /// `vᵀQv`.
    pub fn exponent(&self, betas: &[Complex64]) -> f64 {
        let v = Self::coordinates(betas);
        v.dot(&(&self.q * &v))
    }

    /// `Φ = exp[vᵀQv]`.
    pub fn characteristic(&self, betas: &[Complex64]) -> f64 {
        self.exponent(betas).exp()
    }
}

/// Single-time normally ordered characteristic function of the evolved
/// vacuum.
pub fn single_time_form(p: &ParametricParams, tau: f64) -> GaussianForm {
    let pair = solve_bogoliubov(p, tau);
    let (u1, u2) = (pair.u1, pair.u2);
    let off = (u1 * u2).im;
    let q = DMatrix::from_row_slice(
        2,
        2,
        &[
            0.5 * (1.0 - (u2.conj() - u1).norm_sqr()),
            off,
            off,
            0.5 * (1.0 - (u2.conj() + u1).norm_sqr()),
        ],
    );
    GaussianForm { q }
}

/// Logarithm of the time- and normally ordered two-time characteristic
/// function `⟨e^{β₁â†(τ₁)} e^{β₂â†(τ₂)} e^{-β₂*â(τ₂)} e^{-β₁*â(τ₁)}⟩` of the
/// vacuum.
///
/// Each exponent is linear, `Lⱼ = xⱼ â + yⱼ â†`, and all commutators
/// `[Lᵢ, Lⱼ] = xᵢyⱼ - yᵢxⱼ` are c-numbers, so the product collapses to
/// `exp[Σ Lⱼ + ½ Σ_{i<j} [Lᵢ, Lⱼ]]` and `⟨0|e^{xâ + yâ†}|0⟩ = e^{xy/2}`.
pub fn mtcf_log_two_time(
    p: &ParametricParams,
    tau1: f64,
    tau2: f64,
    beta1: Complex64,
    beta2: Complex64,
) -> Complex64 {
    let s1 = solve_bogoliubov(p, tau1);
    let s2 = solve_bogoliubov(p, tau2);
    // (x, y) coefficients of (â, â†) in each exponent, in operator order.
    let terms = [
        (beta1 * s1.u2.conj(), beta1 * s1.u1.conj()),
        (beta2 * s2.u2.conj(), beta2 * s2.u1.conj()),
        (-beta2.conj() * s2.u1, -beta2.conj() * s2.u2),
        (-beta1.conj() * s1.u1, -beta1.conj() * s1.u2),
    ];
    let x: Complex64 = terms.iter().map(|t| t.0).sum();
    let y: Complex64 = terms.iter().map(|t| t.1).sum();
    let mut commutators = Complex64::new(0.0, 0.0);
    for i in 0..terms.len() {
        for j in (i + 1)..terms.len() {
            commutators += terms[i].0 * terms[j].1 - terms[i].1 * terms[j].0;
        }
    }
    0.5 * x * y + 0.5 * commutators
}

/// Two-time quadratic form, obtained by polarization of
/// [`mtcf_log_two_time`].
pub fn two_time_form(p: &ParametricParams, tau1: f64, tau2: f64) -> Result<GaussianForm> {
    if tau1 > tau2 {
        return Err(Error::TimeOrderViolation { tau1, tau2 });
    }
    let q_of = |v: [f64; 4]| {
        mtcf_log_two_time(
            p,
            tau1,
            tau2,
            Complex64::new(v[0], v[1]),
            Complex64::new(v[2], v[3]),
        )
        .re
    };
    let unit = |i: usize| {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        v
    };
    let diag: Vec<f64> = (0..4).map(|i| q_of(unit(i))).collect();
    let mut q = DMatrix::from_diagonal(&DVector::from_vec(diag.clone()));
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut v = unit(i);
            v[j] = 1.0;
            let off = 0.5 * (q_of(v) - diag[i] - diag[j]);
            q[(i, j)] = off;
            q[(j, i)] = off;
        }
    }
    Ok(GaussianForm { q })
}

/// Orthogonal normal coordinates of a Gaussian form: with `v = S γ`,
/// `vᵀQv = -Σ cⱼ γⱼ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalCoordinates {
    /// Columns are the normalized eigenvectors of `Q`.
    pub rotation: DMatrix<f64>,
    /// `cⱼ = -λⱼ`, in the order of ascending eigenvalues `λⱼ`.
    pub coefficients: DVector<f64>,
}

pub fn diagonalize_form(form: &GaussianForm) -> Result<NormalCoordinates> {
    let eig = eig_sym(&form.q)?;
    Ok(NormalCoordinates {
        rotation: eig.eigenvectors,
        coefficients: -eig.eigenvalues,
    })
}
