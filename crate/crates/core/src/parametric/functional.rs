use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use super::forms::{diagonalize_form, single_time_form, two_time_form, GaussianForm, NormalCoordinates};
use super::ParametricParams;
use crate::error::{Error, Result};
use crate::filters::{t_function, tri, TArgs};

/// Triangular-filtered Fourier transform of a Gaussian characteristic
/// function.
///
/// The filter `∏ⱼ tri(γⱼ/w)` acts on the normal coordinates `γ = Sᵀv` of
/// the quadratic form, which factorizes the transform into one
/// [`t_function`] per real dimension:
/// `P_Ω = ∏ⱼ w T(w kⱼ, w² cⱼ)` with `k = Sᵀp` and
/// `p = (Im α₁, -Re α₁, Im α₂, -Re α₂, …)` the Fourier phase vector of
/// `e^{Σ β*α - βα*} = e^{2i pᵀv}`.
#[derive(Debug, Clone)]
pub struct FilteredGaussian {
    coords: NormalCoordinates,
    width: f64,
}

impl FilteredGaussian {
    pub fn new(form: &GaussianForm, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "filter width must be positive, got {width}"
            )));
        }
        Ok(Self {
            coords: diagonalize_form(form)?,
            width,
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn normal_coordinates(&self) -> &NormalCoordinates {
        &self.coords
    }

    /// Fourier phase vector `p` for the amplitudes `alphas`.
    pub fn phase_vector(alphas: &[Complex64]) -> DVector<f64> {
        DVector::from_iterator(2 * alphas.len(), alphas.iter().flat_map(|a| [a.im, -a.re]))
    }

    /// The filter as seen in the original phase-space coordinates `v`.
    pub fn filter_at(&self, v: &DVector<f64>) -> f64 {
        (self.coords.rotation.transpose() * v)
            .iter()
            .map(|g| tri(g / self.width))
            .product()
    }

    /// One-dimensional factor `w T(w k, w² cⱼ)` belonging to normal mode `j`.
    pub fn factor(&self, j: usize, k: f64) -> Result<f64> {
        let w = self.width;
        let c = self.coords.coefficients[j];
        Ok(w * t_function(TArgs::new(w * k, w * w * c))?)
    }

    pub fn eval(&self, alphas: &[Complex64]) -> Result<f64> {
        let dim = self.coords.coefficients.len();
        if 2 * alphas.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim / 2,
                actual: alphas.len(),
            });
        }
        let k = self.coords.rotation.transpose() * Self::phase_vector(alphas);
        k.iter()
            .enumerate()
            .try_fold(1.0, |acc, (j, &kj)| Ok(acc * self.factor(j, kj)?))
    }
}

/// `P_Ω[α; τ]` for a fixed time and filter width.
#[derive(Debug, Clone)]
pub struct SingleTimeFunctional {
    inner: FilteredGaussian,
    pub tau: f64,
}

impl SingleTimeFunctional {
    pub fn new(p: &ParametricParams, tau: f64, w: f64) -> Result<Self> {
        Ok(Self {
            inner: FilteredGaussian::new(&single_time_form(p, tau), w)?,
            tau,
        })
    }

    pub fn eval(&self, alpha: Complex64) -> Result<f64> {
        self.inner.eval(&[alpha])
    }

    pub fn filtered(&self) -> &FilteredGaussian {
        &self.inner
    }

    /// Evaluates along a set of points in parallel, preserving order.
    pub fn eval_many(&self, alphas: &[Complex64]) -> Result<Vec<f64>> {
        alphas.par_iter().map(|&a| self.eval(a)).collect()
    }
}

/// `P_Ω[α₁, α₂; τ₁, τ₂]` with identical widths for both times.
#[derive(Debug, Clone)]
pub struct TwoTimeFunctional {
    inner: FilteredGaussian,
    pub tau1: f64,
    pub tau2: f64,
}

impl TwoTimeFunctional {
    pub fn new(p: &ParametricParams, tau1: f64, tau2: f64, w: f64) -> Result<Self> {
        Ok(Self {
            inner: FilteredGaussian::new(&two_time_form(p, tau1, tau2)?, w)?,
            tau1,
            tau2,
        })
    }

    pub fn eval(&self, alpha1: Complex64, alpha2: Complex64) -> Result<f64> {
        self.inner.eval(&[alpha1, alpha2])
    }

    pub fn filtered(&self) -> &FilteredGaussian {
        &self.inner
    }

    pub fn eval_many(&self, pairs: &[(Complex64, Complex64)]) -> Result<Vec<f64>> {
        pairs.par_iter().map(|&(a, b)| self.eval(a, b)).collect()
    }
}

/// Single-time regularized P function of the evolved vacuum.
pub fn p_omega_single(p: &ParametricParams, tau: f64, alpha: Complex64, w: f64) -> Result<f64> {
    SingleTimeFunctional::new(p, tau, w)?.eval(alpha)
}

/// Two-time regularized P functional of the evolved vacuum.
pub fn p_omega_two_time(
    p: &ParametricParams,
    tau1: f64,
    tau2: f64,
    alpha1: Complex64,
    alpha2: Complex64,
    w: f64,
) -> Result<f64> {
    TwoTimeFunctional::new(p, tau1, tau2, w)?.eval(alpha1, alpha2)
}
