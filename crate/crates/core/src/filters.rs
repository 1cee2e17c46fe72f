//! Nonclassicality filters and the filtered one-dimensional Gaussian
//! Fourier integral `T(y, g)`.
//!
//! Every filter here has compact support, so it tames characteristic
//! functions of arbitrary growth, and a nonnegative Fourier transform, so it
//! never introduces negativities of its own.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_1d, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterKind {
    /// `∏ tri(Re βᵢ/wᵢ) tri(Im βᵢ/wᵢ)`.
    ProductTriangular,
    /// `∏ Ω(|βᵢ|; wᵢ)` with the disk-autocorrelation profile of [`radial_filter`].
    RadialAutocorrelation,
}

/// A filter family together with one width per time argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kind: FilterKind,
    widths: Vec<f64>,
}

impl FilterSpec {
    pub fn new(kind: FilterKind, widths: Vec<f64>) -> Result<Self> {
        if widths.is_empty() {
            return Err(Error::InvalidParameter("filter needs at least one width".into()));
        }
        if let Some(w) = widths.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "filter widths must be finite and positive, got {w}"
            )));
        }
        Ok(Self { kind, widths })
    }

    /// The same width `w` for each of `k` times.
    pub fn uniform(kind: FilterKind, w: f64, k: usize) -> Result<Self> {
        Self::new(kind, vec![w; k])
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn times(&self) -> usize {
        self.widths.len()
    }

    /// Evaluates the filter at `betas`, dispatching on the kind.
    pub fn eval(&self, betas: &[Complex64]) -> Result<f64> {
        if betas.len() != self.widths.len() {
            return Err(Error::DimensionMismatch {
                expected: self.widths.len(),
                actual: betas.len(),
            });
        }
        Ok(match self.kind {
            FilterKind::ProductTriangular => betas
                .iter()
                .zip(&self.widths)
                .map(|(b, w)| tri(b.re / w) * tri(b.im / w))
                .product(),
            FilterKind::RadialAutocorrelation => betas
                .iter()
                .zip(&self.widths)
                .map(|(b, &w)| radial_filter(b.norm(), w))
                .product(),
        })
    }
}

/// Triangular hat function `1 - |z|` on `[-1, 1]`, zero elsewhere.
pub fn tri(z: f64) -> f64 {
    (1.0 - z.abs()).max(0.0)
}

/// Multitime product-triangular filter.
pub fn product_filter(betas: &[Complex64], spec: &FilterSpec) -> Result<f64> {
    if spec.kind != FilterKind::ProductTriangular {
        return Err(Error::InvalidParameter(
            "product_filter requires a ProductTriangular spec".into(),
        ));
    }
    spec.eval(betas)
}

/// Radial filter: the overlap area of two disks of radius `w/2` whose
/// centers are `b` apart, normalized to one at `b = 0`.
///
/// As an autocorrelation its 2D Fourier transform is the squared modulus of
/// the disk's transform and therefore nonnegative; its support is `[0, w]`.
pub fn radial_filter(b: f64, w: f64) -> f64 {
    let x = b.abs() / w;
    if x >= 1.0 {
        return 0.0;
    }
    FRAC_2_PI * (x.acos() - x * (1.0 - x * x).sqrt())
}

/// Arguments of [`t_function`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TArgs {
    pub y: f64,
    pub g: Complex64,
}

impl TArgs {
    pub fn new(y: f64, g: impl Into<Complex64>) -> Self {
        Self { y, g: g.into() }
    }
}

/// `T(y, g) = Re[(2/π) ∫₀¹ e^{-g z² + 2iyz} (1 - z) dz]`.
///
/// Every triangular-filtered one-dimensional Gaussian Fourier integral
/// reduces to this function: `(1/π)∫ e^{2ikγ - cγ²} tri(γ/w) dγ = w T(wk, w²c)`.
pub fn t_function(args: TArgs) -> Result<f64> {
    t_function_with(args, &QuadratureSpec::default())
}

pub fn t_function_with(args: TArgs, spec: &QuadratureSpec) -> Result<f64> {
    let TArgs { y, g } = args;
    if !y.is_finite() || !g.re.is_finite() || !g.im.is_finite() {
        return Err(Error::NonFinite("t_function arguments"));
    }
    let v = integrate_1d(
        |z| (Complex64::new(-g.re * z * z, 2.0 * y * z - g.im * z * z)).exp() * (1.0 - z),
        0.0,
        1.0,
        spec,
    )?;
    Ok(2.0 / PI * v.re)
}
