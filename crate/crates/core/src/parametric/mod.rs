//! Degenerate parametric oscillator with frequency mismatch.
//!
//! In the interaction picture the signal mode evolves linearly,
//! `â(τ) = u₁(τ) â + u₂(τ) â†`, with the dimensionless time `τ = 2κt/π`.
//! All commutators between different times are multiples of the identity,
//! so every ordered characteristic function of a vacuum input is Gaussian.

mod forms;
mod functional;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use forms::{
    diagonalize_form, mtcf_log_two_time, single_time_form, two_time_form, GaussianForm,
    NormalCoordinates,
};
pub use functional::{
    p_omega_single, p_omega_two_time, FilteredGaussian, SingleTimeFunctional, TwoTimeFunctional,
};

/// Coupling `κ` and mismatch `δ = ω_p - 2ω_a`, both in rad per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParametricParams {
    pub kappa: f64,
    pub delta: f64,
}

impl ParametricParams {
    pub fn new(kappa: f64, delta: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParameter(format!("kappa must be > 0, got {kappa}")));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be >= 0, got {delta}")));
        }
        Ok(Self { kappa, delta })
    }

    /// Unit coupling with mismatch ratio `r`.
    pub fn from_ratio(r: f64) -> Result<Self> {
        Self::new(1.0, r)
    }

    /// `r = δ/κ`.
    pub fn ratio(&self) -> f64 {
        self.delta / self.kappa
    }

    /// Eigenfrequency `ϑ_r = π√(16 - r²)/4`; purely imaginary for `r > 4`.
    pub fn theta(&self) -> Complex64 {
        let r = self.ratio();
        Complex64::new(16.0 - r * r, 0.0).sqrt() * (PI / 4.0)
    }

    /// Converts a laboratory time `t` into `τ = 2κt/π`.
    pub fn tau_of(&self, t: f64) -> f64 {
        2.0 * self.kappa * t / PI
    }
}

/// Bogoliubov coefficients of `â(τ) = u₁ â + u₂ â†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair {
    pub u1: Complex64,
    pub u2: Complex64,
    pub tau: f64,
}

impl BogoliubovPair {
    /// `|u₁|² - |u₂|²`, equal to one for a canonical transformation.
    pub fn commutator(&self) -> f64 {
        self.u1.norm_sqr() - self.u2.norm_sqr()
    }
}

/// `sinh(ϑτ)/ϑ`, continuous through `ϑ = 0`.
fn sinh_over(theta: Complex64, tau: f64) -> Complex64 {
    let x = theta * tau;
    if x.norm() < 1e-4 {
        let x2 = x * x;
        tau * (1.0 + x2 / 6.0 * (1.0 + x2 / 20.0))
    } else {
        x.sinh() / theta
    }
}

/// Closed-form Heisenberg solution with initial condition `â(0) = â`.
pub fn solve_bogoliubov(p: &ParametricParams, tau: f64) -> BogoliubovPair {
    let theta = p.theta();
    let quarter_r = PI * p.ratio() / 4.0;
    let phase = Complex64::from_polar(1.0, -quarter_r * tau);
    let sh = sinh_over(theta, tau);
    let ch = (theta * tau).cosh();
    let i = Complex64::i();
    BogoliubovPair {
        u1: phase * (ch + i * quarter_r * sh),
        u2: -i * PI * phase * sh,
        tau,
    }
}

/// Coefficient of the identity in `[â(τ), â(τ + Δτ)]`.
pub fn commutator_two_time(p: &ParametricParams, tau: f64, dtau: f64) -> Complex64 {
    let a = solve_bogoliubov(p, tau);
    let b = solve_bogoliubov(p, tau + dtau);
    a.u1 * b.u2 - a.u2 * b.u1
}

/// Ratio between the time- and normally-ordered and the purely normally
/// ordered two-time characteristic functions,
/// `|exp{-β₁*β₂*[â(τ), â(τ + Δτ)]}|`.
pub fn time_ordering_ratio(
    p: &ParametricParams,
    beta1: Complex64,
    beta2: Complex64,
    tau: f64,
    dtau: f64,
) -> f64 {
    let c = commutator_two_time(p, tau, dtau);
    (-(beta1.conj() * beta2.conj() * c).re).exp()
}
