//! Regularized multitime Glauber-Sudarshan P functionals.
//!
//! The crate evaluates filtered (and therefore smooth) two-time
//! quasiprobabilities for two model processes:
//!
//! * a degenerate parametric oscillator with frequency mismatch, whose
//!   Heisenberg dynamics is linear and solved in closed form
//!   ([`parametric`]);
//! * the nonlinear vibrational dynamics of a laser-driven trapped ion,
//!   propagated numerically in a truncated Fock space ([`trapped_ion`]).
//!
//! [`sampling`] generates synthetic correlated balanced-homodyne data for
//! the parametric process and reconstructs the same quasiprobability with
//! pattern functions.

pub mod error;
pub mod filters;
pub mod grid;
pub mod numerics;
pub mod parametric;
pub mod sampling;
pub mod trapped_ion;

pub use error::{Error, Result};
pub use filters::{FilterKind, FilterSpec, TArgs};
pub use grid::{Axis, PhaseSpaceGrid};
pub use numerics::{QuadratureSpec, SymEigResult};
pub use parametric::{BogoliubovPair, GaussianForm, NormalCoordinates, ParametricParams};
pub use sampling::{DetectionConfig, QuadratureSample, Reconstruction, SampleSet};
pub use trapped_ion::{FockOperator, IonParams};

pub use num_complex::Complex64;
