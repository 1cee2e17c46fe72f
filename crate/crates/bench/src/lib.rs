//! Fixed workloads shared by the criterion benchmarks.

use num_complex::Complex64;
use pfunctional::parametric::ParametricParams;
use pfunctional::sampling::{generate_samples, DetectionConfig};
use pfunctional::SampleSet;

pub const MISMATCH: f64 = 10.0 / std::f64::consts::PI;

pub fn parametric() -> ParametricParams {
    ParametricParams::from_ratio(MISMATCH).expect("valid ratio")
}

/// Row of `n` real amplitudes on `[-3, 3]`.
pub fn real_line(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| Complex64::new(-3.0 + 6.0 * i as f64 / (n - 1).max(1) as f64, 0.0))
        .collect()
}

pub fn homodyne_data(m: usize) -> SampleSet {
    let cfg = DetectionConfig::new(0.9, 0.9, 1.0, 0.1, 0.45).expect("valid config");
    generate_samples(&parametric(), &cfg, m, 1).expect("sampling")
}
