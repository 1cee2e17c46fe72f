use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 500,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<()> {
        // negated so that NaN is rejected
        if !(self.abs_tol > 0.0) || !(self.rel_tol >= 0.0) || self.max_subdivisions < 1 {
            return Err(Error::InvalidParameter(format!(
                "quadrature spec requires abs_tol > 0, rel_tol >= 0, max_subdivisions >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }
}

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Segment
where
    F: FnMut(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * wk;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Segment { a, b, value, error }
}

/// Integrates a complex-valued function of a real variable over `[a, b]`
/// with globally adaptive Gauss-Kronrod (7/15) subdivision.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_breaks(f, &[a, b], spec)
}

/// Like [`integrate_1d`], but seeds the subdivision with the given ordered
/// break points (kinks of the integrand belong here).
pub fn integrate_breaks<F>(mut f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::InvalidParameter(
            "integration needs at least two end points".into(),
        ));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if points.windows(2).any(|p| !(p[0] <= p[1])) {
        return Err(Error::InvalidParameter(format!(
            "integration points must be ordered and finite: {points:?}"
        )));
    }

    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for p in points.windows(2) {
        if p[0] == p[1] {
            continue;
        }
        let seg = gauss_kronrod(&mut f, p[0], p[1]);
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    let mut subdivisions = 0;
    loop {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::NonFinite("integrate_1d"));
        }
        let tol = spec.abs_tol.max(spec.rel_tol * total.norm());
        if total_err <= tol {
            return Ok(total);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                subdivisions,
                estimate: total.norm(),
                error: total_err,
            });
        }
        let Some(worst) = heap.pop() else {
            return Ok(total);
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution.
            return Err(Error::NonConvergence {
                subdivisions,
                estimate: total.norm(),
                error: total_err,
            });
        }
        let left = gauss_kronrod(&mut f, worst.a, mid);
        let right = gauss_kronrod(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
