//! Reference computations shared by the integration tests.
//!
//! Everything here is deliberately written independently of the library
//! code paths it checks: quadrature nodes come from Golub-Welsch instead of
//! Newton iteration, eigenvectors from nalgebra instead of the Jacobi
//! solver, characteristic functions from Fock-space matrix products instead
//! of commutator algebra.

#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use pfunctional::parametric::{solve_bogoliubov, ParametricParams};
use twofloat::TwoFloat;

pub const R_DEFAULT: f64 = 10.0 / PI;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn default_params() -> ParametricParams {
    ParametricParams::from_ratio(R_DEFAULT).unwrap()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` from the eigen-decomposition
/// of the Jacobi matrix.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    type Rule = (Vec<f64>, Vec<f64>);
    thread_local! {
        static CACHE: RefCell<HashMap<usize, Rule>> = RefCell::new(HashMap::new());
    }
    CACHE.with(|c| c.borrow_mut().entry(n).or_insert_with(|| golub_welsch_uncached(n)).clone())
}

fn golub_welsch_uncached(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Nodes and weights on `[a, b]`.
pub fn gl_interval(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let (x, w) = golub_welsch(n);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(xi, wi)| (a + h * (xi + 1.0), h * wi)).collect()
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let wgt = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + i as f64 * h) * wgt;
    }
    s * (h / 3.0)
}

/// `T(y, g)` by composite Simpson quadrature of its defining integral.
pub fn t_simpson(y: f64, g: Complex64) -> f64 {
    let v = simpson(
        |z| (-g * z * z + Complex64::new(0.0, 2.0 * y * z)).exp() * (1.0 - z),
        0.0,
        1.0,
        20_000,
    );
    2.0 / PI * v.re
}

pub fn erf(x: f64) -> f64 {
    // erf(x) = 2x/√π Σ (-1)^n x^{2n} / (n! (2n+1))
    let mut term = x;
    let mut sum = x;
    for n in 1..60 {
        term *= -x * x / n as f64;
        sum += term / (2 * n + 1) as f64;
    }
    2.0 / PI.sqrt() * sum
}

/// `J_n(x)` from Bessel's integral `(1/π)∫₀^π cos(nt - x sin t) dt`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    gl_interval(0.0, PI, 200)
        .iter()
        .map(|(t, w)| w * (n as f64 * t - x * t.sin()).cos())
        .sum::<f64>()
        / PI
}

/// Overlap area of two disks of radius `rad` whose centers are `d` apart,
/// by numerical integration of the lens height.
pub fn lens_area(d: f64, rad: f64) -> f64 {
    if d >= 2.0 * rad {
        return 0.0;
    }
    // The lens is symmetric about x = d/2 and about the x axis; on x >= d/2
    // its upper edge is the circle around the origin.
    let (a, b) = (0.5 * d, rad);
    // x = a + (b - a)(1 - (1 - s)²) removes the square-root endpoint at x = R
    4.0 * gl_interval(0.0, 1.0, 400)
        .iter()
        .map(|(s, w)| {
            let x = a + (b - a) * (1.0 - (1.0 - s) * (1.0 - s));
            let dx = (b - a) * 2.0 * (1.0 - s);
            w * (rad * rad - x * x).max(0.0).sqrt() * dx
        })
        .sum::<f64>()
}

/// Single-time characteristic function of the evolved vacuum,
/// `⟨:D̂(β; τ):⟩ = exp[(|β|² - |βu₁* - β*u₂|²)/2]`.
pub fn phi_single(p: &ParametricParams, tau: f64, beta: Complex64) -> f64 {
    let s = solve_bogoliubov(p, tau);
    let g = beta * s.u1.conj() - beta.conj() * s.u2;
    (0.5 * (beta.norm_sqr() - g.norm_sqr())).exp()
}

/// Quadratic form of a real log-quadratic function by polarization.
pub fn polarize(f: impl Fn(&[f64]) -> f64, dim: usize) -> DMatrix<f64> {
    let unit = |i: usize| {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v
    };
    let mut q = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        q[(i, i)] = f(&unit(i));
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut v = unit(i);
            v[j] = 1.0;
            let off = 0.5 * (f(&v) - q[(i, i)] - q[(j, j)]);
            q[(i, j)] = off;
            q[(j, i)] = off;
        }
    }
    q
}

/// Filtered Fourier integral
/// `π^{-d} ∫ e^{Σ β*α - βα*} exp[vᵀQv] ∏ⱼ tri(γⱼ/w) dv` with `v = Sγ`,
/// integrated over the box `γ ∈ [-w, w]^{dim}` by tensor Gauss-Legendre on
/// each orthant. `S` comes from nalgebra's symmetric eigensolver.
/// Returns the complex value; its imaginary part must vanish.
pub fn filtered_box_quadrature(q: &DMatrix<f64>, alphas: &[Complex64], w: f64, n: usize) -> Complex64 {
    let dim = q.nrows();
    let s = SymmetricEigen::new(q.clone()).eigenvectors;
    let p = DVector::from_iterator(dim, alphas.iter().flat_map(|a| [a.im, -a.re]));
    let half = gl_interval(0.0, w, n);
    let nodes: Vec<(f64, f64)> = half
        .iter()
        .flat_map(|&(x, wt)| [(x, wt), (-x, wt)])
        .map(|(x, wt)| (x, wt * (1.0 - x.abs() / w)))
        .collect();
    let m = nodes.len();
    let total = m.pow(dim as u32);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut idx = vec![0usize; dim];
    let mut gamma = DVector::zeros(dim);
    for _ in 0..total {
        let mut weight = 1.0;
        for k in 0..dim {
            gamma[k] = nodes[idx[k]].0;
            weight *= nodes[idx[k]].1;
        }
        let v = &s * &gamma;
        let expo = v.dot(&(q * &v));
        sum += Complex64::from_polar(weight * expo.exp(), 2.0 * p.dot(&v));
        #[allow(clippy::needless_range_loop)]
        for k in 0..dim {
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
        }
    }
    sum / PI.powi(dim as i32)
}

/// Single-time filtered P function from the characteristic function alone.
pub fn p_single_oracle(p: &ParametricParams, tau: f64, alpha: Complex64, w: f64, n: usize) -> Complex64 {
    let q = polarize(|v| phi_single(p, tau, c(v[0], v[1])).ln(), 2);
    filtered_box_quadrature(&q, &[alpha], w, n)
}

/// Double-double complex amplitude; the Fock-space products below cancel
/// heavily and lose about six digits in plain `f64`.
type Dd = num_complex::Complex<TwoFloat>;

fn dd(z: Complex64) -> Dd {
    Dd::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

/// `e^{y â†} e^{x â} |v⟩` in a Fock space of dimension `v.len()`, by
/// summing the exponential series on the vector.
fn ladder_apply(v: &[Dd], x: Complex64, y: Complex64) -> Vec<Dd> {
    let n = v.len();
    let sqrt: Vec<TwoFloat> = (0..n).map(|k| TwoFloat::from(k as f64).sqrt()).collect();
    let series = |v: Vec<Dd>, coef: Dd, raise: bool| {
        let mut out = v.clone();
        let mut term = v;
        for k in 1..n {
            let mut next = vec![Dd::new(0.0.into(), 0.0.into()); n];
            for m in 0..n {
                if raise && m + 1 < n {
                    next[m + 1] = term[m] * sqrt[m + 1];
                } else if !raise && m > 0 {
                    next[m - 1] = term[m] * sqrt[m];
                }
            }
            let scale = coef / Dd::new(TwoFloat::from(k as f64), 0.0.into());
            term = next.into_iter().map(|t| t * scale).collect();
            for (o, t) in out.iter_mut().zip(&term) {
                *o += *t;
            }
        }
        out
    };
    let lowered = series(v.to_vec(), dd(x), false);
    series(lowered, dd(y), true)
}

/// Time- and normally-ordered two-time characteristic function of the
/// vacuum, `⟨0|e^{β₁â†(τ₁)} e^{β₂â†(τ₂)} e^{-β₂*â(τ₂)} e^{-β₁*â(τ₁)}|0⟩`, by
/// applying each exponential to a state vector truncated at `cutoff`.
pub fn fock_mtcf(p: &ParametricParams, tau1: f64, tau2: f64, b1: Complex64, b2: Complex64, cutoff: usize) -> Complex64 {
    let s1 = solve_bogoliubov(p, tau1);
    let s2 = solve_bogoliubov(p, tau2);
    // â(τ) = u₁â + u₂â†, â†(τ) = u₂*â + u₁*â†; exp(xâ + yâ†) = e^{xy/2} e^{yâ†} e^{xâ}
    let factors = [
        (b1 * s1.u2.conj(), b1 * s1.u1.conj()),
        (b2 * s2.u2.conj(), b2 * s2.u1.conj()),
        (-b2.conj() * s2.u1, -b2.conj() * s2.u2),
        (-b1.conj() * s1.u1, -b1.conj() * s1.u2),
    ];
    let mut v = vec![Dd::new(0.0.into(), 0.0.into()); cutoff];
    v[0] = Dd::new(1.0.into(), 0.0.into());
    let mut prefactor = Complex64::new(1.0, 0.0);
    for &(x, y) in factors.iter().rev() {
        v = ladder_apply(&v, x, y);
        prefactor *= (0.5 * x * y).exp();
    }
    Complex64::new(v[0].re.hi() + v[0].re.lo(), v[0].im.hi() + v[0].im.lo()) * prefactor
}

/// Radial-filter two-time P functional with `Φ ≡ 1`:
/// `[(2/π) ∫₀ʷ b Ω(b) J₀(2|α|b) db]` per mode.
pub fn radial_vacuum_factor(alpha: Complex64, w: f64) -> f64 {
    let rad = 0.5 * w;
    let disk = PI * rad * rad;
    gl_interval(0.0, w, 200)
        .iter()
        .map(|(b, wt)| wt * b * lens_area(*b, rad) / disk * bessel_j(0, 2.0 * alpha.norm() * b))
        .sum::<f64>()
        * 2.0
        / PI
}

/// Closed form of the time-ordering ratio for `|r| ≤ 4`:
/// `exp{(π/ϑ)|β₁β₂| sin[πr(2τ+Δτ)/4 + φ₁ + φ₂] sinh(ϑΔτ)}`.
pub fn ordering_ratio_closed(r: f64, b1: Complex64, b2: Complex64, tau: f64, dtau: f64) -> f64 {
    let theta = PI * (16.0 - r * r).max(0.0).sqrt() / 4.0;
    let sh = if theta == 0.0 { dtau } else { (theta * dtau).sinh() / theta };
    let angle = PI * r * (2.0 * tau + dtau) / 4.0 + b1.arg() + b2.arg();
    (PI * b1.norm() * b2.norm() * angle.sin() * sh).exp()
}

/// Trapezoid sum of `f` over the square `[-l, l]²` with spacing `h`.
pub fn trapezoid_2d(f: impl Fn(f64, f64) -> f64 + Sync, l: f64, h: f64) -> f64 {
    use rayon::prelude::*;
    let n = (l / h).round() as i64;
    let edge = |i: i64| if i.abs() == n { 0.5 } else { 1.0 };
    (-n..=n)
        .into_par_iter()
        .map(|i| {
            (-n..=n)
                .map(|j| edge(i) * edge(j) * f(i as f64 * h, j as f64 * h))
                .sum::<f64>()
        })
        .sum::<f64>()
        * h
        * h
}

/// Trapezoid sum over `[-l, l]` with spacing `h`.
pub fn trapezoid_1d(f: impl Fn(f64) -> f64, l: f64, h: f64) -> f64 {
    let n = (l / h).round() as i64;
    (-n..=n)
        .map(|i| if i.abs() == n { 0.5 } else { 1.0 } * f(i as f64 * h))
        .sum::<f64>()
        * h
}

/// Richardson step against a `1/L` truncation tail: `2E(2L) - E(L)`.
pub fn richardson(e: impl Fn(f64) -> f64, l: f64) -> f64 {
    2.0 * e(2.0 * l) - e(l)
}

/// Radial-filtered two-time P functional
/// `π⁻⁴ ∫ d²β₁ d²β₂ exp[vᵀQv] Ω(|β₁|) Ω(|β₂|) e^{2i pᵀv}` by plain
/// Gauss-Legendre in `|β|` and the trapezoid rule in `arg β`, with `Ω` from
/// the lens area.
pub fn radial_box_oracle(q: &DMatrix<f64>, a1: Complex64, a2: Complex64, w: f64, nr: usize, na: usize) -> Complex64 {
    use rayon::prelude::*;
    let rad = 0.5 * w;
    let disk = PI * rad * rad;
    let dth = 2.0 * PI / na as f64;
    let nodes: Vec<(f64, f64, f64)> = gl_interval(0.0, w, nr)
        .iter()
        .flat_map(|&(b, wt)| {
            let weight = wt * b * lens_area(b, rad) / disk * dth;
            (0..na).map(move |k| {
                let (s, c) = (k as f64 * dth).sin_cos();
                (b * c, b * s, weight)
            })
        })
        .collect();
    let qe = |i: usize, j: usize| q[(i, j)];
    let sum: Complex64 = nodes
        .par_iter()
        .map(|&(x1, y1, w1)| {
            let own = qe(0, 0) * x1 * x1 + 2.0 * qe(0, 1) * x1 * y1 + qe(1, 1) * y1 * y1;
            let cx = 2.0 * (x1 * qe(0, 2) + y1 * qe(1, 2));
            let cy = 2.0 * (x1 * qe(0, 3) + y1 * qe(1, 3));
            let phase1 = 2.0 * (x1 * a1.im - y1 * a1.re);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(x2, y2, w2) in &nodes {
                let expo = own + cx * x2 + cy * y2 + qe(2, 2) * x2 * x2 + 2.0 * qe(2, 3) * x2 * y2 + qe(3, 3) * y2 * y2;
                let phase = phase1 + 2.0 * (x2 * a2.im - y2 * a2.re);
                acc += Complex64::from_polar(w2 * expo.exp(), phase);
            }
            acc * w1
        })
        .sum();
    sum / PI.powi(4)
}

/// Two-time quadratic form from the double-double Fock evaluation.
pub fn fock_form(p: &ParametricParams, tau1: f64, tau2: f64) -> DMatrix<f64> {
    polarize(|v| fock_mtcf(p, tau1, tau2, c(v[0], v[1]), c(v[2], v[3]), 60).norm().ln(), 4)
}

/// Pattern function `(1/π)∫_{-w}^{w} |b| Ω(|b|) e^{b²/(2η) + isb} db`.
pub fn pattern_oracle(s: f64, w: f64, eta: f64) -> Complex64 {
    let rad = 0.5 * w;
    let disk = PI * rad * rad;
    gl_interval(0.0, w, 300)
        .iter()
        .flat_map(|&(b, wt)| [(b, wt), (-b, wt)])
        .map(|(b, wt)| {
            let amp = wt * b.abs() / PI * lens_area(b.abs(), rad) / disk * (b * b / (2.0 * eta)).exp();
            Complex64::from_polar(amp, s * b)
        })
        .sum()
}
