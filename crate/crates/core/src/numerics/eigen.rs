use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigen-decomposition of a real symmetric matrix.
///
/// Eigenvalues are sorted ascending; column `i` of `eigenvectors` belongs to
/// `eigenvalues[i]` and its largest-magnitude entry is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigResult {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SymEigResult {
    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        v * DMatrix::from_diagonal(&self.eigenvalues) * v.transpose()
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// Jacobi is slow for large matrices but delivers eigenvectors that are
/// orthogonal to working precision, which the quadratic-form rotations
/// downstream rely on. The matrices handled here are at most a few dozen
/// rows.
pub fn eig_sym(a: &DMatrix<f64>) -> Result<SymEigResult> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: a.ncols(),
        });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("eig_sym"));
    }
    let scale = a.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let mut asymmetry = 0.0_f64;
    for i in 0..n {
        for j in 0..i {
            asymmetry = asymmetry.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if asymmetry > 1e-12 * scale {
        return Err(Error::NotSymmetric { asymmetry });
    }

    let mut m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = DMatrix::<f64>::identity(n, n);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 || off < 1e-300 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut vec = v.column(i).clone_owned();
        let pivot = vec
            .iter()
            .copied()
            .fold(0.0_f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            vec.neg_mut();
        }
        eigenvectors.set_column(col, &vec);
    }
    Ok(SymEigResult {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity() {
        let r = eig_sym(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(r.eigenvalues.as_slice(), &[1.0, 1.0]);
        assert_eq!(r.eigenvectors, DMatrix::identity(2, 2));
    }

    #[test]
    fn diagonal_is_sorted() {
        let r = eig_sym(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -3.0])).unwrap();
        assert_eq!(r.eigenvalues.as_slice(), &[-3.0, 2.0]);
        assert_eq!(r.eigenvectors, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn swap_matrix() {
        let r = eig_sym(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((r.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((r.eigenvalues[1] - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // λ = -1: (1, -1)/√2 up to sign; λ = +1: (1, 1)/√2
        assert!((r.eigenvectors[(0, 0)].abs() - h).abs() < 1e-15);
        assert!((r.eigenvectors[(0, 0)] + r.eigenvectors[(1, 0)]).abs() < 1e-15);
        assert!((r.eigenvectors[(0, 1)] - h).abs() < 1e-15);
        assert!((r.eigenvectors[(1, 1)] - h).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 1.0]);
        assert!(matches!(eig_sym(&a), Err(Error::NotSymmetric { .. })));
    }

    fn symmetric(n: usize, entries: Vec<f64>) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, n);
        let mut it = entries.into_iter();
        for i in 0..n {
            for j in 0..=i {
                let x = it.next().unwrap();
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        a
    }

    proptest! {
        #[test]
        fn orthogonal_and_reconstructs(
            (n, entries) in (1usize..=8).prop_flat_map(|n| (Just(n), prop::collection::vec(-10.0f64..10.0, n * (n + 1) / 2)))
        ) {
            let a = symmetric(n, entries);
            let r = eig_sym(&a).unwrap();
            let v = &r.eigenvectors;
            let gram = v.transpose() * v;
            prop_assert!((gram - DMatrix::identity(n, n)).amax() < 1e-12);
            let norm = a.amax().max(1e-300);
            prop_assert!((r.reconstruct() - &a).amax() <= 1e-10 * norm);
            for i in 0..n {
                let av = &a * v.column(i);
                let lv = v.column(i) * r.eigenvalues[i];
                prop_assert!((av - lv).amax() <= 1e-10 * norm);
            }
            for w in r.eigenvalues.as_slice().windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
        }
    }
}
