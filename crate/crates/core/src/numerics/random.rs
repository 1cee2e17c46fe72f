use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type StreamRng = ChaCha20Rng;

/// Independent, reproducible substream `stream` of the master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws one sample of a bivariate normal distribution.
///
/// Always consumes exactly two standard normal variates so that stream
/// positions do not depend on the covariance.
pub fn sample_bivariate_normal<R: Rng + ?Sized>(
    mean: [f64; 2],
    cov: [[f64; 2]; 2],
    rng: &mut R,
) -> Result<[f64; 2]> {
    let l = cholesky_2x2(cov)?;
    let z0: f64 = rng.sample(StandardNormal);
    let z1: f64 = rng.sample(StandardNormal);
    Ok([
        mean[0] + l[0][0] * z0,
        mean[1] + l[1][0] * z0 + l[1][1] * z1,
    ])
}

/// Lower Cholesky factor of a 2x2 positive-semidefinite matrix.
pub(crate) fn cholesky_2x2(cov: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let [[a, b], [b2, c]] = cov;
    if ![a, b, b2, c].iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("covariance"));
    }
    let scale = a.abs().max(c.abs()).max(1.0);
    let tol = 1e-12 * scale;
    if (b - b2).abs() > tol {
        return Err(Error::NotPsd(format!("asymmetric covariance {cov:?}")));
    }
    let det = a * c - b * b;
    if a < -tol || c < -tol || det < -tol * scale {
        return Err(Error::NotPsd(format!(
            "covariance {cov:?} has determinant {det:e}"
        )));
    }
    let l00 = a.max(0.0).sqrt();
    let l10 = if l00 > 0.0 { b / l00 } else { 0.0 };
    let l11 = (c - l10 * l10).max(0.0).sqrt();
    Ok([[l00, 0.0], [l10, l11]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(cov: [[f64; 2]; 2], m: usize, seed: u64) -> ([f64; 2], [[f64; 2]; 2]) {
        let mut rng = stream_rng(seed, 0);
        let mut s = [0.0; 2];
        let mut ss = [[0.0; 2]; 2];
        for _ in 0..m {
            let x = sample_bivariate_normal([0.0, 0.0], cov, &mut rng).unwrap();
            for i in 0..2 {
                s[i] += x[i];
                for j in 0..2 {
                    ss[i][j] += x[i] * x[j];
                }
            }
        }
        let mf = m as f64;
        let mean = [s[0] / mf, s[1] / mf];
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = ss[i][j] / mf - mean[i] * mean[j];
            }
        }
        (mean, c)
    }

    #[test]
    fn zero_covariance_returns_mean() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..10 {
            let x = sample_bivariate_normal([0.25, -3.0], [[0.0; 2]; 2], &mut rng).unwrap();
            assert_eq!(x, [0.25, -3.0]);
        }
    }

    #[test]
    fn identity_covariance() {
        let (mean, c) = moments([[1.0, 0.0], [0.0, 1.0]], 1_000_000, 7);
        assert!(mean[0].abs() < 0.005 && mean[1].abs() < 0.005);
        assert!((c[0][0] - 1.0).abs() < 0.01);
        assert!((c[1][1] - 1.0).abs() < 0.01);
        assert!(c[0][1].abs() < 0.01);
    }

    #[test]
    fn correlated() {
        let (_, c) = moments([[1.0, 0.5], [0.5, 1.0]], 1_000_000, 11);
        let rho = c[0][1] / (c[0][0] * c[1][1]).sqrt();
        assert!((rho - 0.5).abs() < 0.01, "rho {rho}");
    }

    #[test]
    fn rejects_indefinite() {
        let mut rng = stream_rng(1, 0);
        let err = sample_bivariate_normal([0.0; 2], [[1.0, 2.0], [2.0, 1.0]], &mut rng).unwrap_err();
        assert!(matches!(err, Error::NotPsd(_)));
        assert!(sample_bivariate_normal([0.0; 2], [[-1.0, 0.0], [0.0, 1.0]], &mut rng).is_err());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let draw = |seed, stream| {
            let mut rng = stream_rng(seed, stream);
            (0..8).map(|_| rng.random::<u64>()).collect::<Vec<_>>()
        };
        assert_eq!(draw(42, 3), draw(42, 3));
        assert_ne!(draw(42, 3), draw(42, 4));
        assert_ne!(draw(42, 3), draw(43, 3));
    }
}
