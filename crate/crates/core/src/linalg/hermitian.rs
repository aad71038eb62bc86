//! Hermitian spectral routines.
//!
//! A Hermitian `H = X + iY` is handled through its real symmetric embedding
//! `[[X, -Y], [Y, X]]`, diagonalized by cyclic Jacobi rotations. Every
//! eigenvalue of `H` appears twice in the embedding, and a spectral function
//! `f(H)` is read back from the blocks of `f(embedding)`.

use super::matrix::{SquareMatrix, C64};
use crate::error::{Error, Result};

struct SymmetricEigen {
    values: Vec<f64>,
    /// Column-major eigenvectors, `vectors[k]` belongs to `values[k]`.
    vectors: Vec<Vec<f64>>,
}

fn embed(h: &SquareMatrix) -> Vec<Vec<f64>> {
    let n = h.n();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for r in 0..n {
        for c in 0..n {
            let z = h[(r, c)];
            a[r][c] = z.re;
            a[r + n][c + n] = z.re;
            a[r][c + n] = -z.im;
            a[r + n][c] = z.im;
        }
    }
    a
}

fn jacobi(mut a: Vec<Vec<f64>>) -> SymmetricEigen {
    let m = a.len();
    let mut v = vec![vec![0.0; m]; m];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let total: f64 = a.iter().flatten().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off <= 1e-32 * total || off == 0.0 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..m).map(|i| a[i][i]).collect();
    let vectors = (0..m).map(|k| (0..m).map(|r| v[r][k]).collect()).collect();
    SymmetricEigen { values, vectors }
}

/// Eigenvalues of the Hermitian part of `h`, ascending.
pub fn hermitian_eigenvalues(h: &SquareMatrix) -> Vec<f64> {
    let eig = jacobi(embed(&h.hermitian_part()));
    let mut values = eig.values;
    values.sort_by(f64::total_cmp);
    values.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}

/// Applies `f` to the spectrum of the Hermitian part of `h`.
pub fn hermitian_function(h: &SquareMatrix, f: impl Fn(f64) -> f64) -> SquareMatrix {
    let n = h.n();
    let eig = jacobi(embed(&h.hermitian_part()));
    let m = 2 * n;
    let mut out = vec![vec![0.0; m]; m];
    for (lambda, vec) in eig.values.iter().zip(&eig.vectors) {
        let fl = f(*lambda);
        for r in 0..m {
            let vr = vec[r] * fl;
            if vr == 0.0 {
                continue;
            }
            for c in 0..m {
                out[r][c] += vr * vec[c];
            }
        }
    }
    let result = SquareMatrix::from_fn(n, |r, c| C64::new(0.5 * (out[r][c] + out[r + n][c + n]), 0.5 * (out[r + n][c] - out[r][c + n])));
    result.hermitian_part()
}

/// Principal square root of a Hermitian positive-definite matrix.
pub fn hermitian_sqrt(w: &SquareMatrix, tol: f64) -> Result<SquareMatrix> {
    let scale = w.frobenius_norm().max(f64::MIN_POSITIVE);
    let residual = w.distance(&w.dagger());
    if residual > tol * scale {
        return Err(Error::NotHermitian { residual });
    }
    let lowest = hermitian_eigenvalues(w)[0];
    if lowest <= tol * scale {
        return Err(Error::NotPositiveDefinite { eigenvalue: lowest });
    }
    Ok(hermitian_function(w, f64::sqrt))
}
