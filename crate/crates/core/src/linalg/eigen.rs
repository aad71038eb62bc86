//! General (non-Hermitian) eigendecomposition for small dense matrices.
//!
//! Dimensions up to 3 use closed-form characteristic-polynomial roots with a
//! Newton polish on the polynomial and one inverse-iteration pass per
//! eigenpair. Larger matrices go through a Hessenberg reduction followed by a
//! single-shift complex QR iteration, capped at `200 * n` iterations.

use super::matrix::{vec_norm, SquareMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors; the largest-modulus component is real positive.
    pub eigenvectors: Vec<Vec<C64>>,
    pub is_degenerate: bool,
    /// Frobenius condition number of the eigenvector matrix (infinite when singular).
    pub condition_estimate: f64,
}

impl Spectrum {
    pub fn max_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.im.abs()).fold(0.0, f64::max)
    }

    pub fn min_gap(&self) -> f64 {
        min_pairwise_gap(&self.eigenvalues)
    }

    /// Largest `||m v - E v||` over the returned pairs.
    pub fn max_residual(&self, m: &SquareMatrix) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&e, v)| {
                let mv = m.mul_vec(v);
                mv.iter().zip(v).map(|(a, b)| (a - e * b).norm_sqr()).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }
}

pub fn eigen_decompose(m: &SquareMatrix, tol: f64) -> Result<Spectrum> {
    let n = m.n();
    if n > MAX_DIM {
        return Err(Error::DimensionOutOfRange(n));
    }
    if !m.is_finite() {
        return Err(Error::MalformedMatrix("non-finite entry".into()));
    }
    let norm = m.frobenius_norm();
    let mut eigenvalues = match n {
        1 => vec![m[(0, 0)]],
        2 => quadratic_roots(m),
        3 => cubic_roots(m),
        _ => qr_eigenvalues(m)?,
    };
    sort_eigenvalues(&mut eigenvalues, norm);

    let passes = if n <= 3 { 1 } else { 2 };
    let eigenvectors: Vec<Vec<C64>> = eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let mut v = inverse_iteration(m, e, k, passes);
            fix_phase(&mut v);
            v
        })
        .collect();

    let is_degenerate = min_pairwise_gap(&eigenvalues) < tol * norm.max(1.0);
    let condition_estimate = {
        let vm = SquareMatrix::from_columns(&eigenvectors);
        match vm.inverse() {
            Ok(inv) => vm.frobenius_norm() * inv.frobenius_norm(),
            Err(_) => f64::INFINITY,
        }
    };
    Ok(Spectrum { eigenvalues, eigenvectors, is_degenerate, condition_estimate })
}

pub fn min_pairwise_gap(values: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

/// Roots of a 2x2 characteristic polynomial, computed on the traceless part.
fn quadratic_roots(m: &SquareMatrix) -> Vec<C64> {
    let shift = m.trace() * 0.5;
    let a = m[(0, 0)] - shift;
    let disc = a * a + m[(0, 1)] * m[(1, 0)];
    let mut t = disc.sqrt();
    // polish t^2 = disc
    if t != ZERO {
        let refined = t - (t * t - disc) / (t * 2.0);
        if (refined * refined - disc).norm() < (t * t - disc).norm() {
            t = refined;
        }
    }
    vec![shift - t, shift + t]
}

/// Roots of a 3x3 characteristic polynomial by Cardano's formula on the
/// trace-shifted matrix `B = m - (tr m / 3) 1`, whose characteristic
/// polynomial is the depressed cubic `t^3 + p t + q`.
fn cubic_roots(m: &SquareMatrix) -> Vec<C64> {
    let shift = m.trace() / 3.0;
    let b = SquareMatrix::from_fn(3, |r, c| if r == c { m[(r, c)] - shift } else { m[(r, c)] });
    let minor = |i: usize, j: usize| b[(i, i)] * b[(j, j)] - b[(i, j)] * b[(j, i)];
    let p = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let det = b[(0, 0)] * minor(1, 2) - b[(0, 1)] * (b[(1, 0)] * b[(2, 2)] - b[(1, 2)] * b[(2, 0)])
        + b[(0, 2)] * (b[(1, 0)] * b[(2, 1)] - b[(1, 1)] * b[(2, 0)]);
    let q = -det;

    let poly = |t: C64| t * t * t + p * t + q;
    let dpoly = |t: C64| t * t * 3.0 + p;

    let disc = (q * 0.5).powu(2) + (p / 3.0).powu(3);
    let sd = disc.sqrt();
    let w1 = -q * 0.5 + sd;
    let w2 = -q * 0.5 - sd;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let roots: Vec<C64> = if w.norm() == 0.0 {
        vec![ZERO; 3]
    } else {
        let u = w.powf(1.0 / 3.0);
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        (0..3)
            .map(|k| {
                let uk = u * omega.powu(k);
                uk - p / (uk * 3.0)
            })
            .collect()
    };

    roots
        .into_iter()
        .map(|mut t| {
            for _ in 0..3 {
                let d = dpoly(t);
                if d == ZERO {
                    break;
                }
                let next = t - poly(t) / d;
                if poly(next).norm() < poly(t).norm() {
                    t = next;
                } else {
                    break;
                }
            }
            t + shift
        })
        .collect()
}

fn hessenberg(m: &SquareMatrix) -> SquareMatrix {
    let n = m.n();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|r| h[(r, k)]).collect();
        let xnorm = vec_norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let mut v = x.clone();
        v[0] += phase * xnorm;
        let vnorm = vec_norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // left: rows k+1.., H <- (1 - 2 v v^dagger) H
        for c in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, c)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, c)] -= *vi * dot * 2.0;
            }
        }
        // right: columns k+1.., H <- H (1 - 2 v v^dagger)
        for r in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(i, vi)| h[(r, k + 1 + i)] * vi).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(r, k + 1 + i)] -= dot * vi.conj() * 2.0;
            }
        }
        for r in k + 2..n {
            h[(r, k)] = ZERO;
        }
    }
    h
}

fn qr_eigenvalues(m: &SquareMatrix) -> Result<Vec<C64>> {
    let n = m.n();
    let cap = 200 * n;
    let mut h = hessenberg(m);
    let mut eigenvalues = vec![ZERO; n];
    let mut hi = n - 1;
    let mut iterations = 0usize;
    let mut since_deflation = 0usize;

    loop {
        if hi == 0 {
            eigenvalues[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let scale = if scale == 0.0 { h.max_abs() } else { scale };
            if h[(l, l - 1)].norm() <= f64::EPSILON * scale {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eigenvalues[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        iterations += 1;
        since_deflation += 1;
        if iterations > cap {
            return Err(Error::NonConvergence { iterations: cap });
        }

        let shift = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm() * 0.4375)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - l);
        for k in l..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (ONE, ZERO) } else { (x / r, y / r) };
            for col in k..=hi {
                let a = h[(k, col)];
                let b = h[(k + 1, col)];
                h[(k, col)] = c.conj() * a + s.conj() * b;
                h[(k + 1, col)] = -s * a + c * b;
            }
            rotations.push((c, s));
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let k = l + idx;
            for row in l..=(k + 1).min(hi) {
                let a = h[(row, k)];
                let b = h[(row, k + 1)];
                h[(row, k)] = a * c + b * s;
                h[(row, k + 1)] = -a * s.conj() + b * c.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(eigenvalues)
}

/// Eigenvalue of the trailing 2x2 block closer to its bottom-right entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let l1 = (a + d) * 0.5 + disc;
    let l2 = (a + d) * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Solves `(m - shift) y = b` with partial pivoting, replacing vanishing
/// pivots by a tiny multiple of the matrix scale.
fn shifted_solve(m: &SquareMatrix, shift: C64, rhs: &[C64]) -> Vec<C64> {
    let n = m.n();
    let tiny = f64::EPSILON * m.max_abs().max(shift.norm()).max(f64::MIN_POSITIVE);
    let mut a = SquareMatrix::from_fn(n, |r, c| if r == c { m[(r, c)] - shift } else { m[(r, c)] });
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm())).unwrap();
        a.swap_rows(col, pivot);
        b.swap(col, pivot);
        if a[(col, col)].norm() < tiny {
            a[(col, col)] = C64::new(tiny, 0.0);
        }
        let p = a[(col, col)];
        for r in col + 1..n {
            let f = a[(r, col)] / p;
            if f == ZERO {
                continue;
            }
            for c in col..n {
                let v = a[(col, c)];
                a[(r, c)] -= f * v;
            }
            let bv = b[col];
            b[r] -= f * bv;
        }
    }
    let mut x = vec![ZERO; n];
    for r in (0..n).rev() {
        let s: C64 = (r + 1..n).map(|c| a[(r, c)] * x[c]).sum();
        x[r] = (b[r] - s) / a[(r, r)];
    }
    x
}

fn inverse_iteration(m: &SquareMatrix, e: C64, index: usize, passes: usize) -> Vec<C64> {
    let n = m.n();
    let mut v: Vec<C64> = (0..n)
        .map(|j| C64::from_polar(1.0 + 0.1 * j as f64, 0.7 * j as f64 + 1.3 * index as f64))
        .collect();
    for _ in 0..passes {
        let y = shifted_solve(m, e, &v);
        let norm = vec_norm(&y);
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        v = y.into_iter().map(|z| z / norm).collect();
    }
    let norm = vec_norm(&v);
    v.into_iter().map(|z| z / norm).collect()
}

/// Makes the largest-modulus component real and positive.
pub fn fix_phase(v: &mut [C64]) {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let pivot = v[best];
    if pivot.norm() == 0.0 {
        return;
    }
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[best] = C64::new(v[best].norm(), 0.0);
}

/// Insertion sort by real part, falling back to the imaginary part when the
/// real parts agree to rounding.
fn sort_eigenvalues(values: &mut [C64], scale: f64) {
    let eps = 1e-12 * scale.max(1.0);
    let before = |a: &C64, b: &C64| {
        if (a.re - b.re).abs() > eps {
            a.re < b.re
        } else {
            a.im < b.im
        }
    };
    for i in 1..values.len() {
        let mut j = i;
        while j > 0 && before(&values[j], &values[j - 1]) {
            values.swap(j, j - 1);
            j -= 1;
        }
    }
}
