use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense row-major `n x n` complex matrix.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<C64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be positive");
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn scalar(n: usize, value: C64) -> Self {
        Self::identity(n).scale(value)
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from rows; fails on ragged input, an empty matrix or
    /// non-finite entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::MalformedMatrix("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedMatrix(format!(
                    "row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for z in row {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::MalformedMatrix(format!("non-finite entry in row {r}")));
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    /// Convenience constructor for literal fixtures; panics if ragged.
    pub fn from_array<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self { n: N, data: rows.iter().flatten().copied().collect() }
    }

    pub fn from_real<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self { n: N, data: rows.iter().flatten().map(|&x| C64::new(x, 0.0)).collect() }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n).map(<[C64]>::to_vec).collect()
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.n).map(|r| self[(r, c)]).collect()
    }

    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let n = columns.len();
        Self::from_fn(n, |r, c| columns[c][r])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.n, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, data: self.data.iter().map(C64::conj).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut acc = ZERO;
        for r in 0..n {
            for k in 0..n {
                acc += self.data[r * n + k] * other.data[k * n + r];
            }
        }
        acc
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n, actual: other.n })
        }
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .unwrap();
            if a[(pivot, col)].norm() <= 1e3 * f64::EPSILON * scale {
                return Err(Error::Singular);
            }
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].inv();
            for c in 0..n {
                a[(col, c)] *= p;
                inv[(col, c)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor == ZERO {
                    continue;
                }
                for c in 0..n {
                    let av = a[(col, c)];
                    let iv = inv[(col, c)];
                    a[(r, c)] -= factor * av;
                    inv[(r, c)] -= factor * iv;
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.n;
        for c in 0..n {
            self.data.swap(a * n + c, b * n + c);
        }
    }

    /// `(self + self^dagger) / 2`
    pub fn hermitian_part(&self) -> Self {
        (self + &self.dagger()).scale_real(0.5)
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.n + c]
    }
}

impl<'a> Mul<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

impl Mul for SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: SquareMatrix) -> SquareMatrix {
        &self * &rhs
    }
}

impl<'a> Add<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix sum");
        SquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: SquareMatrix) -> SquareMatrix {
        &self + &rhs
    }
}

impl<'a> Sub<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix difference");
        SquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: SquareMatrix) -> SquareMatrix {
        &self - &rhs
    }
}

impl Neg for &SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{})", self.n, self.n)?;
        for row in self.data.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}

/// Hermiticity and involution residuals of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Residuals {
    pub hermiticity: f64,
    pub involution: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.hermiticity.max(self.involution)
    }
}

pub fn residuals(m: &SquareMatrix) -> Residuals {
    let id = SquareMatrix::identity(m.n());
    Residuals {
        hermiticity: m.distance(&m.dagger()),
        involution: (m * m).distance(&id),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dagger_examples() {
        let sy = SquareMatrix::from_array([[ZERO, I], [-I, ZERO]]);
        assert_eq!(sy.dagger(), sy);

        let n = SquareMatrix::from_real([[0.0, 1.0], [0.0, 0.0]]);
        assert_eq!(n.dagger(), SquareMatrix::from_real([[0.0, 0.0], [1.0, 0.0]]));

        let m = SquareMatrix::from_array([[c(1.0, 1.0), ZERO], [ZERO, ZERO]]);
        assert_eq!(m.dagger(), SquareMatrix::from_array([[c(1.0, -1.0), ZERO], [ZERO, ZERO]]));
        assert_eq!(m.dagger().dagger(), m);
    }

    #[test]
    fn dagger_is_antilinear() {
        let m = SquareMatrix::from_array([[c(1.0, 2.0), c(-0.5, 0.3)], [c(0.1, -0.7), c(2.0, 0.0)]]);
        let a = c(0.3, -1.2);
        assert!(m.scale(a).dagger().distance(&m.dagger().scale(a.conj())) < 1e-15);
    }

    #[test]
    fn residual_examples() {
        let sx = SquareMatrix::from_real([[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(residuals(&sx), Residuals { hermiticity: 0.0, involution: 0.0 });

        let nil = SquareMatrix::from_real([[0.0, 1.0], [0.0, 0.0]]);
        let r = residuals(&nil);
        // m - m^dagger = [[0,1],[-1,0]] has norm sqrt(2); m^2 - 1 = -1 has norm sqrt(2)
        assert!((r.hermiticity - 2f64.sqrt()).abs() < 1e-15);
        assert!((r.involution - 2f64.sqrt()).abs() < 1e-15);

        for n in 1..=4 {
            let r = residuals(&SquareMatrix::scalar(n, c(2.0, 0.0)));
            assert_eq!(r.hermiticity, 0.0);
            assert!((r.involution - 3.0 * (n as f64).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = SquareMatrix::from_array([
            [c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0)],
            [c(0.0, 0.0), c(1.0, 1.0), c(3.0, 0.0)],
            [c(-1.0, 0.0), c(0.0, 0.2), c(0.5, 0.5)],
        ]);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).distance(&SquareMatrix::identity(3)) < 1e-13);
        assert_eq!(SquareMatrix::from_real([[1.0, 2.0], [2.0, 4.0]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn from_rows_rejects_bad_input() {
        assert!(SquareMatrix::from_rows(&[vec![ONE, ZERO], vec![ONE]]).is_err());
        assert!(SquareMatrix::from_rows(&[vec![c(f64::NAN, 0.0)]]).is_err());
        assert!(SquareMatrix::from_rows(&[]).is_err());
    }
}
