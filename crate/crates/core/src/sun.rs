//! Pauli and generalized Gell-Mann generators with SU(N) structure constants.
//!
//! Generators are normalized so that `Tr(l_i l_j) = 2 delta_ij`. The ordering
//! follows the standard Gell-Mann numbering: for each column `k = 2..=n` the
//! symmetric and antisymmetric off-diagonal pairs `(j, k)`, `j < k`, are
//! emitted in turn, followed by the `(k-1)`-th diagonal generator. For
//! `n = 2` this gives `(sigma_x, sigma_y, sigma_z)` and for `n = 3` the usual
//! `lambda_1 .. lambda_8`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, C64, I, ONE, ZERO};

pub const MIN_BASIS_DIM: usize = 2;
pub const MAX_BASIS_DIM: usize = 8;

#[derive(Debug, Clone)]
pub struct BasisSet {
    n: usize,
    generators: Vec<SquareMatrix>,
    d: Vec<f64>,
    f: Vec<f64>,
}

impl BasisSet {
    pub fn new(n: usize) -> Result<Self> {
        if !(MIN_BASIS_DIM..=MAX_BASIS_DIM).contains(&n) {
            return Err(Error::DimensionOutOfRange(n));
        }
        let generators = gell_mann(n);
        let (d, f) = structure_constants(&generators);
        Ok(Self { n, generators, d, f })
    }

    /// Process-wide cached basis for dimension `n`.
    pub fn shared(n: usize) -> Result<&'static BasisSet> {
        static CACHE: [OnceLock<BasisSet>; MAX_BASIS_DIM + 1] = [const { OnceLock::new() }; MAX_BASIS_DIM + 1];
        if !(MIN_BASIS_DIM..=MAX_BASIS_DIM).contains(&n) {
            return Err(Error::DimensionOutOfRange(n));
        }
        Ok(CACHE[n].get_or_init(|| BasisSet::new(n).expect("dimension checked above")))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of generators, `n^2 - 1`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[SquareMatrix] {
        &self.generators
    }

    /// Zero-based generator access.
    pub fn generator(&self, i: usize) -> &SquareMatrix {
        &self.generators[i]
    }

    /// Symmetric structure constant `d^{ijk}` (zero-based indices).
    pub fn d(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d[self.flat(i, j, k)]
    }

    /// Antisymmetric structure constant `f^{ijk}` (zero-based indices).
    pub fn f(&self, i: usize, j: usize, k: usize) -> f64 {
        self.f[self.flat(i, j, k)]
    }

    #[inline]
    fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.generators.len();
        (i * m + j) * m + k
    }

    /// `(c0, coeffs)` with `c0 = Tr(m)/n` and `coeffs_i = Tr(m l_i)/2`.
    pub fn expand(&self, m: &SquareMatrix) -> Result<(C64, Vec<C64>)> {
        if m.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: m.n() });
        }
        let c0 = m.trace() / self.n as f64;
        let coeffs = self.generators.iter().map(|g| m.trace_product(g) * 0.5).collect();
        Ok((c0, coeffs))
    }

    /// `c0 * 1 + sum_i coeffs_i l_i`.
    pub fn compose(&self, c0: C64, coeffs: &[C64]) -> Result<SquareMatrix> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: coeffs.len() });
        }
        let mut m = SquareMatrix::scalar(self.n, c0);
        for (g, &a) in self.generators.iter().zip(coeffs) {
            if a == ZERO {
                continue;
            }
            m = &m + &g.scale(a);
        }
        Ok(m)
    }

    /// Real-coefficient version of [`compose`](Self::compose).
    pub fn compose_real(&self, c0: f64, coeffs: &[f64]) -> Result<SquareMatrix> {
        let cc: Vec<C64> = coeffs.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.compose(C64::new(c0, 0.0), &cc)
    }

    /// Nonzero structure constants as `(i, j, k, d, f)` with one-based indices.
    pub fn nonzero_structure_constants(&self, threshold: f64) -> Vec<(usize, usize, usize, f64, f64)> {
        let m = self.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let d = self.d(i, j, k);
                    let f = self.f(i, j, k);
                    if d.abs() > threshold || f.abs() > threshold {
                        let clean = |x: f64| if x.abs() > threshold { x } else { 0.0 };
                        out.push((i + 1, j + 1, k + 1, clean(d), clean(f)));
                    }
                }
            }
        }
        out
    }

    /// Writes the nonzero structure constants as CSV with header `i,j,k,d,f`.
    pub fn write_structure_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,j,k,d,f")?;
        for (i, j, k, d, f) in self.nonzero_structure_constants(1e-12) {
            writeln!(out, "{i},{j},{k},{d},{f}")?;
        }
        Ok(())
    }
}

fn gell_mann(n: usize) -> Vec<SquareMatrix> {
    let mut out = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        for j in 0..k {
            let mut sym = SquareMatrix::zeros(n);
            sym[(j, k)] = ONE;
            sym[(k, j)] = ONE;
            out.push(sym);

            let mut anti = SquareMatrix::zeros(n);
            anti[(j, k)] = -I;
            anti[(k, j)] = I;
            out.push(anti);
        }
        // diagonal generator with k ones followed by -k
        let l = k as f64;
        let norm = (2.0 / (l * (l + 1.0))).sqrt();
        let mut diag = SquareMatrix::zeros(n);
        for i in 0..k {
            diag[(i, i)] = C64::new(norm, 0.0);
        }
        diag[(k, k)] = C64::new(-l * norm, 0.0);
        out.push(diag);
    }
    out
}

/// `d^{ijk} = Tr({l_i, l_j} l_k)/4`, `f^{ijk} = -i Tr([l_i, l_j] l_k)/4`.
fn structure_constants(generators: &[SquareMatrix]) -> (Vec<f64>, Vec<f64>) {
    let m = generators.len();
    let products: Vec<SquareMatrix> = (0..m * m).map(|ij| &generators[ij / m] * &generators[ij % m]).collect();
    let mut d = vec![0.0; m * m * m];
    let mut f = vec![0.0; m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let tijk = products[i * m + j].trace_product(&generators[k]);
                let tjik = products[j * m + i].trace_product(&generators[k]);
                let idx = (i * m + j) * m + k;
                d[idx] = 0.25 * (tijk + tjik).re;
                f[idx] = (C64::new(0.0, -0.25) * (tijk - tjik)).re;
            }
        }
    }
    (d, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn pauli_ordering_and_constants() {
        let b = BasisSet::new(2).unwrap();
        let sx = SquareMatrix::from_real([[0.0, 1.0], [1.0, 0.0]]);
        let sy = SquareMatrix::from_array([[ZERO, -I], [I, ZERO]]);
        let sz = SquareMatrix::from_real([[1.0, 0.0], [0.0, -1.0]]);
        assert_eq!(b.generators(), &[sx, sy, sz]);
        assert!((b.f(0, 1, 2) - 1.0).abs() < TOL);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!(b.d(i, j, k).abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn gell_mann_constants() {
        let b = BasisSet::new(3).unwrap();
        assert!((b.f(0, 1, 2) - 1.0).abs() < TOL);
        assert!((b.d(0, 0, 7) - 1.0 / 3f64.sqrt()).abs() < TOL);
        // a few classic values
        assert!((b.f(3, 4, 7) - 3f64.sqrt() / 2.0).abs() < TOL);
        assert!((b.f(0, 3, 6) - 0.5).abs() < TOL);
        assert!((b.d(7, 7, 7) + 1.0 / 3f64.sqrt()).abs() < TOL);
        let l4 = b.generator(3);
        let l5 = b.generator(4);
        assert!((l4.trace_product(l4) - C64::new(2.0, 0.0)).norm() < TOL);
        assert!(l4.trace_product(l5).norm() < TOL);
        // lambda_5 has -i in the (1,3) slot
        assert_eq!(l5[(0, 2)], -I);
    }

    #[test]
    fn dimension_range() {
        assert_eq!(BasisSet::new(1).unwrap_err(), Error::DimensionOutOfRange(1));
        assert_eq!(BasisSet::new(9).unwrap_err(), Error::DimensionOutOfRange(9));
    }

    #[test]
    fn generators_are_orthonormal_traceless_hermitian() {
        for n in 2..=5 {
            let b = BasisSet::new(n).unwrap();
            assert_eq!(b.len(), n * n - 1);
            for (i, gi) in b.generators().iter().enumerate() {
                assert!(gi.trace().norm() < TOL);
                assert!(gi.distance(&gi.dagger()) < TOL);
                for (j, gj) in b.generators().iter().enumerate() {
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!((gi.trace_product(gj) - C64::new(want, 0.0)).norm() < TOL);
                }
            }
        }
    }

    #[test]
    fn commutator_and_anticommutator_relations() {
        for n in 2..=4 {
            let b = BasisSet::new(n).unwrap();
            let m = b.len();
            for i in 0..m {
                for j in 0..m {
                    let (gi, gj) = (b.generator(i), b.generator(j));
                    let mut comm = SquareMatrix::zeros(n);
                    let mut anti = SquareMatrix::scalar(n, C64::new(if i == j { 4.0 / n as f64 } else { 0.0 }, 0.0));
                    for k in 0..m {
                        comm = &comm + &b.generator(k).scale(C64::new(0.0, 2.0 * b.f(i, j, k)));
                        anti = &anti + &b.generator(k).scale_real(2.0 * b.d(i, j, k));
                    }
                    assert!(gi.commutator(gj).distance(&comm) < 1e-11);
                    assert!(gi.anticommutator(gj).distance(&anti) < 1e-11);
                    for k in 0..m {
                        assert!((b.d(i, j, k) - b.d(j, i, k)).abs() < TOL);
                        assert!((b.d(i, j, k) - b.d(i, k, j)).abs() < TOL);
                        assert!((b.f(i, j, k) + b.f(j, i, k)).abs() < TOL);
                        assert!((b.f(i, j, k) + b.f(i, k, j)).abs() < TOL);
                    }
                }
            }
        }
    }

    #[test]
    fn expand_examples() {
        let b3 = BasisSet::new(3).unwrap();
        let (c0, coeffs) = b3.expand(&SquareMatrix::identity(3)).unwrap();
        assert!((c0 - ONE).norm() < TOL);
        assert!(coeffs.iter().all(|c| c.norm() < TOL));

        let (c0, coeffs) = b3.expand(b3.generator(4)).unwrap();
        assert!(c0.norm() < TOL);
        for (i, c) in coeffs.iter().enumerate() {
            let want = if i == 4 { ONE } else { ZERO };
            assert!((c - want).norm() < TOL);
        }

        let b2 = BasisSet::new(2).unwrap();
        let h = SquareMatrix::from_array([[-I * 3.0, C64::new(5.0, 0.0)], [C64::new(5.0, 0.0), I * 3.0]]);
        let (c0, coeffs) = b2.expand(&h).unwrap();
        assert!(c0.norm() < TOL);
        let want = [C64::new(5.0, 0.0), ZERO, C64::new(0.0, -3.0)];
        for (c, w) in coeffs.iter().zip(want) {
            assert!((c - w).norm() < TOL);
        }

        assert!(matches!(b2.expand(&SquareMatrix::identity(3)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(b2.compose(ZERO, &[ONE]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compose_sigma_x() {
        let b2 = BasisSet::new(2).unwrap();
        let m = b2.compose(ZERO, &[ONE, ZERO, ZERO]).unwrap();
        assert_eq!(m, SquareMatrix::from_real([[0.0, 1.0], [1.0, 0.0]]));
    }

    #[test]
    fn structure_csv_lists_nonzero_entries() {
        let b2 = BasisSet::new(2).unwrap();
        let mut buf = Vec::new();
        b2.write_structure_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i,j,k,d,f");
        // six permutations of (1,2,3) with f = +-1
        assert_eq!(lines.len(), 7);
        assert!(lines.contains(&"1,2,3,0,1"));
        assert!(lines.contains(&"2,1,3,0,-1"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn expand_compose_roundtrip(n in 2usize..=4, raw in prop::collection::vec(-3.0f64..3.0, 32)) {
            let b = BasisSet::new(n).unwrap();
            let m = b.len();
            let c0 = C64::new(raw[0], raw[1]);
            let coeffs: Vec<C64> = (0..m).map(|i| C64::new(raw[(2 * i + 2) % 32], raw[(2 * i + 3) % 32])).collect();
            let mat = b.compose(c0, &coeffs).unwrap();
            let (c0b, back) = b.expand(&mat).unwrap();
            prop_assert!((c0b - c0).norm() < 1e-12);
            for (x, y) in back.iter().zip(&coeffs) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn hermitian_iff_real_coefficients(n in 2usize..=3, raw in prop::collection::vec(-1.0f64..1.0, 9), imag in -1.0f64..1.0) {
            let b = BasisSet::new(n).unwrap();
            let real: Vec<f64> = raw.iter().take(b.len()).copied().collect();
            let h = b.compose_real(0.3, &real).unwrap();
            prop_assert!(h.distance(&h.dagger()) < 1e-12);
            let mut coeffs: Vec<C64> = real.iter().map(|&x| C64::new(x, 0.0)).collect();
            coeffs[0].im = imag;
            let nh = b.compose(C64::new(0.3, 0.0), &coeffs).unwrap();
            let hermitian = nh.distance(&nh.dagger()) < 1e-12;
            prop_assert_eq!(hermitian, imag.abs() < 1e-12);
        }
    }
}
