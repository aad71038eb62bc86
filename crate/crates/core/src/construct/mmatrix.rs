use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, SquareMatrix, C64};
use crate::parity::{unit_vectors, ParityCoefficients3, ParityDescriptor, ParityKind};
use crate::sun::BasisSet;

/// Real symmetric map on generator-coefficient space. The PT condition on
/// `H = eps + sum alpha_i lambda_i` reads `M alpha = conj(alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl MMatrix {
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for k in 0..dim {
            for i in 0..dim {
                entries.push(f(k, i));
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.entries[k * self.dim + i]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries.chunks(self.dim).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn max_abs_diff(&self, other: &MMatrix) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn symmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.dim {
            for i in 0..k {
                worst = worst.max((self.get(k, i) - self.get(i, k)).abs());
            }
        }
        worst
    }

    /// Frobenius norm of `M^2 - 1`.
    pub fn involution_residual(&self) -> f64 {
        let n = self.dim;
        let mut sum = 0.0;
        for k in 0..n {
            for i in 0..n {
                let v: f64 = (0..n).map(|j| self.get(k, j) * self.get(j, i)).sum();
                let target = if k == i { 1.0 } else { 0.0 };
                sum += (v - target).powi(2);
            }
        }
        sum.sqrt()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&SquareMatrix::from_fn(self.dim, |r, c| C64::new(self.get(r, c), 0.0)))
    }

    /// Number of eigenvalues within `tol` of `+1` and of `-1`.
    pub fn multiplicities(&self, tol: f64) -> (usize, usize) {
        let values = self.eigenvalues();
        let plus = values.iter().filter(|v| (*v - 1.0).abs() <= tol).count();
        let minus = values.iter().filter(|v| (*v + 1.0).abs() <= tol).count();
        (plus, minus)
    }
}

/// `M = -1 + 2 n^r n^r` for a two-level parity `n^r . sigma`.
pub fn m_matrix2(parity: &ParityDescriptor) -> Result<MMatrix> {
    let ParityKind::Parametrized2 { theta, phi } = parity.kind else {
        return Err(Error::WrongParityKind { expected: "parametrized two-level" });
    };
    let (nr, _, _) = unit_vectors(theta, phi);
    Ok(MMatrix::from_fn(3, |k, i| 2.0 * nr[k] * nr[i] - if k == i { 1.0 } else { 0.0 }))
}

/// Structure-constant form of the three-level M-matrix.
pub fn m_matrix3(coeffs: &ParityCoefficients3, basis: &BasisSet) -> Result<MMatrix> {
    if basis.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, actual: basis.n() });
    }
    let p0 = coeffs.p0;
    let p = &coeffs.p;
    let len = 8;
    // pd[i][l] = sum_j P_j d^{ijl}, pf[i][l] = sum_j P_j f^{ijl}
    let mut pd = vec![[0.0; 8]; len];
    let mut pf = vec![[0.0; 8]; len];
    for i in 0..len {
        for l in 0..len {
            for (j, pj) in p.iter().enumerate() {
                pd[i][l] += pj * basis.d(i, j, l);
                pf[i][l] += pj * basis.f(i, j, l);
            }
        }
    }
    Ok(MMatrix::from_fn(len, |k, i| {
        let mut v = if k == i { p0 * p0 } else { 0.0 };
        v += 2.0 * p0 * pd[i][k];
        v += 2.0 / 3.0 * p[k] * p[i];
        // sum_m P_m d^{lmk} = pd[k][l] since d is symmetric, and
        // sum_m P_m f^{lmk} = -pf[k][l] since f^{lmk} = -f^{kml}
        for l in 0..len {
            v += pd[i][l] * pd[k][l] - pf[i][l] * pf[k][l];
        }
        v
    }))
}

/// `M_ki = (1/2) Re Tr(lambda_k P lambda_i P)`, valid in any dimension.
pub fn m_matrix_oracle(parity: &ParityDescriptor, basis: &BasisSet) -> Result<MMatrix> {
    if parity.n != basis.n() {
        return Err(Error::DimensionMismatch { expected: basis.n(), actual: parity.n });
    }
    let p = &parity.matrix;
    let conjugated: Vec<SquareMatrix> = basis.generators().iter().map(|l| &(p * l) * p).collect();
    Ok(MMatrix::from_fn(basis.len(), |k, i| 0.5 * basis.generator(k).trace_product(&conjugated[i]).re))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenbasisSplit {
    pub plus: Vec<Vec<f64>>,
    pub minus: Vec<Vec<f64>>,
}

const PROJECTION_FLOOR: f64 = 1e-8;

/// Orthonormal bases of the `+1` and `-1` eigenspaces, built by Gram-Schmidt
/// on the projections of the standard basis vectors in index order.
pub fn split_eigenspaces(m: &MMatrix, tol: f64) -> Result<EigenbasisSplit> {
    let residual = m.involution_residual().max(m.symmetry_residual());
    if residual > tol * (m.dim() as f64).sqrt().max(1.0) {
        return Err(Error::SpectrumNotPlusMinusOne { residual });
    }
    let project = |sign: f64| {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for j in 0..m.dim() {
            let mut v: Vec<f64> = (0..m.dim())
                .map(|r| 0.5 * (if r == j { 1.0 } else { 0.0 } + sign * m.get(r, j)))
                .collect();
            for _ in 0..2 {
                for q in &basis {
                    let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= d * qi;
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > PROJECTION_FLOOR {
                basis.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        basis
    };
    let split = EigenbasisSplit { plus: project(1.0), minus: project(-1.0) };
    if split.plus.len() + split.minus.len() != m.dim() {
        return Err(Error::SpectrumNotPlusMinusOne { residual });
    }
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parity::{parity2, parity3, parity3_coeffs, parity_generic, parity_trivial, Sign};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn diag_of(m: &MMatrix) -> Vec<f64> {
        (0..m.dim()).map(|i| m.get(i, i)).collect()
    }

    #[test]
    fn two_level_examples() {
        let m = m_matrix2(&parity2(0.0, 0.0)).unwrap();
        assert_eq!(diag_of(&m), vec![-1.0, -1.0, 1.0]);
        assert!(m.symmetry_residual() == 0.0);
        let m = m_matrix2(&parity2(FRAC_PI_2, 0.0)).unwrap();
        let d = diag_of(&m);
        assert!((d[0] - 1.0).abs() < 1e-15 && (d[1] + 1.0).abs() < 1e-15 && (d[2] + 1.0).abs() < 1e-15);
        assert!(matches!(m_matrix2(&parity_trivial(2, Sign::Plus)), Err(Error::WrongParityKind { .. })));
    }

    #[test]
    fn oracle_examples() {
        let b2 = BasisSet::new(2).unwrap();
        let m = m_matrix_oracle(&parity2(0.0, 0.0), &b2).unwrap();
        assert!(m.max_abs_diff(&MMatrix::from_fn(3, |k, i| if k != i { 0.0 } else if k == 2 { 1.0 } else { -1.0 })) < 1e-15);
        let b3 = BasisSet::new(3).unwrap();
        let id = m_matrix_oracle(&parity_trivial(3, Sign::Plus), &b3).unwrap();
        assert!(id.max_abs_diff(&MMatrix::from_fn(8, |k, i| if k == i { 1.0 } else { 0.0 })) < 1e-15);
        assert!(matches!(m_matrix_oracle(&parity2(0.1, 0.2), &b3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn oracle_in_four_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let b4 = BasisSet::new(4).unwrap();
        for _ in 0..20 {
            let u = crate::random::random_unitary(&mut rng, 4);
            let p = parity_generic(&u, &[1, 1, -1, -1], 1e-10).unwrap();
            let m = m_matrix_oracle(&p, &b4).unwrap();
            assert!(m.symmetry_residual() < 1e-12);
            assert!(m.involution_residual() < 1e-10);
        }
    }

    #[test]
    fn split_examples() {
        let m = MMatrix::from_fn(3, |k, i| if k != i { 0.0 } else if k == 2 { 1.0 } else { -1.0 });
        let s = split_eigenspaces(&m, 1e-10).unwrap();
        assert_eq!(s.plus, vec![vec![0.0, 0.0, 1.0]]);
        assert_eq!(s.minus, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let bad = MMatrix::from_fn(2, |k, i| if k == i { 0.5 } else { 0.0 });
        assert!(matches!(split_eigenspaces(&bad, 1e-10), Err(Error::SpectrumNotPlusMinusOne { .. })));
    }

    #[test]
    fn three_level_split_contains_parity_and_derivatives() {
        let b = BasisSet::new(3).unwrap();
        let (chi, theta, rho, phi) = (0.3, 1.1, -0.4, 2.0);
        let m = m_matrix3(&parity3_coeffs(chi, theta, rho, phi), &b).unwrap();
        let s = split_eigenspaces(&m, 1e-10).unwrap();
        assert_eq!((s.plus.len(), s.minus.len()), (4, 4));
        let in_span = |space: &[Vec<f64>], v: &[f64]| {
            let mut rest = v.to_vec();
            for q in space {
                let d: f64 = q.iter().zip(v).map(|(a, b)| a * b).sum();
                for (r, qi) in rest.iter_mut().zip(q) {
                    *r -= d * qi;
                }
            }
            rest.iter().map(|x| x * x).sum::<f64>().sqrt()
        };
        let p = parity3_coeffs(chi, theta, rho, phi).p;
        assert!(in_span(&s.plus, &p) < 1e-10);
        let h = 1e-6;
        let deriv = |f: &dyn Fn(f64) -> [f64; 8]| -> Vec<f64> {
            f(h).iter().zip(f(-h)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        };
        let d_chi = deriv(&|e| parity3_coeffs(chi + e, theta, rho, phi).p);
        let d_theta = deriv(&|e| parity3_coeffs(chi, theta + e, rho, phi).p);
        assert!(in_span(&s.minus, &d_chi) < 1e-8);
        assert!(in_span(&s.minus, &d_theta) < 1e-8);

        // spectral identity
        let rebuilt = MMatrix::from_fn(8, |k, i| {
            s.plus.iter().map(|v| v[k] * v[i]).sum::<f64>() - s.minus.iter().map(|v| v[k] * v[i]).sum::<f64>()
        });
        assert!(rebuilt.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn three_level_agrees_with_oracle_at_branch_boundary() {
        let b = BasisSet::new(3).unwrap();
        for chi in [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4] {
            let m = m_matrix3(&parity3_coeffs(chi, 0.5, 0.6, 0.7), &b).unwrap();
            let o = m_matrix_oracle(&parity3(chi, 0.5, 0.6, 0.7, Sign::Plus), &b).unwrap();
            assert!(m.max_abs_diff(&o) < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn two_level_matches_oracle(theta in -7.0f64..7.0, phi in -7.0f64..7.0) {
            let b = BasisSet::new(2).unwrap();
            let p = parity2(theta, phi);
            let m = m_matrix2(&p).unwrap();
            prop_assert!(m.max_abs_diff(&m_matrix_oracle(&p, &b).unwrap()) <= 1e-12);
            prop_assert_eq!(m.multiplicities(1e-8), (1, 2));
        }

        #[test]
        fn three_level_matches_oracle(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = BasisSet::new(3).unwrap();
            let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-7.0..7.0));
            let sign = if rng.gen() { Sign::Plus } else { Sign::Minus };
            let m = m_matrix3(&parity3_coeffs(a[0], a[1], a[2], a[3]), &b).unwrap();
            let o = m_matrix_oracle(&parity3(a[0], a[1], a[2], a[3], sign), &b).unwrap();
            prop_assert!(m.max_abs_diff(&o) <= 1e-10);
            prop_assert_eq!(m.multiplicities(1e-8), (4, 4));
            let p = parity3_coeffs(a[0], a[1], a[2], a[3]).p;
            let mp = m.apply(&p);
            prop_assert!(mp.iter().zip(&p).all(|(x, y)| (x - y).abs() <= 1e-12));
        }
    }
}
