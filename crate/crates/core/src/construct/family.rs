use serde::{Deserialize, Serialize};

use super::basis3::basis_vectors_3;
use super::mmatrix::m_matrix_oracle;
use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, C64, I};
use crate::parity::{parity2, parity3, unit_vectors, ParityDescriptor, Sign};
use crate::sun::BasisSet;

/// Six-parameter two-level family `eps + (gamma n^r + i mu n^theta + i nu n^phi) . sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pt2Params {
    pub epsilon: f64,
    pub gamma: f64,
    pub mu: f64,
    pub nu: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Pt2Params {
    pub fn parity(&self) -> ParityDescriptor {
        parity2(self.theta, self.phi)
    }

    /// `gamma^2 - mu^2 - nu^2`.
    pub fn discriminant(&self) -> f64 {
        self.gamma * self.gamma - self.mu * self.mu - self.nu * self.nu
    }

    pub fn alpha(&self) -> [C64; 3] {
        let (nr, nt, nf) = unit_vectors(self.theta, self.phi);
        std::array::from_fn(|k| C64::new(self.gamma * nr[k], self.mu * nt[k] + self.nu * nf[k]))
    }

    pub fn is_finite(&self) -> bool {
        [self.epsilon, self.gamma, self.mu, self.nu, self.theta, self.phi].iter().all(|x| x.is_finite())
    }
}

/// Thirteen-parameter three-level family built on the closed-form M eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pt3Params {
    pub epsilon: f64,
    pub gamma: [f64; 4],
    pub mu: [f64; 4],
    pub chi: f64,
    pub theta: f64,
    pub rho: f64,
    pub phi: f64,
}

impl Pt3Params {
    pub fn parity(&self) -> ParityDescriptor {
        parity3(self.chi, self.theta, self.rho, self.phi, Sign::Plus)
    }

    /// Generator coefficients `alpha_i = sum_k gamma_k A^(k)_i + i sum_k mu_k B^(k)_i`.
    pub fn coefficients(&self) -> Vec<C64> {
        let v = basis_vectors_3(self.chi, self.theta, self.rho, self.phi);
        (0..8)
            .map(|i| {
                let re: f64 = (0..4).map(|k| self.gamma[k] * v.a[k][i]).sum();
                let im: f64 = (0..4).map(|k| self.mu[k] * v.b[k][i]).sum();
                C64::new(re, im)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum PtFamilyParams {
    Pt2(Pt2Params),
    Pt3(Pt3Params),
}

impl PtFamilyParams {
    pub fn n(&self) -> usize {
        match self {
            PtFamilyParams::Pt2(_) => 2,
            PtFamilyParams::Pt3(_) => 3,
        }
    }

    pub fn parity(&self) -> ParityDescriptor {
        match self {
            PtFamilyParams::Pt2(p) => p.parity(),
            PtFamilyParams::Pt3(p) => p.parity(),
        }
    }

    pub fn build(&self) -> SquareMatrix {
        match self {
            PtFamilyParams::Pt2(p) => build_h2(p),
            PtFamilyParams::Pt3(p) => build_h3(p),
        }
    }
}

pub fn build_h2(p: &Pt2Params) -> SquareMatrix {
    let [ax, ay, az] = p.alpha();
    let eps = C64::new(p.epsilon, 0.0);
    SquareMatrix::from_array([[eps + az, ax - I * ay], [ax + I * ay, eps - az]])
}

pub fn build_h3(p: &Pt3Params) -> SquareMatrix {
    BasisSet::shared(3)
        .expect("three-level basis")
        .compose(C64::new(p.epsilon, 0.0), &p.coefficients())
        .expect("eight coefficients for the three-level basis")
}

fn projection_residual(m: &super::MMatrix, v: &[f64], sign: f64) -> f64 {
    // component of v outside the `sign` eigenspace: (v - sign M v) / 2
    let mv = m.apply(v);
    v.iter().zip(&mv).map(|(x, y)| (0.5 * (x - sign * y)).powi(2)).sum::<f64>().sqrt()
}

/// `eps + sum_i (a_i + i b_i) lambda_i`, with `a` in the `+1` and `b` in the
/// `-1` eigenspace of the M-matrix of `parity`.
pub fn build_hn(epsilon: f64, a: &[f64], b: &[f64], parity: &ParityDescriptor, basis: &BasisSet, tol: f64) -> Result<SquareMatrix> {
    for v in [a, b] {
        if v.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), actual: v.len() });
        }
    }
    let m = m_matrix_oracle(parity, basis)?;
    for (v, sign, space) in [(a, 1.0, "plus"), (b, -1.0, "minus")] {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let residual = projection_residual(&m, v, sign);
        if residual > tol * norm.max(1.0) {
            return Err(Error::CoefficientNotInEigenspace { space, residual });
        }
    }
    let coeffs: Vec<C64> = a.iter().zip(b).map(|(&x, &y)| C64::new(x, y)).collect();
    basis.compose(C64::new(epsilon, 0.0), &coeffs)
}

/// `||P h^dagger P - h||_F`.
pub fn check_pt_symmetry(h: &SquareMatrix, parity: &ParityDescriptor) -> Result<f64> {
    h.check_same_dim(&parity.matrix)?;
    let p = &parity.matrix;
    Ok((&(p * &h.dagger()) * p).distance(h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseLabel {
    Unbroken,
    Broken,
    Exceptional,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Unbroken => "unbroken",
            PhaseLabel::Broken => "broken",
            PhaseLabel::Exceptional => "exceptional",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseClass {
    pub label: PhaseLabel,
    pub discriminant: f64,
}

/// Labels by the sign of `gamma^2 - mu^2 - nu^2`; the band `|d| <= tol * max(1, gamma^2 + mu^2 + nu^2)`
/// counts as exceptional.
pub fn classify2(p: &Pt2Params, tol: f64) -> PhaseClass {
    let discriminant = p.discriminant();
    let band = tol * (p.gamma * p.gamma + p.mu * p.mu + p.nu * p.nu).max(1.0);
    let label = if discriminant > band {
        PhaseLabel::Unbroken
    } else if discriminant < -band {
        PhaseLabel::Broken
    } else {
        PhaseLabel::Exceptional
    };
    PhaseClass { label, discriminant }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::split_eigenspaces;
    use crate::linalg::eigen_decompose;
    use crate::parity::{parity_generic, parity_trivial};
    use crate::random::{random_pt2, random_pt3, random_unitary};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn bbj() -> Pt2Params {
        Pt2Params { epsilon: 0.0, gamma: 5.0, mu: 3.0, nu: 0.0, theta: FRAC_PI_2, phi: 0.0 }
    }

    #[test]
    fn bbj_matrix() {
        let h = build_h2(&bbj());
        let want = SquareMatrix::from_array([[C64::new(0.0, -3.0), C64::new(5.0, 0.0)], [C64::new(5.0, 0.0), C64::new(0.0, 3.0)]]);
        assert!(h.distance(&want) < 1e-14);
        assert!(check_pt_symmetry(&h, &bbj().parity()).unwrap() < 1e-14);
    }

    #[test]
    fn explicit_entries_match() {
        // entrywise form of the two-level family
        let p = Pt2Params { epsilon: 0.3, gamma: 1.7, mu: -0.4, nu: 0.9, theta: 0.8, phi: 2.1 };
        let (st, ct) = p.theta.sin_cos();
        let e = |a: f64| C64::from_polar(1.0, a);
        let want = SquareMatrix::from_array([
            [C64::new(p.epsilon + p.gamma * ct, -p.mu * st), C64::new(p.gamma * st + p.nu, p.mu * ct) * e(-p.phi)],
            [C64::new(p.gamma * st - p.nu, p.mu * ct) * e(p.phi), C64::new(p.epsilon - p.gamma * ct, p.mu * st)],
        ]);
        assert!(build_h2(&p).distance(&want) < 1e-14);
    }

    #[test]
    fn hermitian_when_mu_nu_vanish() {
        let p = Pt2Params { epsilon: 0.5, gamma: 2.0, mu: 0.0, nu: 0.0, theta: 0.7, phi: 1.9 };
        let h = build_h2(&p);
        assert!(h.distance(&h.dagger()) < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let c = classify2(&bbj(), 1e-10);
        assert_eq!((c.label, c.discriminant), (PhaseLabel::Unbroken, 16.0));
        let c = classify2(&Pt2Params { gamma: 3.0, mu: 3.0, nu: 4.0, ..bbj() }, 1e-10);
        assert_eq!((c.label, c.discriminant), (PhaseLabel::Broken, -16.0));
        let c = classify2(&Pt2Params { gamma: 5.0, mu: 3.0, nu: 4.0, ..bbj() }, 1e-10);
        assert_eq!((c.label, c.discriminant), (PhaseLabel::Exceptional, 0.0));
    }

    #[test]
    fn check_pt_examples() {
        let h = SquareMatrix::from_real([[1.0, 2.0], [2.0, -1.0]]);
        assert_eq!(check_pt_symmetry(&h, &parity_trivial(2, Sign::Plus)).unwrap(), 0.0);
        let ih = SquareMatrix::scalar(2, I);
        let r = check_pt_symmetry(&ih, &parity2(0.3, 0.4)).unwrap();
        assert!((r - 8f64.sqrt()).abs() < 1e-14);
        assert!(check_pt_symmetry(&SquareMatrix::identity(3), &parity2(0.0, 0.0)).is_err());
    }

    #[test]
    fn three_level_special_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut p = random_pt3(&mut rng, 2.0, 2.0);
        p.mu = [0.0; 4];
        let h = build_h3(&p);
        assert!(h.distance(&h.dagger()) < 1e-13);

        let zero = Pt3Params { epsilon: 1.5, gamma: [0.0; 4], mu: [0.0; 4], chi: 0.0, theta: 0.0, rho: 0.0, phi: 0.0 };
        assert_eq!(build_h3(&zero), SquareMatrix::scalar(3, C64::new(1.5, 0.0)));
    }

    #[test]
    fn hn_matches_two_level_family() {
        let basis = BasisSet::new(2).unwrap();
        let p = Pt2Params { epsilon: -0.2, gamma: 1.3, mu: 0.4, nu: -0.7, theta: 2.2, phi: -1.0 };
        let (nr, nt, nf) = unit_vectors(p.theta, p.phi);
        let a: Vec<f64> = nr.iter().map(|x| p.gamma * x).collect();
        let b: Vec<f64> = (0..3).map(|k| p.mu * nt[k] + p.nu * nf[k]).collect();
        let h = build_hn(p.epsilon, &a, &b, &p.parity(), &basis, 1e-10).unwrap();
        assert!(h.distance(&build_h2(&p)).abs() < 1e-14);

        let hermitian = build_hn(1.0, &a, &[0.0; 3], &p.parity(), &basis, 1e-10).unwrap();
        assert!(hermitian.distance(&hermitian.dagger()) < 1e-15);

        // swapping the roles leaves both vectors in the wrong eigenspace
        let err = build_hn(0.0, &b, &a, &p.parity(), &basis, 1e-10).unwrap_err();
        assert!(matches!(err, Error::CoefficientNotInEigenspace { space: "plus", .. }));
    }

    #[test]
    fn hn_in_four_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let basis = BasisSet::new(4).unwrap();
        for _ in 0..20 {
            let u = random_unitary(&mut rng, 4);
            let parity = parity_generic(&u, &[1, -1, 1, -1], 1e-10).unwrap();
            let split = split_eigenspaces(&m_matrix_oracle(&parity, &basis).unwrap(), 1e-10).unwrap();
            let combine = |space: &[Vec<f64>], rng: &mut ChaCha8Rng| {
                let mut v = vec![0.0; basis.len()];
                for q in space {
                    let c: f64 = rng.gen_range(-1.0..1.0);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi += c * qi;
                    }
                }
                v
            };
            let a = combine(&split.plus, &mut rng);
            let b = combine(&split.minus, &mut rng);
            let h = build_hn(0.3, &a, &b, &parity, &basis, 1e-10).unwrap();
            assert!(check_pt_symmetry(&h, &parity).unwrap() < 1e-10);
        }
    }

    #[test]
    fn spectrum_follows_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let p = random_pt2(&mut rng);
            let class = classify2(&p, 1e-10);
            if class.discriminant.abs() < 1e-3 {
                continue;
            }
            let s = eigen_decompose(&build_h2(&p), 1e-10).unwrap();
            match class.label {
                PhaseLabel::Unbroken => assert!(s.max_imag() < 1e-10),
                PhaseLabel::Broken => {
                    assert!(s.max_imag() > 1e-6);
                    assert!((s.eigenvalues[0] - s.eigenvalues[1].conj()).norm() < 1e-10);
                }
                PhaseLabel::Exceptional => unreachable!(),
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn two_level_family_is_pt_symmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_pt2(&mut rng);
            prop_assert!(check_pt_symmetry(&build_h2(&p), &p.parity()).unwrap() <= 1e-12);
        }

        #[test]
        fn three_level_family_is_pt_symmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_pt3(&mut rng, 2.0, 2.0);
            let h = build_h3(&p);
            prop_assert!(check_pt_symmetry(&h, &p.parity()).unwrap() <= 1e-10);
            prop_assert!(check_pt_symmetry(&h, &parity3(p.chi, p.theta, p.rho, p.phi, Sign::Minus)).unwrap() <= 1e-10);
            prop_assert!((h.trace() - C64::new(3.0 * p.epsilon, 0.0)).norm() <= 1e-12);
        }
    }
}
