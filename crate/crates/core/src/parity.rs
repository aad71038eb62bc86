//! Parity operators: Hermitian involutions `P = P^dagger`, `P^2 = 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{residuals, Residuals, SquareMatrix, C64};
use crate::sun::BasisSet;

/// Overall sign of a parity operator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Which formula set realizes a three-level parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cos2ChiBranch {
    NonNeg,
    Neg,
}

impl Cos2ChiBranch {
    pub fn of(chi: f64) -> Self {
        if (2.0 * reduce_angle(chi)).cos() >= 0.0 {
            Cos2ChiBranch::NonNeg
        } else {
            Cos2ChiBranch::Neg
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParityKind {
    Trivial,
    Parametrized2 { theta: f64, phi: f64 },
    Parametrized3 { chi: f64, theta: f64, rho: f64, phi: f64 },
    Generic { signature: Vec<i8>, rotation: SquareMatrix },
    /// A caller-supplied Hermitian involution.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityDescriptor {
    pub n: usize,
    pub kind: ParityKind,
    pub overall_sign: Sign,
    /// Set for three-level parities only.
    pub cos2chi_branch: Option<Cos2ChiBranch>,
    pub matrix: SquareMatrix,
}

impl ParityDescriptor {
    pub fn residuals(&self) -> Residuals {
        residuals(&self.matrix)
    }

    pub fn spec(&self) -> ParitySpec {
        match &self.kind {
            ParityKind::Trivial => ParitySpec::Trivial { n: self.n, sign: self.overall_sign },
            ParityKind::Parametrized2 { theta, phi } => ParitySpec::Parity2 { theta: *theta, phi: *phi },
            ParityKind::Parametrized3 { chi, theta, rho, phi } => ParitySpec::Parity3 {
                chi: *chi,
                theta: *theta,
                rho: *rho,
                phi: *phi,
                sign: self.overall_sign,
            },
            ParityKind::Generic { signature, rotation } => ParitySpec::Generic {
                rotation: rotation.clone(),
                signature: signature.clone(),
            },
            ParityKind::Explicit => ParitySpec::Matrix { matrix: self.matrix.clone() },
        }
    }
}

/// JSON description of a parity operator, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ParitySpec {
    Trivial {
        n: usize,
        #[serde(default)]
        sign: Sign,
    },
    Parity2 {
        theta: f64,
        phi: f64,
    },
    Parity3 {
        chi: f64,
        theta: f64,
        rho: f64,
        phi: f64,
        #[serde(default)]
        sign: Sign,
    },
    Generic {
        rotation: SquareMatrix,
        signature: Vec<i8>,
    },
    Matrix {
        matrix: SquareMatrix,
    },
}

impl ParitySpec {
    pub fn realize(&self, tol: f64) -> Result<ParityDescriptor> {
        match self {
            ParitySpec::Trivial { n, sign } => {
                if *n == 0 {
                    return Err(Error::DimensionOutOfRange(0));
                }
                Ok(parity_trivial(*n, *sign))
            }
            ParitySpec::Parity2 { theta, phi } => Ok(parity2(*theta, *phi)),
            ParitySpec::Parity3 { chi, theta, rho, phi, sign } => Ok(parity3(*chi, *theta, *rho, *phi, *sign)),
            ParitySpec::Generic { rotation, signature } => parity_generic(rotation, signature, tol),
            ParitySpec::Matrix { matrix } => parity_from_matrix(matrix, tol),
        }
    }
}

pub fn reduce_angle(x: f64) -> f64 {
    x.rem_euclid(2.0 * PI)
}

/// `(n^r, n^theta, n^phi)`: the radial unit vector and its two tangents.
pub fn unit_vectors(theta: f64, phi: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (st, ct) = reduce_angle(theta).sin_cos();
    let (sp, cp) = reduce_angle(phi).sin_cos();
    ([st * cp, st * sp, ct], [ct * cp, ct * sp, -st], [-sp, cp, 0.0])
}

/// `P = sign * 1`.
pub fn parity_trivial(n: usize, sign: Sign) -> ParityDescriptor {
    ParityDescriptor {
        n,
        kind: ParityKind::Trivial,
        overall_sign: sign,
        cos2chi_branch: None,
        matrix: SquareMatrix::scalar(n, C64::new(sign.value(), 0.0)),
    }
}

/// Two-level parity `n^r . sigma`.
pub fn parity2(theta: f64, phi: f64) -> ParityDescriptor {
    let (st, ct) = reduce_angle(theta).sin_cos();
    let phase = C64::from_polar(1.0, reduce_angle(phi));
    let matrix = SquareMatrix::from_array([
        [C64::new(ct, 0.0), phase.conj() * st],
        [phase * st, C64::new(-ct, 0.0)],
    ]);
    ParityDescriptor {
        n: 2,
        kind: ParityKind::Parametrized2 { theta, phi },
        overall_sign: Sign::Plus,
        cos2chi_branch: None,
        matrix,
    }
}

/// `(cos 2chi, sin 2chi, sin^2 chi)` after the branch rule: on the
/// `cos 2chi < 0` branch `cos 2chi` is replaced by `-cos 2chi`, and
/// `sin^2 chi = (1 - cos 2chi) / 2` follows the replacement.
fn branch_trig(chi: f64) -> (f64, f64, f64) {
    let (s2, c2) = (2.0 * reduce_angle(chi)).sin_cos();
    let c2 = match Cos2ChiBranch::of(chi) {
        Cos2ChiBranch::NonNeg => c2,
        Cos2ChiBranch::Neg => -c2,
    };
    (c2, s2, 0.5 * (1.0 - c2))
}

/// The angle that evaluates the non-negative-branch formulas to the same
/// values the branch rule produces: `chi` itself, or `pi/2 - chi`.
pub fn effective_chi(chi: f64) -> f64 {
    match Cos2ChiBranch::of(chi) {
        Cos2ChiBranch::NonNeg => reduce_angle(chi),
        Cos2ChiBranch::Neg => FRAC_PI_2 - reduce_angle(chi),
    }
}

/// Gell-Mann expansion coefficients of a three-level parity,
/// `P = +-(p0 * 1 + sum_i p_i lambda_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityCoefficients3 {
    pub p0: f64,
    pub p: [f64; 8],
}

impl ParityCoefficients3 {
    pub fn compose(&self, basis: &BasisSet, sign: Sign) -> Result<SquareMatrix> {
        if basis.n() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, actual: basis.n() });
        }
        let s = sign.value();
        let coeffs: Vec<f64> = self.p.iter().map(|x| s * x).collect();
        basis.compose_real(s * self.p0, &coeffs)
    }
}

pub fn parity3_coeffs(chi: f64, theta: f64, rho: f64, phi: f64) -> ParityCoefficients3 {
    let (c2, s2, sin_sq) = branch_trig(chi);
    let (st, ct) = reduce_angle(theta).sin_cos();
    let (s2t, c2t) = (2.0 * reduce_angle(theta)).sin_cos();
    let (sr, cr) = reduce_angle(rho).sin_cos();
    let (sp, cp) = reduce_angle(phi).sin_cos();
    let (srp, crp) = (reduce_angle(rho) - reduce_angle(phi)).sin_cos();
    ParityCoefficients3 {
        p0: 1.0 / 3.0,
        p: [
            -sin_sq * s2t * crp,
            sin_sq * s2t * srp,
            sin_sq * c2t,
            s2 * st * cp,
            s2 * st * sp,
            s2 * ct * cr,
            s2 * ct * sr,
            (1.0 + 3.0 * c2) / (2.0 * 3f64.sqrt()),
        ],
    }
}

/// Four-parameter three-level parity, written out entrywise.
pub fn parity3(chi: f64, theta: f64, rho: f64, phi: f64, sign: Sign) -> ParityDescriptor {
    let (c2, s2, sin_sq) = branch_trig(chi);
    let (st, ct) = reduce_angle(theta).sin_cos();
    let s2t = (2.0 * reduce_angle(theta)).sin();
    let rho_r = reduce_angle(rho);
    let phi_r = reduce_angle(phi);
    let e = |angle: f64| C64::from_polar(1.0, angle);
    let re = |x: f64| C64::new(x, 0.0);
    let m = SquareMatrix::from_array([
        [re(c2 * st * st + ct * ct), e(rho_r - phi_r) * (-sin_sq * s2t), e(-phi_r) * (s2 * st)],
        [e(phi_r - rho_r) * (-sin_sq * s2t), re(c2 * ct * ct + st * st), e(-rho_r) * (s2 * ct)],
        [e(phi_r) * (s2 * st), e(rho_r) * (s2 * ct), re(-c2)],
    ]);
    ParityDescriptor {
        n: 3,
        kind: ParityKind::Parametrized3 { chi, theta, rho, phi },
        overall_sign: sign,
        cos2chi_branch: Some(Cos2ChiBranch::of(chi)),
        matrix: m.scale_real(sign.value()),
    }
}

/// `rotation * diag(signature) * rotation^dagger`.
pub fn parity_generic(rotation: &SquareMatrix, signature: &[i8], tol: f64) -> Result<ParityDescriptor> {
    let n = rotation.n();
    if signature.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: signature.len() });
    }
    if signature.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidSignature);
    }
    let unitarity = (rotation * &rotation.dagger()).distance(&SquareMatrix::identity(n));
    if unitarity > tol * (n as f64).sqrt() {
        return Err(Error::NotUnitary { residual: unitarity });
    }
    let diag: Vec<C64> = signature.iter().map(|&s| C64::new(s as f64, 0.0)).collect();
    let matrix = (&(rotation * &SquareMatrix::diagonal(&diag)) * &rotation.dagger()).hermitian_part();
    let overall_sign = if signature.iter().all(|&s| s == -1) { Sign::Minus } else { Sign::Plus };
    Ok(ParityDescriptor {
        n,
        kind: ParityKind::Generic { signature: signature.to_vec(), rotation: rotation.clone() },
        overall_sign,
        cos2chi_branch: None,
        matrix,
    })
}

/// Wraps an arbitrary matrix after checking it is a Hermitian involution.
pub fn parity_from_matrix(m: &SquareMatrix, tol: f64) -> Result<ParityDescriptor> {
    let r = residuals(m);
    let scale = (m.n() as f64).sqrt();
    if r.hermiticity > tol * scale || r.involution > tol * scale {
        return Err(Error::NotInvolution { hermiticity: r.hermiticity, involution: r.involution });
    }
    Ok(ParityDescriptor {
        n: m.n(),
        kind: ParityKind::Explicit,
        overall_sign: Sign::Plus,
        cos2chi_branch: None,
        matrix: m.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{I, ONE, ZERO};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    const TIGHT: f64 = 1e-12;

    fn assert_involution(p: &ParityDescriptor) {
        let r = p.residuals();
        assert!(r.hermiticity <= TIGHT && r.involution <= TIGHT, "{r:?}");
    }

    #[test]
    fn trivial_parities() {
        let p = parity_trivial(2, Sign::Plus);
        assert_eq!(p.matrix, SquareMatrix::identity(2));
        let m = parity_trivial(3, Sign::Minus);
        assert_eq!(m.matrix, SquareMatrix::identity(3).scale_real(-1.0));
        assert_eq!(m.residuals(), Residuals { hermiticity: 0.0, involution: 0.0 });
    }

    #[test]
    fn parity2_examples() {
        let sx = parity2(FRAC_PI_2, 0.0);
        assert!(sx.matrix.distance(&SquareMatrix::from_real([[0.0, 1.0], [1.0, 0.0]])) < 1e-15);
        for phi in [0.0, 1.0, -7.3] {
            let sz = parity2(0.0, phi);
            assert!(sz.matrix.distance(&SquareMatrix::from_real([[1.0, 0.0], [0.0, -1.0]])) < 1e-15);
        }
        // pure sigma_y at theta = pi/2, phi = pi/2
        let sy = parity2(FRAC_PI_2, FRAC_PI_2);
        assert!(sy.matrix.distance(&SquareMatrix::from_array([[ZERO, -I], [I, ZERO]])) < 1e-15);
    }

    #[test]
    fn parity3_coeff_examples() {
        for (theta, rho, phi) in [(0.0, 0.0, 0.0), (1.2, -0.4, 2.9)] {
            let c = parity3_coeffs(0.0, theta, rho, phi);
            assert_eq!(c.p0, 1.0 / 3.0);
            for i in 0..7 {
                assert!(c.p[i].abs() < 1e-15);
            }
            assert!((c.p[7] - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        let c = parity3_coeffs(FRAC_PI_4, 0.0, 0.0, 0.0);
        let want = [0.0, 0.0, 0.5, 0.0, 0.0, 1.0, 0.0, 1.0 / (2.0 * 3f64.sqrt())];
        for (x, w) in c.p.iter().zip(want) {
            assert!((x - w).abs() < 1e-15, "{:?}", c.p);
        }
        let b = BasisSet::new(3).unwrap();
        let m = c.compose(&b, Sign::Plus).unwrap();
        assert!(residuals(&m).max() < TIGHT);
    }

    #[test]
    fn parity3_examples() {
        let p = parity3(0.0, 0.7, 1.1, -0.3, Sign::Plus);
        assert!(p.matrix.distance(&SquareMatrix::from_real([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]])) < 1e-15);
        assert_eq!(p.cos2chi_branch, Some(Cos2ChiBranch::NonNeg));

        let q = parity3(FRAC_PI_2, 0.7, 1.1, -0.3, Sign::Plus);
        assert_eq!(q.cos2chi_branch, Some(Cos2ChiBranch::Neg));
        assert_involution(&q);
        assert!((q.matrix.trace() - ONE).norm() < TIGHT);

        let r = parity3(1.0, 0.2, 0.3, 0.4, Sign::Minus);
        assert!((r.matrix.trace() + ONE).norm() < TIGHT);
    }

    #[test]
    fn branch_boundary_is_continuous() {
        let below = parity3(FRAC_PI_4 - 1e-9, 0.3, 0.5, 0.7, Sign::Plus);
        let above = parity3(FRAC_PI_4 + 1e-9, 0.3, 0.5, 0.7, Sign::Plus);
        assert_eq!(below.cos2chi_branch, Some(Cos2ChiBranch::NonNeg));
        assert_eq!(above.cos2chi_branch, Some(Cos2ChiBranch::Neg));
        assert!(below.matrix.distance(&above.matrix) < 1e-8);
    }

    #[test]
    fn generic_examples() {
        let p = parity_generic(&SquareMatrix::identity(2), &[1, -1], 1e-10).unwrap();
        assert_eq!(p.matrix, SquareMatrix::from_real([[1.0, 0.0], [0.0, -1.0]]));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = crate::random::random_unitary(&mut rng, 4);
        let all_plus = parity_generic(&u, &[1, 1, 1, 1], 1e-10).unwrap();
        assert!(all_plus.matrix.distance(&SquareMatrix::identity(4)) < 1e-12);
        let split = parity_generic(&u, &[1, 1, -1, -1], 1e-10).unwrap();
        assert_involution(&split);

        let not_unitary = SquareMatrix::from_real([[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(parity_generic(&not_unitary, &[1, -1], 1e-10), Err(Error::NotUnitary { .. })));
        assert_eq!(parity_generic(&SquareMatrix::identity(2), &[1, 0], 1e-10).unwrap_err(), Error::InvalidSignature);
    }

    #[test]
    fn explicit_matrix_must_be_involution() {
        assert!(parity_from_matrix(&SquareMatrix::from_real([[0.0, 1.0], [1.0, 0.0]]), 1e-10).is_ok());
        assert!(matches!(
            parity_from_matrix(&SquareMatrix::from_real([[0.0, 1.0], [0.0, 0.0]]), 1e-10),
            Err(Error::NotInvolution { .. })
        ));
    }

    #[test]
    fn spec_json_roundtrip() {
        let json = r#"{"kind":"parity3","chi":0.1,"theta":0.2,"rho":0.3,"phi":0.4,"sign":-1}"#;
        let spec: ParitySpec = serde_json::from_str(json).unwrap();
        let p = spec.realize(1e-10).unwrap();
        assert_eq!(p.overall_sign, Sign::Minus);
        assert_eq!(p.spec(), spec);
        assert!(serde_json::from_str::<ParitySpec>(r#"{"kind":"trivial","n":2,"sign":3}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn parity2_is_traceless_involution(theta in -10.0f64..10.0, phi in -10.0f64..10.0) {
            let p = parity2(theta, phi);
            let r = p.residuals();
            prop_assert!(r.hermiticity <= TIGHT && r.involution <= TIGHT);
            prop_assert!(p.matrix.trace().norm() <= TIGHT);
        }

        #[test]
        fn parity3_is_involution_with_unit_trace(chi in -10.0f64..10.0, theta in -10.0f64..10.0,
                                                  rho in -10.0f64..10.0, phi in -10.0f64..10.0, minus in any::<bool>()) {
            let sign = if minus { Sign::Minus } else { Sign::Plus };
            let p = parity3(chi, theta, rho, phi, sign);
            let r = p.residuals();
            prop_assert!(r.hermiticity <= TIGHT && r.involution <= TIGHT);
            prop_assert!((p.matrix.trace() - C64::new(sign.value(), 0.0)).norm() <= TIGHT);
        }

        #[test]
        fn coefficients_reproduce_matrix(chi in -10.0f64..10.0, theta in -10.0f64..10.0,
                                         rho in -10.0f64..10.0, phi in -10.0f64..10.0) {
            let b = BasisSet::new(3).unwrap();
            for sign in [Sign::Plus, Sign::Minus] {
                let composed = parity3_coeffs(chi, theta, rho, phi).compose(&b, sign).unwrap();
                prop_assert!(composed.distance(&parity3(chi, theta, rho, phi, sign).matrix) <= TIGHT);
            }
        }
    }

    #[test]
    fn coefficients_match_on_branch_boundary() {
        let b = BasisSet::new(3).unwrap();
        for chi in [FRAC_PI_4, 3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4, -FRAC_PI_4] {
            let composed = parity3_coeffs(chi, 0.4, 1.3, 2.2).compose(&b, Sign::Plus).unwrap();
            let p = parity3(chi, 0.4, 1.3, 2.2, Sign::Plus);
            assert!(composed.distance(&p.matrix) <= TIGHT);
            assert_involution(&p);
        }
    }
}
