//! PT-normalized eigenstates, the C operator, the weight `W = PC`, its
//! square roots and the Hermitian-equivalent Hamiltonian.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::construct::{check_pt_symmetry, classify2, PhaseLabel, Pt2Params};
use crate::error::{Error, Result};
use crate::linalg::{eigen_decompose, hermitian_eigenvalues, hermitian_sqrt, inner, SquareMatrix, C64, DEFAULT_TOL, I};
use crate::parity::{unit_vectors, ParityDescriptor};

/// `psi^dagger P phi`. Indefinite.
pub fn pt_inner(psi: &[C64], phi: &[C64], parity: &ParityDescriptor) -> Result<C64> {
    for v in [psi, phi] {
        if v.len() != parity.n {
            return Err(Error::DimensionMismatch { expected: parity.n, actual: v.len() });
        }
    }
    Ok(inner(psi, &parity.matrix.mul_vec(phi)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm2Spectrum {
    pub e_plus: f64,
    pub e_minus: f64,
    pub kappa0: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub u: f64,
    pub state_plus: Vec<C64>,
    pub state_minus: Vec<C64>,
}

fn require_unbroken(p: &Pt2Params) -> Result<()> {
    if p.gamma == 0.0 {
        return Err(Error::GammaZero);
    }
    if classify2(p, DEFAULT_TOL).label != PhaseLabel::Unbroken {
        return Err(Error::BrokenOrExceptional);
    }
    Ok(())
}

/// `u = sqrt(gamma^2 / (gamma^2 - mu^2 - nu^2))`.
pub fn u_factor(p: &Pt2Params) -> Result<f64> {
    require_unbroken(p)?;
    Ok((p.gamma * p.gamma / p.discriminant()).sqrt())
}

/// Closed-form energies and eigenstates of the two-level family, scaled so
/// that `<E+-|P|E+-> = +-sign(gamma)`. The overall factor is `sqrt(u/2)`.
pub fn spectrum2_closed(p: &Pt2Params) -> Result<ClosedForm2Spectrum> {
    let u = u_factor(p)?;
    let (g, mu, nu) = (p.gamma, p.mu, p.nu);
    let root = p.discriminant().sqrt();
    let (st, ct) = p.theta.sin_cos();
    let kappa0 = C64::new(g * st + nu, mu * ct).arg();
    let kappa = |s: f64| C64::new(-g * ct + s * root, mu * st).arg();
    let (kappa_plus, kappa_minus) = (kappa(1.0), kappa(-1.0));
    let prefactor = (0.5 * u).sqrt();
    let state = |s: f64, k: f64| {
        let top = (1.0 + nu / g * st + s * root / g * ct).max(0.0).sqrt();
        let bottom = (1.0 - nu / g * st - s * root / g * ct).max(0.0).sqrt();
        vec![C64::from_polar(prefactor * top, kappa0 - p.phi), C64::from_polar(prefactor * bottom, k)]
    };
    Ok(ClosedForm2Spectrum {
        e_plus: p.epsilon + root,
        e_minus: p.epsilon - root,
        kappa0,
        kappa_plus,
        kappa_minus,
        u,
        state_plus: state(1.0, kappa_plus),
        state_minus: state(-1.0, kappa_minus),
    })
}

/// Eigenpair rescaled to PT norm `+-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PtEigenstate {
    pub energy: f64,
    pub state: Vec<C64>,
    /// `<E|P|E>`, `+1` or `-1`.
    pub pt_norm: f64,
}

/// Gap below which the C operator is not computed, relative to `max(1, ||H||)`.
pub const NEAR_EXCEPTIONAL_GAP: f64 = 1e-6;
/// Largest imaginary part accepted as a real eigenvalue, relative to `max(1, ||H||)`.
pub const REAL_SPECTRUM_TOL: f64 = 1e-8;

pub fn pt_eigenstates(h: &SquareMatrix, parity: &ParityDescriptor, tol: f64) -> Result<Vec<PtEigenstate>> {
    let scale = h.frobenius_norm().max(1.0);
    let residual = check_pt_symmetry(h, parity)?;
    if residual > tol * scale {
        return Err(Error::NotPtSymmetric { residual });
    }
    let spectrum = eigen_decompose(h, tol)?;
    let max_imag = spectrum.max_imag();
    if max_imag > REAL_SPECTRUM_TOL * scale {
        return Err(Error::ComplexSpectrum { max_imag });
    }
    let gap = spectrum.min_gap();
    if gap < NEAR_EXCEPTIONAL_GAP * scale {
        return Err(Error::DegenerateSpectrum { gap });
    }
    spectrum
        .eigenvalues
        .iter()
        .zip(spectrum.eigenvectors)
        .map(|(e, v)| {
            let norm = pt_inner(&v, &v, parity)?.re;
            if norm.abs() < 1e-12 {
                return Err(Error::NullPtNorm);
            }
            let s = norm.abs().sqrt();
            Ok(PtEigenstate { energy: e.re, state: v.into_iter().map(|z| z / s).collect(), pt_norm: norm.signum() })
        })
        .collect()
}

fn outer_sum(states: &[Vec<C64>]) -> SquareMatrix {
    let n = states[0].len();
    SquareMatrix::from_fn(n, |r, c| states.iter().map(|v| v[r] * v[c].conj()).sum())
}

/// `C = sum_i |E_i><E_i| P` over PT-normalized eigenstates.
pub fn build_c(h: &SquareMatrix, parity: &ParityDescriptor, tol: f64) -> Result<SquareMatrix> {
    let states: Vec<Vec<C64>> = pt_eigenstates(h, parity, tol)?.into_iter().map(|s| s.state).collect();
    Ok(&outer_sum(&states) * &parity.matrix)
}

/// `(u / gamma) alpha . sigma`.
pub fn c_closed2(p: &Pt2Params) -> Result<SquareMatrix> {
    let u = u_factor(p)?;
    let [ax, ay, az] = p.alpha().map(|a| a * (u / p.gamma));
    Ok(SquareMatrix::from_array([[az, ax - I * ay], [ax + I * ay, -az]]))
}

/// `beta = (nu / gamma) n^theta - (mu / gamma) n^phi`.
pub fn beta2(p: &Pt2Params) -> Result<[f64; 3]> {
    if p.gamma == 0.0 {
        return Err(Error::GammaZero);
    }
    let (_, nt, nf) = unit_vectors(p.theta, p.phi);
    Ok(std::array::from_fn(|k| (p.nu * nt[k] - p.mu * nf[k]) / p.gamma))
}

/// `W = P C`.
pub fn weight(parity: &ParityDescriptor, c: &SquareMatrix) -> Result<SquareMatrix> {
    parity.matrix.check_same_dim(c)?;
    Ok(&parity.matrix * c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    /// `||W H - H^dagger W||_F`.
    pub self_adjointness: f64,
}

pub fn weight_report(w: &SquareMatrix, h: &SquareMatrix) -> Result<WeightReport> {
    w.check_same_dim(h)?;
    Ok(WeightReport {
        hermiticity: w.distance(&w.dagger()),
        min_eigenvalue: hermitian_eigenvalues(w)[0],
        self_adjointness: (w * h).distance(&(&h.dagger() * w)),
    })
}

/// A validated Hermitian positive-definite weight.
#[derive(Debug, Clone, PartialEq)]
pub struct CptMetric {
    w: SquareMatrix,
}

impl CptMetric {
    pub fn new(w: SquareMatrix, tol: f64) -> Result<Self> {
        let scale = w.frobenius_norm().max(f64::MIN_POSITIVE);
        if w.distance(&w.dagger()) > tol * scale || hermitian_eigenvalues(&w)[0] <= tol * scale {
            return Err(Error::InvalidWeight);
        }
        Ok(Self { w })
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.w
    }

    pub fn inner(&self, psi: &[C64], phi: &[C64]) -> Result<C64> {
        for v in [psi, phi] {
            if v.len() != self.w.n() {
                return Err(Error::DimensionMismatch { expected: self.w.n(), actual: v.len() });
            }
        }
        Ok(inner(psi, &self.w.mul_vec(phi)))
    }
}

/// `psi^dagger W phi` after checking `W` is a valid weight.
pub fn cpt_inner(psi: &[C64], phi: &[C64], w: &SquareMatrix, tol: f64) -> Result<C64> {
    CptMetric::new(w.clone(), tol)?.inner(psi, phi)
}

/// Which closed-form square root of a two-level weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaBranch {
    Plus,
    Minus,
}

/// `eta_+- = (W +- 1) / sqrt(2 (u +- 1))`.
///
/// The minus root is evaluated as `(|t| + (u+1) T / |t|) / sqrt(2 (u+1))`,
/// with `T = t . sigma` the traceless part of the Hermitian part of `W`.
/// This equals the quotient when `det W = 1` (so `u - 1 = t^2 / (u + 1)`) and
/// never forms `u - 1`, which has few correct digits near the Hermitian limit.
pub fn eta2_closed(w: &SquareMatrix, u: f64, branch: EtaBranch, tol: f64) -> Result<SquareMatrix> {
    if w.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: w.n() });
    }
    match branch {
        EtaBranch::Plus => {
            let shifted = w + &SquareMatrix::identity(2);
            Ok(shifted.scale_real(1.0 / (2.0 * (u + 1.0)).sqrt()))
        }
        EtaBranch::Minus => {
            if (u - 1.0).abs() <= tol {
                return Err(Error::MinusBranchSingular);
            }
            // t . sigma from the Hermitian part, built so the diagonal is exactly (z, -z)
            let z = 0.5 * (w[(0, 0)].re - w[(1, 1)].re);
            let off = (w[(0, 1)] + w[(1, 0)].conj()) * 0.5;
            let traceless = SquareMatrix::from_array([[C64::new(z, 0.0), off], [off.conj(), C64::new(-z, 0.0)]]);
            let t = (z * z + off.norm_sqr()).sqrt();
            if t == 0.0 {
                return Err(Error::MinusBranchSingular);
            }
            let norm = (2.0 * (u + 1.0)).sqrt();
            let scalar = SquareMatrix::scalar(2, C64::new(t / norm, 0.0));
            Ok(&scalar + &traceless.scale_real((u + 1.0) / (t * norm)))
        }
    }
}

/// `eta H eta^{-1}`.
pub fn hermitian_equivalent(h: &SquareMatrix, eta: &SquareMatrix, tol: f64) -> Result<SquareMatrix> {
    h.check_same_dim(eta)?;
    let smallest = hermitian_eigenvalues(eta).iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
    if smallest <= tol {
        return Err(Error::SingularEta);
    }
    let inv = eta.inverse().map_err(|_| Error::SingularEta)?;
    Ok(&(eta * h) * &inv)
}

/// `psi^dagger P^T C^T phi`, the transpose-based pairing.
pub fn bbj_bmw_inner(psi: &[C64], phi: &[C64], c: &SquareMatrix, parity: &ParityDescriptor) -> Result<C64> {
    parity.matrix.check_same_dim(c)?;
    for v in [psi, phi] {
        if v.len() != c.n() {
            return Err(Error::DimensionMismatch { expected: c.n(), actual: v.len() });
        }
    }
    let w = &parity.matrix.transpose() * &c.transpose();
    Ok(inner(psi, &w.mul_vec(phi)))
}

/// Derived operators of an unbroken PT-symmetric Hamiltonian.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CptFrame {
    pub c: SquareMatrix,
    pub w: SquareMatrix,
    /// Principal square root of `w`.
    pub eta: SquareMatrix,
    /// Closed-form roots, two-level only; `eta_minus` is absent when `u = 1`.
    pub eta_plus: Option<SquareMatrix>,
    pub eta_minus: Option<SquareMatrix>,
    pub h: SquareMatrix,
    pub energies: Vec<f64>,
    pub pt_norms: Vec<f64>,
    pub w_min_eigenvalue: f64,
    pub residuals: BTreeMap<String, f64>,
}

impl CptFrame {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol && self.w_min_eigenvalue > 0.0
    }
}

pub fn build_frame(hamiltonian: &SquareMatrix, parity: &ParityDescriptor, tol: f64) -> Result<CptFrame> {
    let states = pt_eigenstates(hamiltonian, parity, tol)?;
    let vectors: Vec<Vec<C64>> = states.iter().map(|s| s.state.clone()).collect();
    let p = &parity.matrix;
    let n = hamiltonian.n();
    let id = SquareMatrix::identity(n);
    let c = &outer_sum(&vectors) * p;
    let w = weight(parity, &c)?;
    let report = weight_report(&w, hamiltonian)?;
    let eta = hermitian_sqrt(&w.hermitian_part(), tol)?;
    let h = hermitian_equivalent(hamiltonian, &eta, tol)?;

    let (eta_plus, eta_minus) = if n == 2 {
        let u = 0.5 * w.trace().re;
        (eta2_closed(&w, u, EtaBranch::Plus, tol).ok(), eta2_closed(&w, u, EtaBranch::Minus, tol).ok())
    } else {
        (None, None)
    };

    let mut orthonormality: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            orthonormality = orthonormality.max((inner(a, &w.mul_vec(b)) - target).norm());
        }
    }
    let energies: Vec<f64> = states.iter().map(|s| s.energy).collect();
    let spectrum_h = hermitian_eigenvalues(&h);
    let spectrum_match = spectrum_h.iter().zip(&energies).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let mut residuals = BTreeMap::new();
    residuals.insert("c_involution".to_string(), (&c * &c).distance(&id));
    residuals.insert("c_commutator".to_string(), c.commutator(hamiltonian).frobenius_norm());
    residuals.insert("c_pt".to_string(), (&(p * &c.dagger()) * p).distance(&c));
    residuals.insert("w_hermiticity".to_string(), report.hermiticity);
    residuals.insert("w_self_adjoint".to_string(), report.self_adjointness);
    residuals.insert("cpt_orthonormality".to_string(), orthonormality);
    residuals.insert("eta_square".to_string(), (&eta * &eta).distance(&w));
    residuals.insert("h_hermiticity".to_string(), h.distance(&h.dagger()));
    residuals.insert("spectrum_match".to_string(), spectrum_match);
    for (name, root) in [("eta_plus_square", &eta_plus), ("eta_minus_square", &eta_minus)] {
        if let Some(e) = root {
            residuals.insert(name.to_string(), (e * e).distance(&w));
        }
    }

    Ok(CptFrame {
        c,
        w,
        eta,
        eta_plus,
        eta_minus,
        h,
        energies,
        pt_norms: states.iter().map(|s| s.pt_norm).collect(),
        w_min_eigenvalue: report.min_eigenvalue,
        residuals,
    })
}
