use crate::error::{Error, Result};
use crate::parity::{effective_chi, parity3_coeffs, reduce_angle};

/// Closed-form eigenvectors of the three-level M-matrix: `a` spans the `+1`
/// eigenspace, `b` the `-1` eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis3Vectors {
    pub a: [[f64; 8]; 4],
    pub b: [[f64; 8]; 4],
    /// `|sin 2chi|` is below `1e-8`, where the derivative construction of
    /// the `-1` vectors divides by zero. The component lists stay finite.
    pub singular_derivation: bool,
}

const SINGULAR_SIN2CHI: f64 = 1e-8;

impl Basis3Vectors {
    pub fn all(&self) -> impl Iterator<Item = &[f64; 8]> {
        self.a.iter().chain(self.b.iter())
    }

    /// Errors at parameter points where the derivation is singular.
    pub fn require_regular(self) -> Result<Self> {
        if self.singular_derivation {
            Err(Error::DegenerateParameterPoint("|sin 2chi| < 1e-8".into()))
        } else {
            Ok(self)
        }
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let vectors: Vec<&[f64; 8]> = self.all().collect();
        let mut worst: f64 = 0.0;
        for (i, u) in vectors.iter().enumerate() {
            for (j, v) in vectors.iter().enumerate() {
                let dot: f64 = u.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// On the `cos 2chi < 0` branch every formula is evaluated at the effective
/// angle `pi/2 - chi`, which is what replacing `cos 2chi` by `-cos 2chi` amounts to.
pub fn basis_vectors_3(chi: f64, theta: f64, rho: f64, phi: f64) -> Basis3Vectors {
    let x = effective_chi(chi);
    let (s, c) = x.sin_cos();
    let (s2, c2) = (2.0 * x).sin_cos();
    let (st, ct) = reduce_angle(theta).sin_cos();
    let (s2t, c2t) = (2.0 * reduce_angle(theta)).sin_cos();
    let (sr, cr) = reduce_angle(rho).sin_cos();
    let (sp, cp) = reduce_angle(phi).sin_cos();
    let (srp, crp) = (reduce_angle(rho) - reduce_angle(phi)).sin_cos();
    let sqrt3 = 3f64.sqrt();

    let p = parity3_coeffs(chi, theta, rho, phi).p;
    let a1 = p.map(|v| 0.5 * sqrt3 * v);
    let k = 0.5 * (3.0 + c2);
    let a2 = [
        -0.5 * k * s2t * crp,
        0.5 * k * s2t * srp,
        0.5 * k * c2t,
        -0.5 * s2 * st * cp,
        -0.5 * s2 * st * sp,
        -0.5 * s2 * ct * cr,
        -0.5 * s2 * ct * sr,
        0.5 * sqrt3 * s * s,
    ];
    let a3 = [-c * c2t * crp, c * c2t * srp, -c * s2t, -s * ct * cp, -s * ct * sp, s * st * cr, s * st * sr, 0.0];
    let a4 = [c * srp, c * crp, 0.0, -s * ct * sp, s * ct * cp, s * st * sr, -s * st * cr, 0.0];

    let b1 = [
        -0.5 * s2 * s2t * crp,
        0.5 * s2 * s2t * srp,
        0.5 * s2 * c2t,
        c2 * st * cp,
        c2 * st * sp,
        c2 * ct * cr,
        c2 * ct * sr,
        -0.5 * sqrt3 * s2,
    ];
    let b2 = [-s * c2t * crp, s * c2t * srp, -s * s2t, c * ct * cp, c * ct * sp, -c * st * cr, -c * st * sr, 0.0];
    let b3 = [0.0, 0.0, 0.0, -st * sp, st * cp, -ct * sr, ct * cr, 0.0];
    let b4 = [s * srp, s * crp, 0.0, c * ct * sp, -c * ct * cp, -c * st * sr, c * st * cr, 0.0];

    Basis3Vectors { a: [a1, a2, a3, a4], b: [b1, b2, b3, b4], singular_derivation: s2.abs() < SINGULAR_SIN2CHI }
}
