use super::family::{build_h2, Pt2Params};
use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, I};
use crate::parity::{unit_vectors, ParityDescriptor};

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Recovers the two-level family parameters of a real-spectrum matrix.
///
/// Gauge: `gamma >= 0`; `phi = 0` when `n^r` is along the z axis; a scalar
/// matrix maps to `gamma = mu = nu = 0`, `theta = phi = 0`. Matrices at the
/// exceptional point (other than scalars) and in the broken phase give `Broken`.
pub fn fit_pt2(h: &SquareMatrix, tol: f64) -> Result<(Pt2Params, ParityDescriptor)> {
    if h.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: h.n() });
    }
    let scale = h.frobenius_norm().max(1.0);
    let eps = (h[(0, 0)] + h[(1, 1)]) * 0.5;
    if eps.im.abs() > tol * scale {
        return Err(Error::Broken);
    }
    let alpha = [(h[(0, 1)] + h[(1, 0)]) * 0.5, I * (h[(0, 1)] - h[(1, 0)]) * 0.5, (h[(0, 0)] - h[(1, 1)]) * 0.5];
    let a = alpha.map(|z| z.re);
    let b = alpha.map(|z| z.im);
    let aa = dot(&a, &a);
    let bb = dot(&b, &b);

    let params = if aa.sqrt() <= tol * scale && bb.sqrt() <= tol * scale {
        Pt2Params { epsilon: eps.re, gamma: 0.0, mu: 0.0, nu: 0.0, theta: 0.0, phi: 0.0 }
    } else {
        let band = tol * scale * scale;
        if dot(&a, &b).abs() > band || aa - bb <= band {
            return Err(Error::Broken);
        }
        let gamma = aa.sqrt();
        let nr = a.map(|x| x / gamma);
        let theta = nr[2].clamp(-1.0, 1.0).acos();
        let phi = if theta.sin().abs() < 1e-12 { 0.0 } else { nr[1].atan2(nr[0]) };
        let (_, nt, nf) = unit_vectors(theta, phi);
        Pt2Params { epsilon: eps.re, gamma, mu: dot(&b, &nt), nu: dot(&b, &nf), theta, phi }
    };
    let residual = build_h2(&params).distance(h);
    if residual > 10.0 * tol * scale {
        return Err(Error::NotPtSymmetric { residual });
    }
    Ok((params, params.parity()))
}
