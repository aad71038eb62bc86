//! Named two-level reductions of the general family and parameter maps from
//! other published parametrizations.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::construct::{build_h2, fit_pt2, Pt2Params};
use crate::cpt::pt_eigenstates;
use crate::error::{Error, Result};
use crate::linalg::{inner, SquareMatrix, C64, I};

/// A special-case Hamiltonian with its C operator as displayed in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialCase {
    pub h: SquareMatrix,
    pub c: SquareMatrix,
    pub params: Pt2Params,
}

/// `mu = nu = 0`: every 2x2 Hermitian matrix.
pub fn hermitian_case(epsilon: f64, gamma: f64, theta: f64, phi: f64) -> SquareMatrix {
    build_h2(&Pt2Params { epsilon, gamma, mu: 0.0, nu: 0.0, theta, phi })
}

fn closed_u(gamma: f64, mu: f64) -> Result<f64> {
    if gamma * gamma <= mu * mu {
        return Err(Error::BrokenOrExceptional);
    }
    Ok((gamma * gamma / (gamma * gamma - mu * mu)).sqrt())
}

/// `H = [[eps - i mu, gamma], [gamma, eps + i mu]]` with parity `sigma_x`.
pub fn bbj_case(epsilon: f64, gamma: f64, mu: f64) -> Result<SpecialCase> {
    let u = closed_u(gamma, mu)?;
    let r = mu / gamma;
    let h = SquareMatrix::from_array([[C64::new(epsilon, -mu), C64::new(gamma, 0.0)], [C64::new(gamma, 0.0), C64::new(epsilon, mu)]]);
    let c = SquareMatrix::from_array([[C64::new(0.0, -r), C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), C64::new(0.0, r)]]).scale_real(u);
    Ok(SpecialCase { h, c, params: Pt2Params { epsilon, gamma, mu, nu: 0.0, theta: FRAC_PI_2, phi: 0.0 } })
}

/// Symmetric family with the real one-parameter parity `[[cos, sin], [sin, -cos]]`.
pub fn bmw_case(epsilon: f64, gamma: f64, mu: f64, theta: f64) -> Result<SpecialCase> {
    let u = closed_u(gamma, mu)?;
    let (st, ct) = theta.sin_cos();
    let r = mu / gamma;
    let off = C64::new(gamma * st, mu * ct);
    let h = SquareMatrix::from_array([[C64::new(epsilon + gamma * ct, -mu * st), off], [off, C64::new(epsilon - gamma * ct, mu * st)]]);
    let c_off = C64::new(st, r * ct);
    let c = SquareMatrix::from_array([[C64::new(ct, -r * st), c_off], [c_off, C64::new(-ct, r * st)]]).scale_real(u);
    Ok(SpecialCase { h, c, params: Pt2Params { epsilon, gamma, mu, nu: 0.0, theta, phi: 0.0 } })
}

/// Eigenstates of a symmetric-family Hamiltonian rephased so that
/// `P conj(|E>) = |E>`, in ascending energy order.
pub fn bmw_pt_eigenstates(case: &SpecialCase, tol: f64) -> Result<Vec<Vec<C64>>> {
    let parity = case.params.parity();
    pt_eigenstates(&case.h, &parity, tol)?
        .into_iter()
        .map(|s| {
            let v = s.state;
            let pv: Vec<C64> = parity.matrix.mul_vec(&v.iter().map(|z| z.conj()).collect::<Vec<_>>());
            // P conj(v) = lambda v with |lambda| = 1; rescaling by sqrt(lambda) makes lambda = 1
            let lambda = inner(&v, &pv) / inner(&v, &v);
            let s = lambda.sqrt();
            Ok(v.into_iter().map(|z| z * s).collect())
        })
        .collect()
}

/// Parameters of an external family, the family-parameter point reproducing
/// it, and anything the map does not cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterMapRecord {
    pub source_params: BTreeMap<String, f64>,
    pub target: Pt2Params,
    pub caveats: Vec<String>,
    /// The external family's matrix at `source_params`.
    pub external: SquareMatrix,
    /// `||build_h2(target) - external||_F`.
    pub residual: f64,
}

/// Five-parameter family `[[r + t cos - i s sin, t sin + i(s cos - u)], [t sin + i(s cos + u), r - t cos + i s sin]]`.
pub fn mostafazadeh_matrix(r: f64, s: f64, t: f64, u: f64, phi_ext: f64) -> SquareMatrix {
    let (sp, cp) = phi_ext.sin_cos();
    SquareMatrix::from_array([
        [C64::new(r + t * cp, -s * sp), C64::new(t * sp, s * cp - u)],
        [C64::new(t * sp, s * cp + u), C64::new(r - t * cp, s * sp)],
    ])
}

pub fn map_mostafazadeh(r: f64, s: f64, t: f64, u: f64, phi_ext: f64) -> Result<ParameterMapRecord> {
    let (sp, cp) = phi_ext.sin_cos();
    let d1 = t * t * sp * sp + u * u;
    let d2 = t * t + u * u;
    if d2 <= 0.0 {
        return Err(Error::MapSingular("t^2 + u^2 = 0".into()));
    }
    if d1 <= 0.0 {
        return Err(Error::MapSingular("t^2 sin^2(phi) + u^2 = 0".into()));
    }
    let gamma = d2.sqrt();
    let target = Pt2Params {
        epsilon: r,
        gamma,
        mu: s * gamma * sp / d1.sqrt(),
        nu: -s * u * cp / d1.sqrt(),
        theta: (t * cp / gamma).clamp(-1.0, 1.0).acos(),
        phi: u.atan2(t * sp),
    };
    let external = mostafazadeh_matrix(r, s, t, u, phi_ext);
    let residual = build_h2(&target).distance(&external);
    let source_params = [("r", r), ("s", s), ("t", t), ("u", u), ("phi", phi_ext)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let caveats = vec!["the azimuth is taken as atan2(u, t sin(phi)), fixing the quadrant left open by tan".to_string()];
    Ok(ParameterMapRecord { source_params, target, caveats, external, residual })
}

/// `q 1 + E [[cos T, e^{-i F} sin T], [e^{i F} sin T, -cos T]]` with complex `T`, `F`.
pub fn mo_matrix(q: f64, e: f64, big_theta: C64, big_phi: C64) -> SquareMatrix {
    let (s, c) = (big_theta.sin(), big_theta.cos());
    let qe = C64::new(q, 0.0);
    SquareMatrix::from_array([[qe + c * e, (-I * big_phi).exp() * s * e], [(I * big_phi).exp() * s * e, qe - c * e]])
}

/// Inverts the six-parameter map through the Pauli expansion. The gauge
/// puts `sign(gamma) = sign(E)`.
pub fn map_mo(q: f64, e: f64, big_theta: C64, big_phi: C64, tol: f64) -> Result<ParameterMapRecord> {
    if e == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let external = mo_matrix(q, e, big_theta, big_phi);
    let (mut target, _) = fit_pt2(&external, tol)?;
    if e < 0.0 {
        // (gamma, nu, theta, phi) -> (-gamma, -nu, pi - theta, phi + pi) leaves H unchanged
        target = Pt2Params {
            gamma: -target.gamma,
            nu: -target.nu,
            theta: PI - target.theta,
            phi: target.phi + PI,
            ..target
        };
    }
    let residual = build_h2(&target).distance(&external);
    let source_params = [
        ("q", q),
        ("E", e),
        ("Theta_re", big_theta.re),
        ("Theta_im", big_theta.im),
        ("Phi_re", big_phi.re),
        ("Phi_im", big_phi.im),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let caveats = vec![
        "E = 0 makes the matrix a multiple of the identity; the two parametrizations are not equivalent there".to_string(),
        format!("branch: sign(gamma) = sign(E) = {}", if e > 0.0 { "+" } else { "-" }),
    ];
    Ok(ParameterMapRecord { source_params, target, caveats, external, residual })
}
