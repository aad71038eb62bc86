//! Seeded random draws used by property tests, the self-test and scans.

use std::f64::consts::PI;

use rand::Rng;

use crate::construct::{Pt2Params, Pt3Params};
use crate::linalg::{vec_norm, SquareMatrix, C64};

/// Complex matrix with entries uniform in the unit disc.
pub fn random_unit_disc_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |_, _| {
        let r = rng.gen::<f64>().sqrt();
        C64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
    })
}

pub fn random_complex_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Unitary matrix from Gram-Schmidt on a random complex matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SquareMatrix {
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    while columns.len() < n {
        let mut v = random_complex_vector(rng, n);
        for q in &columns {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            columns.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    SquareMatrix::from_columns(&columns)
}

pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(0.0..2.0 * PI)
}

/// Uniform draw over all six parameters, phase unrestricted.
pub fn random_pt2<R: Rng + ?Sized>(rng: &mut R) -> Pt2Params {
    Pt2Params {
        epsilon: rng.gen_range(-2.0..2.0),
        gamma: rng.gen_range(-2.0..2.0),
        mu: rng.gen_range(-2.0..2.0),
        nu: rng.gen_range(-2.0..2.0),
        theta: random_angle(rng),
        phi: random_angle(rng),
    }
}

/// Draw in the unbroken phase with `sqrt(mu^2 + nu^2) <= max_ratio * |gamma|`.
pub fn random_unbroken_pt2<R: Rng + ?Sized>(rng: &mut R, max_ratio: f64) -> Pt2Params {
    let gamma_abs = rng.gen_range(0.2..2.0);
    let gamma = if rng.gen::<bool>() { gamma_abs } else { -gamma_abs };
    let radius = gamma_abs * max_ratio * rng.gen::<f64>();
    let angle = random_angle(rng);
    Pt2Params {
        epsilon: rng.gen_range(-2.0..2.0),
        gamma,
        mu: radius * angle.cos(),
        nu: radius * angle.sin(),
        theta: random_angle(rng),
        phi: random_angle(rng),
    }
}

pub fn random_pt3<R: Rng + ?Sized>(rng: &mut R, gamma_range: f64, mu_range: f64) -> Pt3Params {
    let mut gamma = [0.0; 4];
    let mut mu = [0.0; 4];
    for g in &mut gamma {
        *g = rng.gen_range(-gamma_range..gamma_range);
    }
    for m in &mut mu {
        *m = rng.gen_range(-mu_range..mu_range);
    }
    Pt3Params {
        epsilon: rng.gen_range(-1.0..1.0),
        gamma,
        mu,
        chi: random_angle(rng),
        theta: random_angle(rng),
        rho: random_angle(rng),
        phi: random_angle(rng),
    }
}
