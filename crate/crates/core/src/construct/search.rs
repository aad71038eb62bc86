use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::family::check_pt_symmetry;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::optim::{halton_point, nelder_mead, NelderMeadOptions};
use crate::parity::{parity3, parity_trivial, ParityDescriptor, Sign};

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub restarts: usize,
    pub iterations_per_start: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 64, iterations_per_start: 400, seed: 0, tol: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub parity: ParityDescriptor,
    pub residual: f64,
    /// `residual <= tol`: the Hamiltonian is PT-symmetric with respect to
    /// `parity`. A `false` value is not evidence of the opposite.
    pub certified: bool,
    /// Restart that produced the best point; `None` when a trivial parity won.
    pub restart: Option<usize>,
}

fn objective(h: &SquareMatrix, hd: &SquareMatrix, x: &[f64]) -> f64 {
    let p = parity3(x[0], x[1], x[2], x[3], Sign::Plus).matrix;
    (&(&p * hd) * &p).distance(h).powi(2)
}

/// Multi-start simplex search over the four angles of the three-level parity.
///
/// `P H^dagger P` is quadratic in `P`, so both overall signs give the same
/// residual; the search runs on `+1` and reports that sign. Starts come from
/// a Halton sequence over `[0, 2pi)^4` shifted by a seeded offset. Each start
/// is followed by two polishing runs from a shrinking simplex.
pub fn search_parity3(h: &SquareMatrix, opts: SearchOptions) -> Result<SearchResult> {
    if h.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, actual: h.n() });
    }
    let hd = h.dagger();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shift: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
    let f = |x: &[f64]| objective(h, &hd, x);

    let runs: Vec<(f64, Vec<f64>)> = (0..opts.restarts)
        .into_par_iter()
        .map(|i| {
            let start: Vec<f64> = halton_point(i as u64, 4, &shift).into_iter().map(|u| u * TAU).collect();
            let mut best = nelder_mead(
                f,
                &start,
                NelderMeadOptions { max_iterations: opts.iterations_per_start, initial_step: 0.5, f_tol: 0.0 },
            );
            for step in [1e-2, 1e-4] {
                let polished = nelder_mead(
                    f,
                    &best.x,
                    NelderMeadOptions { max_iterations: opts.iterations_per_start, initial_step: step, f_tol: 0.0 },
                );
                if polished.value < best.value {
                    best = polished;
                }
            }
            (best.value.sqrt(), best.x)
        })
        .collect();

    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for (i, (residual, x)) in runs.into_iter().enumerate() {
        if best.as_ref().is_none_or(|b| residual < b.1) {
            best = Some((i, residual, x));
        }
    }

    let trivial = parity_trivial(3, Sign::Plus);
    let trivial_residual = check_pt_symmetry(h, &trivial)?;

    let result = match best {
        Some((i, residual, x)) if residual <= trivial_residual => {
            let parity = parity3(x[0], x[1], x[2], x[3], Sign::Plus);
            let residual = check_pt_symmetry(h, &parity)?;
            SearchResult { parity, residual, certified: residual <= opts.tol, restart: Some(i) }
        }
        _ => SearchResult {
            parity: trivial,
            residual: trivial_residual,
            certified: trivial_residual <= opts.tol,
            restart: None,
        },
    };
    Ok(result)
}
