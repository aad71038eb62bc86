//! Dense complex linear algebra for small matrices.

pub mod eigen;
pub mod hermitian;
pub mod json;
pub mod matrix;

pub use eigen::{eigen_decompose, Spectrum, MAX_DIM};
pub use hermitian::{hermitian_eigenvalues, hermitian_sqrt};
pub use matrix::{inner, residuals, vec_norm, Residuals, SquareMatrix, C64, I, ONE, ZERO};

/// Default verification tolerance, relative to the Frobenius norm.
pub const DEFAULT_TOL: f64 = 1e-10;

pub fn dagger(m: &SquareMatrix) -> SquareMatrix {
    m.dagger()
}
