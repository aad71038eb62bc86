//! PT-symmetric matrix Hamiltonians: parity operators, the coefficient-space
//! M-matrix, two- and three-level families, the C operator and the CPT metric.

pub mod construct;
pub mod cpt;
pub mod error;
pub mod linalg;
pub mod optim;
pub mod parity;
pub mod random;
pub mod selftest;
pub mod special;
pub mod sun;

pub use error::{Error, Result};
pub use linalg::{SquareMatrix, C64, DEFAULT_TOL};
