//! PT-symmetric Hamiltonian construction, verification and inverse problems.

mod basis3;
mod family;
mod fit;
mod mmatrix;
mod search;

pub use basis3::{basis_vectors_3, Basis3Vectors};
pub use family::{
    build_h2, build_h3, build_hn, check_pt_symmetry, classify2, PhaseClass, PhaseLabel, Pt2Params, Pt3Params,
    PtFamilyParams,
};
pub use fit::fit_pt2;
pub use mmatrix::{m_matrix2, m_matrix3, m_matrix_oracle, split_eigenspaces, EigenbasisSplit, MMatrix};
pub use search::{search_parity3, SearchOptions, SearchResult};
