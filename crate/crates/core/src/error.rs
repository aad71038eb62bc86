use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {0} is outside the supported range")]
    DimensionOutOfRange(usize),

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("eigensolver did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive definite (eigenvalue {eigenvalue:.6e})")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("rotation is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix is not a Hermitian involution (hermiticity {hermiticity:.3e}, involution {involution:.3e})")]
    NotInvolution { hermiticity: f64, involution: f64 },

    #[error("signature entries must be +1 or -1")]
    InvalidSignature,

    #[error("operation requires a {expected} parity operator")]
    WrongParityKind { expected: &'static str },

    #[error("M-matrix spectrum is not contained in {{+1, -1}} (residual {residual:.3e})")]
    SpectrumNotPlusMinusOne { residual: f64 },

    #[error("parameter point is degenerate: {0}")]
    DegenerateParameterPoint(String),

    #[error("coefficient vector is not in the {space} eigenspace (residual {residual:.3e})")]
    CoefficientNotInEigenspace { space: &'static str, residual: f64 },

    #[error("spectrum is complex or exceptional (PT symmetry broken)")]
    Broken,

    #[error("parameters are in the broken phase or at the exceptional point")]
    BrokenOrExceptional,

    #[error("gamma must be nonzero")]
    GammaZero,

    #[error("Hamiltonian is not PT-symmetric with respect to the parity (residual {residual:.3e})")]
    NotPtSymmetric { residual: f64 },

    #[error("spectrum is complex (max |Im E| = {max_imag:.3e})")]
    ComplexSpectrum { max_imag: f64 },

    #[error("spectrum is degenerate (gap {gap:.3e}); C operator is undefined")]
    DegenerateSpectrum { gap: f64 },

    #[error("weight matrix is not Hermitian positive definite")]
    InvalidWeight,

    #[error("minus branch of the closed-form square root is singular at u = 1")]
    MinusBranchSingular,

    #[error("eta is singular")]
    SingularEta,

    #[error("parameter map is singular: {0}")]
    MapSingular(String),

    #[error("degenerate point E = 0: the two parametrizations are not equivalent")]
    DegeneratePoint,

    #[error("eigenstate has vanishing PT norm")]
    NullPtNorm,
}

pub type Result<T> = std::result::Result<T, Error>;
