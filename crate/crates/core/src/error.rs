use thiserror::Error;

/// Errors across the toolkit. Validation variants carry the offending
/// magnitude so reports can show how badly an invariant was missed.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite entry at flat index {index}")]
    NonFinite { index: usize },

    #[error("not Hermitian: max |M - M†| = {residual:.3e} exceeds tol {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("trace is not one: trace = {trace:.12} (tol {tol:.3e})")]
    TraceNotOne { trace: f64, tol: f64 },

    #[error("not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e} (tol {tol:.3e})")]
    NotPsd { min_eigenvalue: f64, tol: f64 },

    #[error("state vector not normalized: sum |amplitude|^2 = {norm:.12} (tol {tol:.3e})")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("vectors {i} and {j} not orthonormal: |<v_i|v_j> - delta_ij| = {residual:.3e} (tol {tol:.3e})")]
    NotOrthonormal { i: usize, j: usize, residual: f64, tol: f64 },

    #[error("basis has {got} vectors for dimension {dim}")]
    IncompleteBasis { got: usize, dim: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    ConvergenceFailure { sweeps: usize, off: f64 },

    #[error("extended distribution needs a chain of at least 2 bases, got {got}")]
    ChainTooShort { got: usize },

    #[error("zero overlap <f_{j}|a_{i}>: |overlap| = {magnitude:.3e} below floor {floor:.3e}")]
    ZeroOverlap { i: usize, j: usize, magnitude: f64, floor: f64 },

    #[error("marginal over {axis} at index {index} is not real: |Im| = {imag:.3e} (tol {tol:.3e})")]
    MarginalNotReal { axis: &'static str, index: usize, imag: f64, tol: f64 },

    #[error("insufficient moments for Hankel level {level}: need {needed}, have {available}")]
    InsufficientMoments { level: usize, needed: usize, available: usize },

    #[error("bases are not mutually unbiased: max ||<a|b>|^2 - 1/d| = {deviation:.3e} (tol {tol:.3e})")]
    NotMub { deviation: f64, tol: f64 },

    #[error("not unitary: max |U†U - I| = {residual:.3e} (tol {tol:.3e})")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("degenerate spectrum: eigenvalue group {index} has rank {rank} > 1")]
    DegenerateSpectrum { index: usize, rank: usize },

    #[error("invalid Bloch parameters: gamma = {gamma}, xi = {xi} (need 0 <= gamma <= 1 and |xi| <= sqrt(gamma(1-gamma)))")]
    InvalidBlochParameters { gamma: f64, xi: f64 },

    #[error("parameter out of range: {name} = {value} ({constraint})")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
