use thiserror::Error;

/// Errors produced while building states, bases and criteria.
#[derive(Debug, Error)]
pub enum Error {
    #[error("subsystem index {index} out of range for a {parties}-party state")]
    InvalidSubsystem { index: usize, parties: usize },

    #[error("subsystem selection must be nonempty")]
    EmptySelection,

    #[error("subsystem dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |m - m^dagger| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("trace is not 1: |tr - 1| = {residual:e}")]
    NotUnitTrace { residual: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("expected a bipartite state, got {parties} parties")]
    NotBipartite { parties: usize },

    #[error("expected {expected} parties, got {found}")]
    PartyCount { expected: usize, found: usize },

    #[error("parties must differ (got {0} twice)")]
    SameParty(usize),

    #[error("matrix is not orthogonal: max |u u^T - I| = {residual:e}")]
    NotOrthogonal { residual: f64 },

    #[error("pad target {target} is smaller than basis size {size}")]
    PadTarget { target: usize, size: usize },

    #[error("basis lengths differ: {left} vs {right}")]
    BasisLength { left: usize, right: usize },

    #[error("expectation value has imaginary part {imag:e}")]
    ComplexExpectation { imag: f64 },

    #[error("state vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("mixing parameter {0} outside [0, 1]")]
    MixingParameter(f64),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("grid must contain at least one point")]
    EmptyGrid,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
