//! Library-wide error type.

/// Errors produced by assembly, setup, and configuration.
///
/// Solve-phase failures (Krylov breakdown, non-convergence) are not errors;
/// they are reported through [`crate::krylov::SolveResult`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("triplet #{index} ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    TripletOutOfRange {
        index: usize,
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("invalid CSR structure: {0}")]
    InvalidCsr(String),

    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("strength criterion undefined: diagonal entry {value} at row {row} is not positive")]
    NonPositiveDiagonal { row: usize, value: f64 },

    #[error("zero diagonal entry at row {row}")]
    ZeroDiagonal { row: usize },

    #[error("filtered matrix has zero diagonal at row {row}")]
    ZeroFilteredDiagonal { row: usize },

    #[error("coarsening stagnated: {aggregates} aggregates for {nrows} rows")]
    CoarseningStagnated { aggregates: usize, nrows: usize },

    #[error("no positive spectral bound could be established for the chebyshev smoother")]
    SpectralBound,

    #[error("coarsest matrix is numerically singular (pivot {pivot} at step {step})")]
    SingularCoarseMatrix { step: usize, pivot: f64 },

    #[error("invalid parameter {name}: {detail}")]
    InvalidParam { name: &'static str, detail: String },

    #[error("config parse error at line {line}: {detail}")]
    ConfigParse { line: usize, detail: String },

    #[error("config error at \"{path}\": {detail}")]
    Config { path: String, detail: String },

    #[error("unknown value \"{value}\" for \"{path}\" (expected one of: {expected})")]
    UnknownComponent {
        path: String,
        value: String,
        expected: &'static str,
    },

    #[error("problem too large: {0}")]
    ProblemTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
