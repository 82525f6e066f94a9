use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("channel is not trace preserving: ‖Σ K†K − I‖ = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotTracePreserving { deviation: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("size cap exceeded: {what} = {size} > {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },

    #[error(
        "eigensolver did not converge{}: best residual {best_residual:.3e} after {iterations} matrix-vector products",
        level.map(|n| format!(" at level n = {n}")).unwrap_or_default()
    )]
    NonConvergence {
        level: Option<usize>,
        best_residual: f64,
        best_value: f64,
        iterations: usize,
    },

    #[error("monotonicity violated between levels {prev_n} and {n}: μ rose from {prev_mu} to {mu}")]
    MonotonicityViolation { prev_n: usize, n: usize, prev_mu: f64, mu: f64 },

    #[error("extrapolation: {0}")]
    Extrapolation(String),

    #[error("channel file: {0}")]
    Parse(String),
}
