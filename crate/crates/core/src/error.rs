use thiserror::Error;

/// Errors raised by the numerical pipeline.
///
/// Values are carried as `f64` so the error type does not depend on the
/// scalar parameter of the failing routine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    Empty,
    #[error("invalid grid size {0}: must be a power of two and at least 16")]
    InvalidGrid(usize),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("no sign change on bracket [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("matrix is singular (pivot {pivot} at row {row})")]
    Singular { row: usize, pivot: f64 },
    #[error("iteration stagnated after {iterations} steps (residual {residual:e})")]
    Stagnation { iterations: usize, residual: f64 },
    #[error("eigenvector has {count} non-positive entries; discretization is not of Perron type")]
    NotPositive { count: usize },
    #[error("P = {p} is not above the critical value {p_crit} (+ margin {margin})")]
    BelowCritical { p: f64, p_crit: f64, margin: f64 },
    #[error("momentum {p} outside the open interval ({lo}, {hi})")]
    OutOfRange { p: f64, lo: f64, hi: f64 },
    #[error("degenerate momentum {p}: within {delta} of an endpoint of the level")]
    Degenerate { p: f64, delta: f64 },
    #[error("Newton iteration failed after {iterations} steps: residual {residual:e}; try a finer grid or a larger h")]
    NewtonFailed { iterations: usize, residual: f64 },
    #[error("lattice window too small: tail mass {tail:e} exceeds {tol:e}")]
    WindowTooSmall { tail: f64, tol: f64 },
    #[error("test symbol momentum support [{lo}, {hi}] exceeds the lattice window [{w_lo}, {w_hi}]")]
    SupportOutsideWindow { lo: f64, hi: f64, w_lo: f64, w_hi: f64 },
    #[error("test symbol momentum support [{lo}, {hi}] meets the level boundary lines p_min = {p_min}, p_max = {p_max}")]
    SupportCrossesLevelBounds { lo: f64, hi: f64, p_min: f64, p_max: f64 },
    #[error("oscillatory integral unresolved: error estimate {estimate:e} exceeds {tol:e}")]
    UnresolvedPhase { estimate: f64, tol: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
