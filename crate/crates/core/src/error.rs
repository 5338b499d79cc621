use thiserror::Error;

/// Errors raised by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ by {deviation:e} (relative), tolerance {tolerance:e}")]
    Asymmetric {
        i: usize,
        j: usize,
        deviation: f64,
        tolerance: f64,
    },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("power sums available up to order {available}, order {needed} required")]
    InsufficientPowerSums { needed: usize, available: usize },

    #[error("{what} = {value} is out of range ({allowed})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("invalid growth regime (gamma0 = {gamma0}, r = {r}): need gamma0 > 0 and 0 <= r < 1")]
    InvalidRegime { gamma0: f64, r: f64 },

    #[error("||S|| = {norm} exceeds gamma0 * d^(r/2) = {limit}; the matrix is outside the growth regime")]
    RegimeViolation { norm: f64, limit: f64 },

    #[error("dimension d = {d} is inadmissible: the bound requires d {relation} {threshold}")]
    InadmissibleDimension {
        d: f64,
        threshold: f64,
        relation: &'static str,
    },

    #[error("no order m <= {max_m} meets tolerance {eps:e}; best achievable bound is {best_bound:e} at m = {max_m}")]
    Capacity {
        eps: f64,
        max_m: u32,
        best_bound: f64,
    },

    #[error("exponent overflow: x'Sx = {0} is too large for exp()")]
    Overflow(f64),

    #[error("series did not converge within {0} terms")]
    NonConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
