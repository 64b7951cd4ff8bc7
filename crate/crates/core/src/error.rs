use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: i64, reason: &'static str },

    #[error("arguments {p} and {q} are not coprime (gcd = {gcd})")]
    NotCoprime { p: i64, q: i64, gcd: i64 },

    #[error("{what} exceeds budget: {requested} > {cap}")]
    BudgetExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("matrix is not unitary (max |U^dagger U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: i64, modulus: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A singular value landed inside the guard band around the rank threshold.
    #[error("numerically ambiguous commutant spectrum near threshold {threshold:e}")]
    CommutantAmbiguous {
        threshold: f64,
        singular_values: Vec<f64>,
    },

    /// Two independent routes to the same predicate disagreed.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("malformed matrix data: {0}")]
    MalformedMatrix(String),
}

pub type Result<T> = std::result::Result<T, Error>;
