use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {0} is not a prime in [2, 251]")]
    InvalidModulus(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u8, right: u8 },
    #[error("entry {value} is not reduced modulo {p}")]
    UnreducedEntry { value: u8, p: u8 },
    #[error("position {position} out of range for {n} positions")]
    PositionOutOfRange { position: usize, n: usize },
    #[error("generators {i} and {j} have symplectic product {value} (not self-orthogonal)")]
    NotSelfOrthogonal { i: usize, j: usize, value: u8 },
    #[error("distance undefined: the symplectic dual equals the code")]
    DistanceUndefined,
    #[error("syndrome is not reachable by any error on the allowed positions")]
    UnreachableSyndrome,
    #[error("code is not pure")]
    ImpureCode,
    #[error("puncturing {punctured} positions needs fewer than d = {d}")]
    TooManyPunctured { punctured: usize, d: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{what}: {required} exceeds the feasibility cap {cap}")]
    Infeasible {
        what: &'static str,
        required: u128,
        cap: u128,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("catalog entry `{name}`: claimed {field}={claimed}, recomputed {recomputed}")]
    CatalogMismatch {
        name: String,
        field: &'static str,
        claimed: String,
        recomputed: String,
    },
    #[error("rate {0} outside [0, 1]")]
    InvalidRate(f64),
    #[error("unknown code `{0}`")]
    UnknownCode(String),
}
