use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus is reducible over F_{p}")]
    ModulusReducible { p: u32 },

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("field of order {p}^{r} exceeds the supported bound of 2^24 elements")]
    FieldTooLarge { p: u32, r: u32 },

    #[error("requested element is not a primitive root")]
    NotPrimitive,

    #[error("zero has no discrete logarithm")]
    ZeroHasNoLog,

    #[error("division by zero")]
    DivisionByZero,

    #[error("coloring does not descend to edges: {0}")]
    NotEdgeWellDefined(String),

    #[error("direction partition is invalid: {0}")]
    BadPartition(String),

    #[error("generator {0} is not invertible")]
    SingularGenerator(usize),

    #[error("recoloring is not a surjection onto 0..{0}")]
    BadRecoloring(usize),

    #[error("({d},{e},{s}) is not a Foulser standard form: {reason}")]
    NotStandardForm {
        d: u64,
        e: u64,
        s: u32,
        reason: &'static str,
    },

    #[error("map does not permute colors: {a} and {b} share a color but their images do not")]
    NotColorPermuting { a: u32, b: u32 },

    #[error("enumeration of {size} candidates exceeds the limit of {limit}")]
    EnumerationTooLarge { size: u128, limit: u128 },

    #[error("no vector has the color required for column {column}")]
    ImpossibleTarget { column: usize },

    #[error("binary fast path needs p = 2 and r <= 8, got p = {p}, r = {r}")]
    NotBinaryField { p: u32, r: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown classification case ({p},{r},{k})")]
    UnknownCase { p: u32, r: u32, k: usize },

    #[error("permutation group closure exceeds {0} elements")]
    GroupTooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
