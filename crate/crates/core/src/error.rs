use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported range")]
    ModulusTooLarge(u64),
    #[error("field elements from F_{0} and F_{1} cannot be combined")]
    ModulusMismatch(u64, u64),
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{kind} graph needs at least {min} servers, got {n}")]
    TooFewServers { kind: &'static str, min: usize, n: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("message index {theta} out of range 1..={k}")]
    ThetaOutOfRange { theta: usize, k: usize },
    #[error("invalid realization: {0}")]
    InvalidRealization(String),
    #[error("scheme error: {0}")]
    Scheme(String),

    #[error("symbols per message must be even, got {0}")]
    OddMessageLength(usize),
    #[error("base scheme violates the symmetric retrieval property: {0}")]
    SrpViolation(String),
    #[error("base scheme already uses {0} common-randomness symbols")]
    NotPir(usize),
    #[error("conversion failed: {0}")]
    Conversion(String),
    #[error("download count differs across message indices: {0}")]
    DownloadMismatch(String),

    #[error("enumeration of {needed} source vectors exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("no base PIR family for {0}")]
    NoBaseScheme(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
