use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    InvalidPrime(String),
    #[error("p = {0} exceeds the 64-bit range supported by the primality test")]
    PrimeTooLarge(String),
    #[error("leading coefficient a must be nonzero")]
    InvalidQuadratic,
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: String, modulus: String },
    #[error("{value} is not a quadratic residue modulo {prime}")]
    NotAResidue { value: String, prime: u64 },
    #[error("{value} has no square root in the {prime}-adic integers")]
    NoSquareRoot { value: String, prime: u64 },
    #[error("{seed} is not a simple root of the quadratic modulo {prime}")]
    NotASimpleRoot { seed: String, prime: u64 },
    #[error("operation requires a {expected} classification, got {found}")]
    WrongClassification {
        expected: &'static str,
        found: &'static str,
    },
    #[error("tree and classification were built from different quadratics")]
    MismatchedInput,
    #[error("sequence of {have} terms is too short, need at least {need}")]
    InsufficientData { have: usize, need: usize },
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("malformed tree document: {0}")]
    MalformedDocument(String),
}
