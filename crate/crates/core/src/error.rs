use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field descriptor `{0}`")]
    InvalidField(String),
    #[error("field mismatch: `{0}` vs `{1}`")]
    FieldMismatch(String, String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("integer overflow in {0}")]
    Overflow(String),
    #[error("evaluation too close to the pole at s=1 (s = {0})")]
    PoleProximity(f64),
    #[error("principal character has a pole at s <= 1")]
    PrincipalCharacterPole,
    #[error("table `{tag}` covers n <= {have}, need {need}")]
    TableCoverage { tag: String, have: u64, need: u64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
