use thiserror::Error;

/// Errors raised by the verification engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HgcError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("invalid finite-field specification: {0}")]
    InvalidSpec(String),
    #[error("specialization pole: {0}")]
    SpecializationPole(String),
    /// The specialization hit an accidental coincidence; the caller should retry with other values.
    #[error("degenerate specialization: {0}")]
    DegenerateSpecialization(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("precision exhausted at {point} (ceiling {ceiling})")]
    PrecisionExhausted { point: String, ceiling: usize },
    #[error("unsupported fiber: {0}")]
    UnsupportedFiber(String),
    #[error("non-proper intersection: {0}")]
    NonProperIntersection(String),
    #[error("disconnected cover: gcd of N and all branch exponents is {0}")]
    DisconnectedCover(u64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, HgcError>;

impl From<std::io::Error> for HgcError {
    fn from(e: std::io::Error) -> Self {
        HgcError::Io(e.to_string())
    }
}
