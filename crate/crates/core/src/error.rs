use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcsError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("arity mismatch: expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("value kind mismatch: {0}")]
    KindMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unresolved reference `{0}`")]
    UnresolvedRef(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("axiom `{identity}` fails: {witness}")]
    AxiomFailure { identity: String, witness: String },
    #[error("metric is singular")]
    SingularMetric,
    #[error("connection is not flat: {0}")]
    NotFlat(String),
    #[error("connection is not metric: {0}")]
    NotMetric(String),
    #[error("form is not closed: {0}")]
    NotClosed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, AcsError>;

impl From<std::io::Error> for AcsError {
    fn from(e: std::io::Error) -> Self {
        AcsError::Io(e.to_string())
    }
}
