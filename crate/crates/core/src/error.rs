use thiserror::Error;

/// Errors raised by the toolkit. Every fallible operation in the crate
/// returns one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid generator name `{0}`")]
    InvalidName(String),

    #[error("generator `{0}` is not in the alphabet")]
    AlphabetMismatch(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("word `{0}` is not a loop at the basepoint")]
    NotALoop(String),

    #[error("graph has no basepoint")]
    MissingBasepoint,

    #[error("immersions are over different base graphs")]
    BaseMismatch,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid action element: {0}")]
    InvalidAction(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("name collision on `{0}`")]
    NameCollision(String),

    #[error("substitution does not round-trip on generator `{0}`")]
    InvalidSubstitution(String),

    #[error("modulus {0} is below the threshold (need N > 6)")]
    Threshold(u32),

    #[error("search budget exhausted after {examined} candidates without a certificate")]
    BudgetExhausted { examined: u64 },

    #[error("targets {first} and {second} are not independent")]
    DependentTargets { first: usize, second: usize },

    #[error("invalid order specification: {0}")]
    InvalidOrderSpec(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid square complex: {0}")]
    InvalidComplex(String),

    #[error("complex is not connected")]
    Disconnected,
}

pub type Result<T> = std::result::Result<T, Error>;
