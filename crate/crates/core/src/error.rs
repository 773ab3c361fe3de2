use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A syntax error in a term, with a byte offset into the parsed text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    pub(crate) fn expecting(mut self, expected: &[&str]) -> Self {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.position, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("state dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix is not unitary within tolerance")]
    NotUnitary,
    #[error("observable must be Hermitian with square equal to the identity")]
    NotInvolution,
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("gate `{gate}` acts on {arity} qubit(s) but {given} wire(s) were given")]
    ArityMismatch {
        gate: String,
        arity: usize,
        given: usize,
    },
    #[error("qubit {index} is out of range for {n} qubit(s)")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("wire {0} is used more than once")]
    DuplicateWire(usize),
    #[error("unknown engine `{name}` (known: {known})")]
    InvalidEngine { name: String, known: String },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("parse error {0}")]
    Parse(#[from] ParseError),
    #[error("line {line}, column {column}: {message}")]
    Script {
        line: usize,
        column: usize,
        message: String,
    },
}
