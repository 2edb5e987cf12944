use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid label {label} at node {node} (worm count {worms})")]
    InvalidLabel { node: usize, label: usize, worms: usize },

    #[error("malformed status column {node}: {reason}")]
    MalformedStatus { node: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("worm count {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration of {states} states exceeds cap {cap}")]
    TooLarge { states: u128, cap: u128 },

    #[error("numeric error at layer {layer}: {reason}")]
    Numeric { layer: usize, reason: String },

    #[error("backward pass requires a relaxed-mode trace")]
    HardModeTrace,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("unsupported {kind} version {version}")]
    Version { kind: &'static str, version: String },

    #[error("size error: {0}")]
    Size(String),

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}
