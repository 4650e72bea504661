use thiserror::Error;

/// Errors produced anywhere in the engine.
///
/// Every variant maps onto one of three coarse kinds (see [`ErrorKind`]) which
/// the command-line front end turns into its exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("radix must be at least 2, got {0}")]
    InvalidRadix(u64),

    #[error("digit position must be at least 1, got {0}")]
    InvalidPosition(u64),

    #[error("digit {digit} at index {index} is not below radix {radix}")]
    DigitOutOfRange {
        digit: u64,
        index: usize,
        radix: u32,
    },

    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("rule code {code} must be below {bound}")]
    CodeOutOfRange { code: String, bound: String },

    #[error("rule table has {got} entries, expected {expected}")]
    TableLength { got: usize, expected: usize },

    #[error("shift index m = {m} must lie in [1, {range}]")]
    ShiftOutOfRange { m: usize, range: usize },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("alphabet mismatch: rule has p = {rule}, state has p = {state}")]
    AlphabetMismatch { rule: u32, state: u32 },

    #[error("ring size mismatch: expected {expected} sites, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("neighborhood sequence is inconsistent at site {site}: {from} -> {to} is not a de Bruijn edge")]
    InconsistentSequence { site: usize, from: usize, to: usize },

    #[error("{what} exceeds the limit of {limit}")]
    Guard { what: String, limit: String },

    #[error("map value {value} at phi = {phi} leaves [0, 1]")]
    Domain { phi: String, value: String },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Guard,
    Domain,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Guard { .. } => ErrorKind::Guard,
            Error::Domain { .. } => ErrorKind::Domain,
            _ => ErrorKind::Usage,
        }
    }

    pub(crate) fn guard(what: impl Into<String>, limit: impl ToString) -> Self {
        Error::Guard {
            what: what.into(),
            limit: limit.to_string(),
        }
    }

    pub(crate) fn parse(what: &'static str, input: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
