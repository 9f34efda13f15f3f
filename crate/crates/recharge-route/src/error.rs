use std::fmt;
use std::io;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by parsing, instance construction and the solvers.
#[derive(Debug)]
pub enum Error {
    /// Malformed input file; `line` is 1-based.
    Parse { line: usize, message: String },
    /// Structurally valid input that violates an invariant.
    Invalid(String),
    /// The instance (or the requested component) cannot be covered within
    /// the discharge budget. Carries an offending vertex when one is known.
    Infeasible { vertex: Option<usize>, detail: String },
    /// A size-limited routine was asked to exceed its limit.
    SizeExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    /// Referenced node id does not exist in the instance.
    UnknownNode(usize),
    Io(io::Error),
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Error::Infeasible { vertex, detail } => match vertex {
                Some(v) => write!(f, "infeasible: {detail} (vertex {v})"),
                None => write!(f, "infeasible: {detail}"),
            },
            Error::SizeExceeded {
                what,
                limit,
                actual,
            } => write!(f, "{what} supports at most {limit} elements, got {actual}"),
            Error::UnknownNode(id) => write!(f, "unknown node id {id}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

impl Error {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. })
    }
}
