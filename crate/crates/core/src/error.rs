use std::path::PathBuf;

use thiserror::Error;

use crate::dictionary::Namespace;

/// Top-level error for the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dictionary(#[from] DictionaryError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DictionaryError {
    #[error("{namespace} id {id} is out of range (1..={len})")]
    OutOfRange {
        namespace: Namespace,
        id: u64,
        len: usize,
    },
    #[error("{namespace} term {term:?} is listed twice in the dictionary")]
    DuplicateTerm { namespace: Namespace, term: String },
    #[error("bad escape sequence in dictionary line {line}")]
    BadEscape { line: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: undeclared prefix {prefix:?}")]
    UnknownPrefix { line: usize, prefix: String },
    #[error("line {line}: unsupported feature: {feature}")]
    Unsupported { line: usize, feature: String },
    #[error("projected variable ?{0} does not occur in the WHERE clause")]
    UnboundProjection(String),
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("pair list is not sorted by key at position {position}")]
    Unsorted { position: usize },
    #[error("unknown predicate id {0}")]
    UnknownPredicate(u64),
    #[error("triple ({s}, {p}, {o}) references an id missing from the dictionary")]
    InvalidTriple { s: u64, p: u64, o: u64 },
    #[error("{}: not a store (bad magic {found:?})", path.display())]
    BadMagic { path: PathBuf, found: String },
    #[error("{}: store format {found:?} is not supported (expected {expected})", path.display())]
    VersionMismatch {
        path: PathBuf,
        found: String,
        expected: &'static str,
    },
    #[error("{}: truncated ({detail})", path.display())]
    Truncated { path: PathBuf, detail: String },
    #[error("{}: corrupt store ({detail})", path.display())]
    Corrupt { path: PathBuf, detail: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Dictionary {
        path: PathBuf,
        #[source]
        source: DictionaryError,
    },
}

impl StorageError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        StorageError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("cost bounds need at least one cardinality")]
    EmptyCardinalities,
    #[error("cannot plan an empty query")]
    EmptyQuery,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("join at step {step} needs {rows} output rows, over the budget of {budget}")]
    RowBudget { step: usize, rows: u64, budget: u64 },
    #[error("join variable ?{0} is missing from an input schema")]
    MissingJoinVariable(String),
    #[error("right relation is keyed on ?{found} but the first join variable is ?{expected}")]
    KeyMismatch { expected: String, found: String },
    #[error("cannot execute an empty plan")]
    EmptyPlan,
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}
