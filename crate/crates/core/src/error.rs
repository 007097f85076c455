use std::fmt;

use thiserror::Error;

use crate::circuit::Violation;

/// Position-tagged parse failure for the text formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} inputs, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid circuit: {}", format_violations(.0))]
    InvalidCircuit(Vec<Violation>),

    #[error("operation needs working nodes, circuit has none")]
    Degenerate,

    #[error("node g{node} has a repeated operand, which a connection matrix cannot encode")]
    RepeatedOperand { node: usize },

    #[error("connection matrix row {row}: {message}")]
    MatrixRow { row: usize, message: String },

    #[error("connection matrix column {column}: {message}")]
    MatrixColumn { column: usize, message: String },

    #[error("dimension {n} exceeds the exhaustive limit of {limit}")]
    TooManyInputs { n: usize, limit: usize },

    #[error("{count} samples exceed the search limit of {limit}")]
    TooManySamples { count: usize, limit: usize },

    #[error("sample set is empty")]
    EmptySamples,

    #[error("sample {input} has no output value")]
    UnlabeledSample { input: String },

    #[error("conflicting labels for input {input}")]
    ConflictingSample { input: String },

    #[error("no fitting circuit with at most {cap} nodes")]
    CapExceeded { cap: usize },

    #[error("search budget exhausted: {0}")]
    Budget(String),

    #[error("witness search failed at node g{node}: no input realizes pair {pair:?}")]
    WitnessMissing { node: usize, pair: (bool, bool) },

    #[error("circuit does not express the given function")]
    NotExpressing,

    #[error("circuit is not minimal: d={d} but the function needs only {d_min}")]
    NotMinimal { d: usize, d_min: usize },

    #[error("step {step}: {message}")]
    Stream { step: usize, message: String },

    #[error("invalid X-form: {0}")]
    InvalidXForm(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// True for failures caused by exhausting a search ceiling rather than a
    /// contract violation.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::Budget(_) | Error::TooManySamples { .. }
        )
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
