use std::fmt;

use thiserror::Error;

/// Line/column position in a source text, both 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },

    #[error("{pos}: unknown variable `{name}`")]
    UnknownVariable { pos: Pos, name: String },

    #[error("{pos}: `{name}` shadows a variable that is already in scope")]
    Shadowing { pos: Pos, name: String },

    #[error("{pos}: {msg}")]
    Semantic { pos: Pos, msg: String },

    #[error("invalid state space: {0}")]
    InvalidSpace(String),

    #[error("space mismatch: `{left}` vs `{right}`")]
    SpaceMismatch { left: String, right: String },

    #[error("{what} has {size} states, above the exhaustive cap of {cap}; use oracle mode for spaces this large")]
    CapExceeded { what: String, size: u128, cap: usize },

    #[error("{which} is not deterministic (state {state} has several images); use the non-deterministic judgment")]
    NonDeterministic { which: String, state: String },

    #[error("state {state} is not in space `{space}`")]
    StateOutOfSpace { state: String, space: String },

    #[error("reliability is undefined: the distribution puts zero weight on dom(R) within the region")]
    ZeroWeight,

    #[error("invalid chain manifest: {0}")]
    Manifest(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("{}", located(file, source))]
    InFile {
        file: String,
        #[source]
        source: Box<Error>,
    },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

fn located(file: &str, e: &Error) -> String {
    match e.root() {
        Error::Syntax { .. } | Error::UnknownVariable { .. } | Error::Shadowing { .. } | Error::Semantic { .. } => {
            format!("{file}:{e}")
        }
        _ => format!("{file}: {e}"),
    }
}

impl Error {
    /// Attaches a file name; positions in the message then read `file:line:col`.
    pub fn in_file(self, file: impl Into<String>) -> Error {
        Error::InFile {
            file: file.into(),
            source: Box::new(self),
        }
    }

    /// The error with any file context removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFile { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
