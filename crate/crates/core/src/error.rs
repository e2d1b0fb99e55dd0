use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("invalid price for {ticker} on {date}: {value}")]
    NonPositivePrice {
        ticker: String,
        date: String,
        value: f64,
    },

    #[error("insufficient data: need at least {needed}, got {got} ({context})")]
    InsufficientData {
        needed: usize,
        got: usize,
        context: String,
    },

    #[error(
        "sequence of length {len} is shorter than the minimum {min}; pass allow-short to override"
    )]
    TooShort { len: usize, min: usize },

    #[error("length mismatch: {left} vs {right}")]
    Alignment { left: usize, right: usize },

    #[error("ticker sets differ: {0}")]
    TickerMismatch(String),

    #[error("correlation undefined: series has zero variance")]
    UndefinedCorrelation,

    #[error("degenerate pair: both sequences are constant, joint entropy rate vanishes")]
    DegeneratePair,

    #[error("pair ({left}, {right}): {source}")]
    Pair {
        left: String,
        right: String,
        #[source]
        source: Box<Error>,
    },

    #[error("graph is disconnected; random walk is not irreducible")]
    Disconnected,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("unknown ticker {ticker:?}; available: {}", available.join(", "))]
    UnknownTicker {
        ticker: String,
        available: Vec<String>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn in_pair(self, left: &str, right: &str) -> Self {
        Error::Pair {
            left: left.to_owned(),
            right: right.to_owned(),
            source: Box::new(self),
        }
    }
}
