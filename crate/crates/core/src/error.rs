use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the model, the analytics pipeline and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rule number {0} is outside 0..=255")]
    RuleOutOfRange(u32),

    #[error("window must contain at least one move")]
    EmptyWindow,

    #[error("window width {0} is outside 1..=30")]
    WidthOutOfRange(usize),

    #[error("custom initial window has {got} moves, expected {expected}")]
    InitLength { expected: usize, got: usize },

    #[error("trend length must be at least 1 for regime {0}")]
    TrendLength(String),

    #[error(
        "trend length {n} exceeds window width {w}; the orbit state would not fit in the window"
    )]
    UnsupportedCycleConfig { n: u32, w: usize },

    #[error("invalid {what}: {value:?}")]
    Parse { what: &'static str, value: String },

    #[error("{0}")]
    Domain(String),

    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    IoPlain(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
