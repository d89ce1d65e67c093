use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = SubdataError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SubdataError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("numerical failure: {0}")]
    NumericFailure(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("insufficient rows: need at least {required}, got {actual}")]
    InsufficientRows { required: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("singular design matrix: numerical rank {rank} of {cols} columns")]
    SingularDesign { rank: usize, cols: usize },

    #[error("cannot scale column {column}: constant value {value}")]
    ConstantColumn { column: usize, value: f64 },

    #[error("non-numeric cell {value:?} at row {row}, column {column}")]
    ParseCell {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("column {0:?} not found in header")]
    MissingColumn(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SubdataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SubdataError::Io {
            path: path.into(),
            source,
        }
    }
}
