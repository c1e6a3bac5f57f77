use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, TrecError>;

#[derive(Debug, Error)]
pub enum TrecError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Cell {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("no variables remain after removing variables with missing start/end values")]
    NoVariablesRemain,

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("variable {variable}: {source}")]
    Variable {
        variable: String,
        #[source]
        source: Box<TrecError>,
    },

    #[error("unknown variable '{name}'; available: {}", available.join(", "))]
    UnknownVariable { name: String, available: Vec<String> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("model for group {model} cannot be applied to group {requested}")]
    GroupMismatch { model: String, requested: String },

    #[error("category with zero examples: icon(s) {}", icons.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", "))]
    EmptyCategory { icons: Vec<u8> },

    #[error("pipeline state is missing {0}; run the earlier step first")]
    MissingStep(&'static str),

    #[error("missing icon model file {}", .0.display())]
    MissingModel(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl TrecError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TrecError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn for_variable(self, variable: &str) -> Self {
        TrecError::Variable {
            variable: variable.to_string(),
            source: Box::new(self),
        }
    }

    /// Process exit code: 1 usage, 2 data, 3 numeric failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            TrecError::InvalidArgument(_) => 1,
            TrecError::Numeric(_) => 3,
            TrecError::Variable { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
