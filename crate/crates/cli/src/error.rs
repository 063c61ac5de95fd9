use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Table { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] darboux_core::Error),

    #[error("unknown demo `{0}`; run `darboux demo --list`")]
    UnknownDemo(String),

    #[error("usage: {0}")]
    Usage(String),
}
