use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("at {point}: {source}")]
    Point {
        point: String,
        #[source]
        source: pta_core::Error,
    },

    #[error(transparent)]
    Core(#[from] pta_core::Error),
}
