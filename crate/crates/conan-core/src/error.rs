//! Error types shared across the analysis pipeline.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConanError {
    #[error(
        "no Android manifest found{} in {root}",
        .module.as_deref().map(|m| format!(" under module `{m}`")).unwrap_or_default()
    )]
    NoManifestFound { root: String, module: Option<String> },

    #[error("multiple candidate modules found ({candidates:?}); pass an explicit module name")]
    AmbiguousModule { candidates: Vec<String> },

    #[error("failed to parse Android manifest: {0}")]
    ManifestParse(String),

    #[error("file is not recoverable as source: {0}")]
    FatalParse(String),

    #[error("ground truth format error at line {line}: {message}")]
    TruthFormat { line: usize, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
