use std::path::PathBuf;

use serde::Serialize;

/// Failure of a pipeline step, grouped by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Data(String),
    #[error("duplicate timestamps: {}", .0.join(", "))]
    DuplicateTimestamps(Vec<String>),
    #[error("missing prerequisite artifact {0}")]
    MissingArtifact(PathBuf),
    #[error("invalid artifact {path}: {message}")]
    InvalidArtifact { path: PathBuf, message: String },
    #[error("{0}")]
    Model(#[from] wtpc_core::Error),
    #[error("{0}")]
    Config(String),
}

pub type AppResult<T> = Result<T, AppError>;

/// Exit codes, documented in `wtpc --help`.
pub const EXIT_CODES: &[(i32, &str)] = &[
    (0, "success"),
    (2, "usage: bad flag or flag value"),
    (3, "io: unreadable input or unwritable output"),
    (4, "schema: a mapped column is absent"),
    (5, "data: unparseable timestamp or duplicate timestamps"),
    (6, "missing prerequisite artifact"),
    (7, "invalid artifact file"),
    (8, "model: numerical failure in the pipeline"),
    (9, "config: malformed config file"),
];

impl AppError {
    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Usage(_) => "usage",
            AppError::Io { .. } => "io",
            AppError::Schema(_) => "schema",
            AppError::Data(_) | AppError::DuplicateTimestamps(_) => "data",
            AppError::MissingArtifact(_) => "missing_artifact",
            AppError::InvalidArtifact { .. } => "invalid_artifact",
            AppError::Model(_) => "model",
            AppError::Config(_) => "config",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Io { .. } => 3,
            AppError::Schema(_) => 4,
            AppError::Data(_) | AppError::DuplicateTimestamps(_) => 5,
            AppError::MissingArtifact(_) => 6,
            AppError::InvalidArtifact { .. } => 7,
            AppError::Model(_) => 8,
            AppError::Config(_) => 9,
        }
    }

    /// One-line JSON object written to stderr on failure.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Payload<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        let payload = Payload { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() };
        serde_json::to_string(&payload).expect("error payload serializes")
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }
}

impl From<csv::Error> for AppError {
    fn from(e: csv::Error) -> Self {
        AppError::Data(e.to_string())
    }
}
