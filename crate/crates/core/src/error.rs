use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("frozen group {0} has nonzero norm {1}")]
    FrozenGroupNonzero(usize, f64),

    #[error("reference network is not minimal: {0}")]
    NonMinimalReference(String),

    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("unknown target column {0:?}")]
    UnknownColumn(String),

    #[error("malformed CSV at row {row}, column {column}: {message}")]
    MalformedCsv { row: usize, column: String, message: String },

    #[error("every grid point diverged in {0}")]
    AllDiverged(&'static str),

    #[error("all {0} replicates failed")]
    AllReplicatesFailed(usize),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status used by the CLI: 1 for usage/config problems,
    /// 2 for data problems, 3 when every replicate failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Json(_) => 1,
            Error::AllReplicatesFailed(_) => 3,
            _ => 2,
        }
    }
}
