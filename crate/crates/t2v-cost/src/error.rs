use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] t2v_cost_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("unknown hardware `{0}`")]
    UnknownHardware(String),
    #[error("unknown model spec `{0}`")]
    UnknownModel(String),
    #[error("unknown bundled fixture `{0}`")]
    UnknownFixture(String),
    #[error("{report} reports cannot be written as {format}")]
    UnsupportedFormat {
        report: &'static str,
        format: &'static str,
    },
    /// Flag combination that clap cannot express.
    #[error("{0}")]
    Usage(String),
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
