use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The RIFF/WAVE container is malformed; `chunk` names the offending chunk.
    #[error("malformed WAV: {chunk} chunk: {reason}")]
    Decode { chunk: &'static str, reason: String },

    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot normalize a silent (all-zero) signal")]
    CannotNormalize,

    #[error("audio too short: {actual_s:.3} s available, {required_s:.3} s required")]
    TooShort { actual_s: f64, required_s: f64 },

    #[error("no tempo: onset envelope is zero everywhere")]
    NoTempo,

    #[error("parse error at row {row}: {reason}")]
    Parse { row: usize, reason: String },

    #[error("schema error: {0}")]
    Schema(String),

    /// Failure while processing a single track; `stage` is the pipeline step.
    #[error("{}: {stage}: {source}", path.display())]
    Track {
        path: PathBuf,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_track(self, path: impl Into<PathBuf>, stage: &'static str) -> Self {
        Error::Track {
            path: path.into(),
            stage,
            source: Box::new(self),
        }
    }
}
