use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no documents")]
    NoDocuments,

    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),

    #[error("empty concept lexicon")]
    EmptyLexicon,

    #[error("empty stimulus set")]
    EmptyStimulusSet,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid stimulus {index}: {message}")]
    InvalidStimulus { index: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} id {id} out of range (size {size})")]
    OutOfRange {
        what: &'static str,
        id: usize,
        size: usize,
    },

    #[error("count table underflow at {0}; counts are inconsistent with assignments")]
    CountUnderflow(&'static str),

    #[error("site {0} must be detached from the count tables before scoring")]
    SiteNotDetached(String),

    #[error("k = {k} exceeds the number of points ({n})")]
    TooManyClusters { k: usize, n: usize },

    #[error("empty intersection between predicted and gold concepts")]
    EmptyIntersection,

    #[error("all query features are unknown to the model")]
    AllFeaturesUnknown,

    #[error("degenerate marginals: expected agreement is 1 but observed agreement is {0}")]
    DegenerateMarginals(f64),

    #[error("response references unknown task {0:?}")]
    UnknownTask(String),

    #[error("checkpoint version {found} is not supported (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("vocabulary digest mismatch: model has {model}, data has {data}")]
    VocabularyMismatch { model: String, data: String },

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
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
