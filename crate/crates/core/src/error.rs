use std::path::PathBuf;

/// Errors raised anywhere in the audit pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("invalid span in document {doc:?}: {detail}")]
    InvalidSpan { doc: String, detail: String },
    #[error("alignment error in document {doc:?}: {detail}")]
    Alignment { doc: String, detail: String },
    #[error("split {0} would be empty")]
    EmptySplit(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("vocabulary is empty after pruning")]
    EmptyVocab,
    #[error("assignment is missing document {0:?}")]
    IncompleteAssignment(String),
    #[error("unknown document {0:?}")]
    UnknownDocument(String),
    #[error("unknown topic {0}")]
    UnknownTopic(usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("document {0:?} has no {1} annotation")]
    MissingAnnotation(String, &'static str),
    #[error("tag {0:?} has no entry in the conversion table")]
    UnknownTag(String),
    #[error("training corpus has fewer than two labels ({0} found)")]
    DegenerateTraining(usize),
    #[error("training loss increased at epoch {epoch}: {previous} -> {current}")]
    LossIncreased {
        epoch: usize,
        previous: f64,
        current: f64,
    },
    #[error("label {0:?} is not known to the model")]
    LabelMismatch(String),
    #[error("corpora do not share splits: {0}")]
    SplitMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
