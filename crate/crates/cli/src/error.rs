use std::path::PathBuf;

use topic_floor::Error as CoreError;

/// Process exit codes, one per error class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const OTHER: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const FORMAT: u8 = 4;
    pub const VALIDATION: u8 = 5;
    pub const ANNOTATION: u8 = 6;
    pub const MODEL: u8 = 7;
    pub const SPLIT: u8 = 8;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot read {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("config file {0}: {1}")]
    ConfigFile(PathBuf, String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use CoreError::*;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io(..) => exit::IO,
            CliError::ConfigFile(..) => exit::FORMAT,
            CliError::Core(e) => match e {
                Io { .. } => exit::IO,
                Format(_) | DuplicateId(_) | InvalidSpan { .. } => exit::FORMAT,
                Config(_) | IncompleteAssignment(_) | UnknownDocument(_) | UnknownTopic(_)
                | InvalidPartition(_) | LabelMismatch(_) | SplitMismatch(_) => exit::VALIDATION,
                Alignment { .. } | MissingAnnotation(..) | UnknownTag(_) => exit::ANNOTATION,
                EmptyVocab | DegenerateTraining(_) | LossIncreased { .. } => exit::MODEL,
                EmptySplit(_) => exit::SPLIT,
            },
        }
    }
}
