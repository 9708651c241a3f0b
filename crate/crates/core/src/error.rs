use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::ValidationIssue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("{} validation issue(s); first: {}", .0.len(), .0.first().map(|i| i.to_string()).unwrap_or_default())]
    Validation(Vec<ValidationIssue>),

    #[error("span [{start}, {end}) does not align with word boundaries in {text:?}")]
    SpanBoundary { text: String, start: usize, end: usize },

    #[error("no eligible token for {0}")]
    NoCandidate(String),

    #[error("no span has an unseen-value pool entry")]
    NoSlot,

    #[error("no span has a slot with at least two ontology values")]
    NoRepairableSlot,

    #[error("utterance is empty")]
    EmptyUtterance,

    #[error("paraphrase generator unavailable: {0}")]
    GeneratorUnavailable(String),

    #[error("prediction/gold length mismatch: {predicted} predictions vs {gold} gold sets")]
    LengthMismatch { predicted: usize, gold: usize },

    #[error("record source ({dialog}, turn {turn}) not found in original corpus")]
    UnresolvedSource { dialog: String, turn: usize },

    #[error("corpus has no training user turns")]
    EmptyTrain,

    #[error("invalid config at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{origin}:{line}: {message}")]
    Resource { origin: String, line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    pub(crate) fn resource(origin: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Resource { origin: origin.to_string(), line, message: message.into() }
    }
}
