use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}:{line}: malformed record: {reason}")]
    MalformedRecord {
        file: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{file}:{line}: rating {value} outside bounds [{min}, {max}]")]
    RatingOutOfBounds {
        file: PathBuf,
        line: usize,
        value: i64,
        min: i32,
        max: i32,
    },

    #[error("{file}:{line}: duplicate rating for user {user} and item {item}")]
    DuplicateRecord {
        file: PathBuf,
        line: usize,
        user: u32,
        item: u32,
    },

    #[error("rating {value} outside bounds [{min}, {max}] for user {user}, item {item}")]
    RatingRejected {
        user: u32,
        item: u32,
        value: i32,
        min: i32,
        max: i32,
    },

    #[error("user {user} already rated item {item}")]
    DuplicateRating { user: u32, item: u32 },

    #[error("unknown user id {0}")]
    UnknownUser(u32),

    #[error("unknown item id {0}")]
    UnknownItem(u32),

    #[error("density is undefined on an empty user or item set")]
    UndefinedDensity,

    #[error("operation requires a non-empty rating store")]
    EmptyStore,

    #[error("recommendation list is empty, no acceptance distribution")]
    EmptyDistribution,

    #[error("genre distribution requires a non-empty item set")]
    EmptyItemSet,

    #[error("distributions are over different vocabularies ({left} vs {right} genres)")]
    VocabularyMismatch { left: usize, right: usize },

    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("model fit failed: {0}")]
    Fit(String),

    #[error("model must be fitted before recommending")]
    NotFitted,

    #[error("snapshot line {line}: {reason}")]
    SnapshotFormat { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }
}
