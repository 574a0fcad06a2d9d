//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A trajectory violates a structural invariant (see [`crate::model::validate_trajectory`]).
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    /// A quaternion is too far from unit norm to be normalized safely.
    #[error("invalid rotation: quaternion norm {norm} departs from 1 beyond tolerance {tol}")]
    InvalidRotation { norm: f64, tol: f64 },

    /// A signal is shorter than the operation requires.
    #[error("signal too short: length {len}, need at least {min}")]
    SignalTooShort { len: usize, min: usize },

    /// An input sequence was empty.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A fitting region has fewer than two samples.
    #[error("region too short: {len} samples, need at least 2")]
    RegionTooShort { len: usize },

    /// A scalar argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A synthetic segment duration is too short for the sampling interval.
    #[error("segment too short: duration {duration} s with dt {dt} s")]
    SegmentTooShort { duration: f64, dt: f64 },

    /// A record lacks the metric required by a ranking or weighting step.
    #[error("missing {metric} score on record `{id}`")]
    MissingScore { id: String, metric: String },

    /// A selection budget is outside `1..=N`.
    #[error("invalid budget: k = {k} with {len} records")]
    InvalidBudget { k: usize, len: usize },

    /// A score distribution has no spread where spread is required.
    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    /// A normalization group has too few members.
    #[error("group `{group}` too small: {len} records, need at least 2")]
    GroupTooSmall { group: String, len: usize },

    /// Two parallel sequences disagree in length.
    #[error("shape mismatch: {left} vs {right}")]
    ShapeError { left: usize, right: usize },

    /// A retrieval query cannot fill its re-ranking quota.
    #[error("candidate shortfall for query `{query}`: need {needed}, have {available}")]
    CandidateShortfall {
        query: String,
        needed: usize,
        available: usize,
    },

    /// A batch operation received no trajectories.
    #[error("empty batch")]
    EmptyBatch,

    /// A file could not be parsed; `line` is 1-based.
    #[error("parse error in {file}:{line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    /// A parsed trajectory failed validation.
    #[error("validation failed for `{id}`: {report}")]
    Validation { id: String, report: String },

    /// An I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A configuration value is missing or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A precondition not covered by a more specific variant.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
