//! Error type shared by the core algorithms.

use alloc::string::String;

/// Errors produced by feature extraction, model training, and evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input collection was empty where at least one element is required.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Training data contains only one class.
    #[error("single-class training set: every sample is labelled {0}")]
    SingleClass(&'static str),

    /// Two aligned sequences have different lengths.
    #[error("length mismatch: {context} (left {left}, right {right})")]
    LengthMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    /// A vector's dimension does not match what a model expects.
    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Audio data violates the clip invariants.
    #[error("invalid audio: {0}")]
    InvalidAudio(String),

    /// Vocal-activity intervals are malformed.
    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),

    /// Identifier does not match the 12-character ISRC pattern.
    #[error("invalid ISRC {0:?}")]
    InvalidIsrc(String),

    /// A configuration value is out of its documented range.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A signal is too short for the requested framing.
    #[error("clip shorter than one frame: {samples} samples < frame of {frame_len}")]
    ClipTooShort { samples: usize, frame_len: usize },

    /// Stratified folding cannot place a class into every fold.
    #[error("class {label} has {count} tracks, fewer than k = {k} folds")]
    ClassSmallerThanK {
        label: &'static str,
        count: usize,
        k: usize,
    },

    /// Balanced resampling needs more majority-class tracks than exist.
    #[error(
        "insufficient songs for balanced sampling: need {needed} \
         ({repetitions} repetitions x {per_repetition}), pool has {available}"
    )]
    InsufficientSongs {
        needed: usize,
        available: usize,
        repetitions: usize,
        per_repetition: usize,
    },

    /// An iterative fit failed to produce a usable model.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Two corpora that must be disjoint share a track.
    #[error("train/test leakage: ISRC {0} appears in both sets")]
    Leakage(String),
}

pub type Result<T> = core::result::Result<T, Error>;
