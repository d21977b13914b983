//! Core algorithms for classifying music tracks as Song or Instrumental.
//!
//! The pipeline is two-staged: a frame-level singing-voice detector (MFCC +
//! delta features into a random forest) produces a per-frame probability
//! vector, which is then summarized into a fixed-length track descriptor
//! (probability histogram, voiced-run histogram, feature means) and classified
//! by a boosted ensemble of shallow decision trees. Reference baselines
//! (constant predictors, random assignment, a RANSAC hyperplane on track-mean
//! MFCC, and a vector-quantization + Markov-chain sequence model) and the
//! evaluation machinery (metrics, ROC, stratified folds, balanced resampling)
//! live here too.
//!
//! This crate is `no_std` + `alloc`: it handles no files and spawns no
//! threads. Audio decoding, corpus management, persistence, and the CLI live
//! in the companion `sic-cli` crate. Everything here is a pure function of
//! its inputs plus an explicit seed, so callers may freely parallelize
//! across tracks.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod aggregate;
pub mod annotation;
pub mod audio;
pub mod baselines;
pub mod dsp;
pub mod error;
pub mod frame_model;
pub mod label;
pub mod matrix;
pub mod metrics;
pub mod plan;
pub mod playlist;
pub mod rng;
pub mod track_model;
pub mod tree;

pub use aggregate::TrackFeatureVector;
pub use annotation::VocalActivityAnnotation;
pub use audio::AudioClip;
pub use dsp::{FeatureMatrix, FrameSpec, MfccConfig};
pub use error::{Error, Result};
pub use frame_model::{RandomForestModel, RfConfig};
pub use label::{Isrc, Label};
pub use matrix::Matrix;
pub use metrics::{EvalReport, RocCurve};
pub use playlist::Playlist;
pub use track_model::{AdaBoostModel, BoostConfig, TrackPrediction};
