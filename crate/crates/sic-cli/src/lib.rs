//! Corpus tooling, persistence, and the experiment harness around
//! `sic-core`: WAV/manifest/annotation IO, the seeded synthetic corpus
//! generator, a feature cache, versioned model documents, experiment
//! protocols with report emission, and the `sic` command-line interface on
//! top of it all.

pub mod config;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod features;
pub mod formats;
pub mod model_store;
pub mod synth;

pub use error::{Error, Result};
