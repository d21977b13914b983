//! Feature extraction with an on-disk cache.
//!
//! One document per track, keyed `<isrc>.feat`, carrying the framing and
//! cepstral settings that produced it; a cache entry whose settings differ
//! from the current run is stale and recomputed in place.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sic_core::dsp::extract_features;
use sic_core::{FeatureMatrix, FrameSpec, Isrc, MfccConfig};

use crate::corpus::{load_audio, CorpusManifest, TrackRecord};
use crate::error::{Error, Result};

pub const FEATURES_SCHEMA: &str = "features/1";

#[derive(Debug, Serialize, Deserialize)]
struct FeatureDoc {
    schema: String,
    isrc: Isrc,
    sample_rate_hz: u32,
    frame: FrameSpec,
    mfcc: MfccConfig,
    features: FeatureMatrix,
}

/// The extraction settings a cache entry must match to stay valid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontEnd {
    pub sample_rate_hz: u32,
    pub frame: FrameSpec,
    pub mfcc: MfccConfig,
}

impl FrontEnd {
    pub fn of(cfg: &crate::config::RunConfig) -> FrontEnd {
        FrontEnd {
            sample_rate_hz: cfg.sample_rate_hz,
            frame: cfg.frame,
            mfcc: cfg.mfcc,
        }
    }
}

fn cache_path(cache_dir: &Path, isrc: &Isrc) -> PathBuf {
    cache_dir.join(format!("{isrc}.feat"))
}

/// Load the cached features for a track when present and current.
fn load_cached(cache_dir: &Path, isrc: &Isrc, front_end: &FrontEnd) -> Option<FeatureMatrix> {
    let path = cache_path(cache_dir, isrc);
    let text = fs::read_to_string(&path).ok()?;
    let doc: FeatureDoc = serde_json::from_str(&text).ok()?;
    let fresh = doc.schema == FEATURES_SCHEMA
        && doc.isrc == *isrc
        && doc.sample_rate_hz == front_end.sample_rate_hz
        && doc.frame == front_end.frame
        && doc.mfcc == front_end.mfcc;
    fresh.then_some(doc.features)
}

/// Decode, extract, and cache one track's features (or reuse a fresh cache
/// entry).
pub fn features_for(
    manifest: &CorpusManifest,
    record: &TrackRecord,
    cache_dir: &Path,
    front_end: &FrontEnd,
) -> Result<FeatureMatrix> {
    if let Some(cached) = load_cached(cache_dir, &record.isrc, front_end) {
        return Ok(cached);
    }
    let clip = load_audio(&manifest.audio_path(record), front_end.sample_rate_hz)?;
    let features = extract_features(&clip, &front_end.frame, &front_end.mfcc)?;

    fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    let path = cache_path(cache_dir, &record.isrc);
    let doc = FeatureDoc {
        schema: FEATURES_SCHEMA.into(),
        isrc: record.isrc.clone(),
        sample_rate_hz: front_end.sample_rate_hz,
        frame: front_end.frame,
        mfcc: front_end.mfcc,
        features: features.clone(),
    };
    let json = serde_json::to_string(&doc).map_err(|e| Error::Json {
        path: path.clone(),
        source: e,
    })?;
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(features)
}
