//! Stage 2 feature construction: summarize a track's frame probabilities and
//! frame features into the fixed 79-dimensional descriptor
//! `[10-bin probability histogram | 30-bin voiced-run histogram | 39 means]`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dsp::{FeatureMatrix, N_FEATURES};
use crate::error::{Error, Result};
use crate::frame_model::ProbabilityVector;

pub const PROB_BINS: usize = 10;
pub const NGRAM_BINS: usize = 30;
/// Total descriptor length: 10 + 30 + 39.
pub const TRACK_VECTOR_LEN: usize = PROB_BINS + NGRAM_BINS + N_FEATURES;

/// The 79-dimensional track descriptor fed to the track classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackFeatureVector {
    pub prob_hist: [f64; PROB_BINS],
    pub ngram_hist: [f64; NGRAM_BINS],
    #[serde(with = "means_array")]
    pub feature_means: [f64; N_FEATURES],
}

/// serde lacks impls for arrays past 32 elements; route the 39 means
/// through a slice.
mod means_array {
    use super::N_FEATURES;
    use alloc::vec::Vec;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64; N_FEATURES], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; N_FEATURES], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|bad: Vec<f64>| D::Error::invalid_length(bad.len(), &"39 feature means"))
    }
}

impl TrackFeatureVector {
    /// Flatten in the fixed `[prob_hist | ngram_hist | feature_means]` order.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(TRACK_VECTOR_LEN);
        out.extend_from_slice(&self.prob_hist);
        out.extend_from_slice(&self.ngram_hist);
        out.extend_from_slice(&self.feature_means);
        out
    }
}

/// Count-normalized histogram of probabilities over ten equal bins of
/// `[0, 1]`; a probability of exactly 1.0 clamps into the last bin.
pub fn probability_histogram(pv: &ProbabilityVector) -> Result<[f64; PROB_BINS]> {
    if pv.is_empty() {
        return Err(Error::EmptyInput("probability vector"));
    }
    let mut hist = [0.0; PROB_BINS];
    for &p in pv.values() {
        let bin = ((p * PROB_BINS as f64) as usize).min(PROB_BINS - 1);
        hist[bin] += 1.0;
    }
    for h in &mut hist {
        *h /= pv.len() as f64;
    }
    Ok(hist)
}

/// Lengths of maximal runs of frames with `p >= threshold`, in track order.
pub fn voiced_runs(pv: &ProbabilityVector, threshold: f64) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut current = 0usize;
    for &p in pv.values() {
        if p >= threshold {
            current += 1;
        } else if current > 0 {
            runs.push(current);
            current = 0;
        }
    }
    if current > 0 {
        runs.push(current);
    }
    runs
}

/// Normalized 30-bin histogram of run lengths; lengths of 30 and above merge
/// into the last bin. No runs at all (a fully unvoiced track) yields the
/// all-zero vector so Instrumentals stay representable.
pub fn ngram_histogram(runs: &[usize]) -> [f64; NGRAM_BINS] {
    let mut hist = [0.0; NGRAM_BINS];
    if runs.is_empty() {
        return hist;
    }
    for &len in runs {
        debug_assert!(len >= 1, "runs are maximal and therefore non-empty");
        hist[len.min(NGRAM_BINS) - 1] += 1.0;
    }
    for h in &mut hist {
        *h /= runs.len() as f64;
    }
    hist
}

/// Assemble the full track descriptor. The probability vector must align
/// one-to-one with the feature rows it was predicted from.
pub fn build_track_vector(
    pv: &ProbabilityVector,
    features: &FeatureMatrix,
    threshold: f64,
) -> Result<TrackFeatureVector> {
    if pv.len() != features.n_frames() {
        return Err(Error::LengthMismatch {
            context: "probability vector vs feature rows",
            left: pv.len(),
            right: features.n_frames(),
        });
    }
    Ok(TrackFeatureVector {
        prob_hist: probability_histogram(pv)?,
        ngram_hist: ngram_histogram(&voiced_runs(pv, threshold)),
        feature_means: features.feature_means(),
    })
}
