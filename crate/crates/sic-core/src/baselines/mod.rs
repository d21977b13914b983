//! Reference classifiers the pipeline is benchmarked against: constant
//! predictors, random assignment, a RANSAC hyperplane over track-mean MFCC,
//! and a vector-quantization + Markov-chain sequence model.

pub mod ga;
pub mod vqmm;

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::label::{Isrc, Label};
use crate::rng::seeded_rng;
use crate::track_model::TrackPrediction;

/// Constant predictor: every track gets `label`. The margin is the +/-1
/// sentinel for that class (positive means Instrumental).
pub fn predict_all(label: Label, isrcs: &[Isrc]) -> Vec<TrackPrediction> {
    let margin = match label {
        Label::Instrumental => 1.0,
        Label::Song => -1.0,
    };
    isrcs
        .iter()
        .map(|isrc| TrackPrediction {
            isrc: isrc.clone(),
            predicted_label: label,
            margin,
            scores: (-margin, margin),
        })
        .collect()
}

/// Random classification: a seeded permutation assigns the first
/// `ceil(n / 2)` tracks to Song and the rest to Instrumental, so the class
/// counts differ by at most one (an exact half-split, not per-track coin
/// flips).
pub fn predict_rca(isrcs: &[Isrc], seed: u64) -> Vec<TrackPrediction> {
    let mut order: Vec<usize> = (0..isrcs.len()).collect();
    let mut rng = seeded_rng(seed, "baseline/rca");
    order.shuffle(&mut rng);
    let n_song = isrcs.len().div_ceil(2);
    let mut labels = alloc::vec![Label::Instrumental; isrcs.len()];
    for &i in order.iter().take(n_song) {
        labels[i] = Label::Song;
    }
    isrcs
        .iter()
        .zip(labels)
        .map(|(isrc, label)| {
            let margin = match label {
                Label::Instrumental => 1.0,
                Label::Song => -1.0,
            };
            TrackPrediction {
                isrc: isrc.clone(),
                predicted_label: label,
                margin,
                scores: (-margin, margin),
            }
        })
        .collect()
}
