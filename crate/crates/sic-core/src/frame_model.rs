//! Stage 1: a random forest over per-frame features that emits the
//! probability of singing-voice presence for every frame of a track.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// Float supplies the f64 math methods in no_std builds; whenever std is
// elsewhere in the crate graph the inherent methods shadow it, so the
// import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::annotation::VocalActivityAnnotation;
use crate::error::{Error, Result};
use crate::label::Label;
use crate::matrix::Matrix;
use crate::rng::seeded_rng;
use crate::tree::{DecisionTree, TreeConfig, TreeDataset};

/// Per-frame singing-voice likelihoods in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<ProbabilityVector> {
        if values
            .iter()
            .any(|p| !p.is_finite() || !(0.0..=1.0).contains(p))
        {
            return Err(Error::InvalidConfig(
                "probability outside [0, 1]".into(),
            ));
        }
        Ok(ProbabilityVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Mark each frame voiced iff its center timestamp falls inside a voiced
/// interval. Instrumental tracks get all-false regardless of annotation, and
/// a missing annotation reads as fully unvoiced.
pub fn align_labels(
    annotation: Option<&VocalActivityAnnotation>,
    frame_times_s: &[f64],
    track_label: Label,
) -> Vec<bool> {
    match (track_label, annotation) {
        (Label::Instrumental, _) | (_, None) => vec![false; frame_times_s.len()],
        (Label::Song, Some(ann)) => frame_times_s.iter().map(|&t| ann.is_voiced_at(t)).collect(),
    }
}

/// Random-forest training parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RfConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for RfConfig {
    fn default() -> RfConfig {
        RfConfig {
            n_trees: 100,
            max_depth: 12,
            min_leaf: 5,
            seed: 0,
        }
    }
}

/// A trained forest. Each tree was fit on a bootstrap resample with
/// `ceil(sqrt(n_features))` random split candidates per node; prediction
/// averages the leaf positive fractions (soft votes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForestModel {
    trees: Vec<DecisionTree>,
    n_features: usize,
    config: RfConfig,
}

impl RandomForestModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn config(&self) -> &RfConfig {
        &self.config
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }
}

/// Train the frame classifier on stacked feature rows and aligned voiced
/// flags.
///
/// The model is a function of the sample multiset and the seed: rows are
/// ordered canonically before any bootstrap index is drawn, so permuting the
/// caller's row order cannot change the result.
pub fn train_frame_classifier(
    features: &Matrix,
    labels: &[bool],
    cfg: &RfConfig,
) -> Result<RandomForestModel> {
    let n = features.n_rows();
    if n == 0 {
        return Err(Error::EmptyInput("frame training set"));
    }
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            context: "frame features vs labels",
            left: n,
            right: labels.len(),
        });
    }
    if labels.iter().all(|&v| v) {
        return Err(Error::SingleClass("voiced"));
    }
    if labels.iter().all(|&v| !v) {
        return Err(Error::SingleClass("unvoiced"));
    }
    if cfg.n_trees == 0 {
        return Err(Error::InvalidConfig("n_trees must be >= 1".into()));
    }

    let canonical = canonical_order(features, labels);
    let weights = vec![1.0; n];
    let data = TreeDataset {
        features,
        labels,
        weights: &weights,
    };
    let mtry = (features.n_cols() as f64).sqrt().ceil() as usize;
    let tree_cfg = TreeConfig {
        max_depth: cfg.max_depth,
        min_leaf: cfg.min_leaf,
        mtry: Some(mtry),
    };

    let trees = (0..cfg.n_trees)
        .map(|t| {
            let mut rng = seeded_rng(cfg.seed, &format!("frame-model/tree/{t}"));
            let bootstrap: Vec<usize> = (0..n)
                .map(|_| canonical[rng.random_range(0..n)])
                .collect();
            DecisionTree::fit(data, &bootstrap, &tree_cfg, Some(&mut rng))
        })
        .collect();

    Ok(RandomForestModel {
        trees,
        n_features: features.n_cols(),
        config: *cfg,
    })
}

/// Per-frame probability: mean over trees of the reached leaf's positive
/// fraction.
pub fn predict_frame_probabilities(
    model: &RandomForestModel,
    features: &Matrix,
) -> Result<ProbabilityVector> {
    if features.n_cols() != model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            got: features.n_cols(),
        });
    }
    let scale = 1.0 / model.trees.len() as f64;
    let probs: Vec<f64> = features
        .rows()
        .map(|row| {
            model
                .trees
                .iter()
                .map(|t| t.predict_fraction(row))
                .sum::<f64>()
                * scale
        })
        .collect();
    ProbabilityVector::new(probs)
}

/// Indices of rows sorted lexicographically by feature values with the label
/// as the final tie-break, making downstream seeded draws independent of the
/// caller's row order.
fn canonical_order(features: &Matrix, labels: &[bool]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..features.n_rows()).collect();
    order.sort_by(|&a, &b| {
        for (x, y) in features.row(a).iter().zip(features.row(b)) {
            match x.total_cmp(y) {
                core::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        labels[a].cmp(&labels[b])
    });
    order
}
