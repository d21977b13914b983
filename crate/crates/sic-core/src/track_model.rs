//! Stage 2 classifier: discrete two-class AdaBoost over shallow Gini trees
//! on track feature vectors, with class weighting and a signed margin for
//! ROC analysis. Positive margins mean Instrumental.

use alloc::vec::Vec;

// Float supplies the f64 math methods in no_std builds; whenever std is
// elsewhere in the crate graph the inherent methods shadow it, so the
// import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{Isrc, Label};
use crate::matrix::Matrix;
use crate::tree::{DecisionTree, TreeConfig, TreeDataset};

/// Cap on a round's vote weight when its tree is error-free, keeping the
/// margin arithmetic finite.
const ALPHA_CAP: f64 = 10.0;

/// Boosting parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub n_rounds: usize,
    pub tree_depth: usize,
    /// Initial per-sample weight multipliers `(w_song, w_instrumental)`.
    pub class_weights: (f64, f64),
    pub seed: u64,
}

impl Default for BoostConfig {
    fn default() -> BoostConfig {
        BoostConfig {
            n_rounds: 200,
            tree_depth: 2,
            class_weights: (1.0, 1.0),
            seed: 0,
        }
    }
}

/// One boosting round: a weak tree and its vote weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostRound {
    pub tree: DecisionTree,
    pub alpha: f64,
}

/// A trained boosted ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    rounds: Vec<BoostRound>,
    class_weights: (f64, f64),
    n_features: usize,
    config: BoostConfig,
}

impl AdaBoostModel {
    pub fn rounds(&self) -> &[BoostRound] {
        &self.rounds
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn config(&self) -> &BoostConfig {
        &self.config
    }
}

/// A classified track: the winning label, the signed ensemble margin
/// (positive toward Instrumental), and per-class scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackPrediction {
    pub isrc: Isrc,
    pub predicted_label: Label,
    pub margin: f64,
    /// `(song_score, instrumental_score) = (-margin, +margin)`.
    pub scores: (f64, f64),
}

impl TrackPrediction {
    /// The margin oriented toward `tag`: how confidently this prediction
    /// points at that class.
    pub fn margin_toward(&self, tag: Label) -> f64 {
        match tag {
            Label::Instrumental => self.margin,
            Label::Song => -self.margin,
        }
    }
}

/// Train discrete AdaBoost.
///
/// Initial sample weights are proportional to the class weight of each label
/// and normalized. Every round fits a depth-limited Gini tree on the current
/// weights, computes its weighted error `e`, votes with
/// `alpha = ln((1 - e) / e) / 2`, scales misclassified weights by `exp(alpha)`
/// and the rest by `exp(-alpha)`, then renormalizes. A round with `e == 0`
/// is kept with `alpha` capped and ends training; a round with `e >= 0.5` is
/// discarded and ends training.
pub fn train_adaboost(
    vectors: &[Vec<f64>],
    labels: &[Label],
    cfg: &BoostConfig,
) -> Result<AdaBoostModel> {
    if vectors.is_empty() {
        return Err(Error::EmptyInput("track training set"));
    }
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            context: "track vectors vs labels",
            left: vectors.len(),
            right: labels.len(),
        });
    }
    if labels.iter().all(|&l| l == Label::Song) {
        return Err(Error::SingleClass("Song"));
    }
    if labels.iter().all(|&l| l == Label::Instrumental) {
        return Err(Error::SingleClass("Instrumental"));
    }
    if cfg.n_rounds == 0 {
        return Err(Error::InvalidConfig("n_rounds must be >= 1".into()));
    }
    if cfg.class_weights.0 <= 0.0 || cfg.class_weights.1 <= 0.0 {
        return Err(Error::InvalidConfig(
            "class weights must be positive".into(),
        ));
    }
    let n_features = vectors[0].len();
    let flat: Vec<f64> = {
        let mut flat = Vec::with_capacity(vectors.len() * n_features);
        for v in vectors {
            if v.len() != n_features {
                return Err(Error::DimensionMismatch {
                    expected: n_features,
                    got: v.len(),
                });
            }
            flat.extend_from_slice(v);
        }
        flat
    };
    let features = Matrix::from_rows(flat, n_features);
    let positive: Vec<bool> = labels.iter().map(|&l| l == Label::Instrumental).collect();

    let n = vectors.len();
    let mut weights: Vec<f64> = labels
        .iter()
        .map(|&l| match l {
            Label::Song => cfg.class_weights.0,
            Label::Instrumental => cfg.class_weights.1,
        })
        .collect();
    normalize(&mut weights);

    let tree_cfg = TreeConfig {
        max_depth: cfg.tree_depth,
        min_leaf: 1,
        mtry: None,
    };
    let indices: Vec<usize> = (0..n).collect();
    let mut rounds = Vec::new();

    for _ in 0..cfg.n_rounds {
        let data = TreeDataset {
            features: &features,
            labels: &positive,
            weights: &weights,
        };
        let tree = DecisionTree::fit(data, &indices, &tree_cfg, None);

        let votes: Vec<bool> = features.rows().map(|row| tree.predict_positive(row)).collect();
        let error: f64 = weights
            .iter()
            .zip(votes.iter().zip(&positive))
            .filter(|(_, (vote, truth))| vote != truth)
            .map(|(w, _)| w)
            .sum();

        if error <= 0.0 {
            rounds.push(BoostRound {
                tree,
                alpha: ALPHA_CAP,
            });
            break;
        }
        if error >= 0.5 {
            break;
        }
        let alpha = 0.5 * ((1.0 - error) / error).ln();
        for (w, (vote, truth)) in weights.iter_mut().zip(votes.iter().zip(&positive)) {
            *w *= if vote != truth {
                alpha.exp()
            } else {
                (-alpha).exp()
            };
        }
        normalize(&mut weights);
        rounds.push(BoostRound { tree, alpha });
    }

    if rounds.is_empty() {
        return Err(Error::DegenerateFit(
            "first boosting round had weighted error >= 0.5".into(),
        ));
    }
    Ok(AdaBoostModel {
        rounds,
        class_weights: cfg.class_weights,
        n_features,
        config: *cfg,
    })
}

/// Classify one track: `margin = sum_r alpha_r * h_r(v)` with votes in
/// `{-1 Song, +1 Instrumental}`; the label follows the sign and an exact tie
/// resolves to Song so ambiguous tracks never contaminate Instrumental
/// playlists.
pub fn predict_track(
    model: &AdaBoostModel,
    isrc: Isrc,
    vector: &[f64],
) -> Result<TrackPrediction> {
    if vector.len() != model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            got: vector.len(),
        });
    }
    let margin: f64 = model
        .rounds
        .iter()
        .map(|r| {
            let vote = if r.tree.predict_positive(vector) {
                1.0
            } else {
                -1.0
            };
            r.alpha * vote
        })
        .sum();
    let predicted_label = if margin > 0.0 {
        Label::Instrumental
    } else {
        Label::Song
    };
    Ok(TrackPrediction {
        isrc,
        predicted_label,
        margin,
        scores: (-margin, margin),
    })
}

fn normalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0, "weights must not all vanish");
    for w in weights.iter_mut() {
        *w /= total;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn isrc(i: usize) -> Isrc {
        Isrc::new(&alloc::format!("ZZTST00{i:05}")).unwrap()
    }

    /// Pad a single discriminative feature out to a fixed width.
    fn padded(x: f64, width: usize) -> Vec<f64> {
        let mut v = vec![0.0; width];
        v[0] = x;
        v
    }

    /// Hand-computed first round: four equally weighted samples, the best
    /// stump errs on exactly one, so e = 1/4, alpha = ln(3)/2, and the
    /// reweighted distribution is {1/2 for the miss, 1/6 elsewhere}.
    #[test]
    fn golden_first_round() {
        let vectors: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 3.0]
            .iter()
            .map(|&x| padded(x, 79))
            .collect();
        let labels = vec![
            Label::Song,
            Label::Song,
            Label::Instrumental,
            Label::Song,
        ];
        let cfg = BoostConfig {
            n_rounds: 1,
            tree_depth: 1,
            class_weights: (1.0, 1.0),
            seed: 0,
        };
        let model = train_adaboost(&vectors, &labels, &cfg).unwrap();
        assert_eq!(model.rounds().len(), 1);
        let expected_alpha = 0.5 * 3.0f64.ln();
        assert!(
            (model.rounds()[0].alpha - expected_alpha).abs() <= 1e-12,
            "alpha = {}, expected ln(3)/2",
            model.rounds()[0].alpha
        );

        // replay the update by hand to check the weight arithmetic
        let mut weights = vec![0.25; 4];
        let tree = &model.rounds()[0].tree;
        let votes: Vec<bool> = vectors.iter().map(|v| tree.predict_positive(v)).collect();
        let truths = [false, false, true, false];
        let errs: Vec<bool> = votes.iter().zip(truths).map(|(v, t)| *v != t).collect();
        let e: f64 = errs
            .iter()
            .zip(&weights)
            .filter(|(err, _)| **err)
            .map(|(_, w)| w)
            .sum();
        assert!((e - 0.25).abs() <= 1e-12, "weighted error = {e}");
        for (w, err) in weights.iter_mut().zip(&errs) {
            *w *= if *err {
                expected_alpha.exp()
            } else {
                (-expected_alpha).exp()
            };
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut sorted = weights.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[3] - 0.5).abs() <= 1e-12);
        for w in &sorted[..3] {
            assert!((w - 1.0 / 6.0).abs() <= 1e-12);
        }
        assert_eq!(errs.iter().filter(|&&e| e).count(), 1);
    }

    #[test]
    fn separable_set_reaches_perfect_training_accuracy() {
        let vectors: Vec<Vec<f64>> = (0..40)
            .map(|i| padded(if i % 2 == 0 { -1.0 - 0.01 * i as f64 } else { 1.0 + 0.01 * i as f64 }, 79))
            .collect();
        let labels: Vec<Label> = (0..40)
            .map(|i| if i % 2 == 0 { Label::Song } else { Label::Instrumental })
            .collect();
        let model = train_adaboost(&vectors, &labels, &BoostConfig::default()).unwrap();
        for (v, &truth) in vectors.iter().zip(&labels) {
            let pred = predict_track(&model, isrc(0), v).unwrap();
            assert_eq!(pred.predicted_label, truth);
        }
    }

    #[test]
    fn class_weights_scale_initial_distribution() {
        // (1, 5): each Instrumental starts at five times each Song weight
        let w_song = 1.0;
        let w_instr = 5.0;
        let labels = [Label::Song, Label::Instrumental, Label::Song];
        let mut weights: Vec<f64> = labels
            .iter()
            .map(|&l| if l == Label::Song { w_song } else { w_instr })
            .collect();
        normalize(&mut weights);
        assert!((weights[1] / weights[0] - 5.0).abs() <= 1e-12);
        assert!((weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn margin_vote_arithmetic_and_tie_break() {
        // two rounds pulling in opposite directions: alpha 0.6 for Song,
        // alpha 0.5 for Instrumental -> margin -0.1 -> Song
        let vectors = vec![padded(-1.0, 4), padded(1.0, 4)];
        let labels = vec![Label::Song, Label::Instrumental];
        let cfg = BoostConfig {
            n_rounds: 1,
            tree_depth: 1,
            class_weights: (1.0, 1.0),
            seed: 0,
        };
        let trained = train_adaboost(&vectors, &labels, &cfg).unwrap();
        let song_tree = trained.rounds()[0].tree.clone();

        let model = AdaBoostModel {
            rounds: vec![
                BoostRound {
                    tree: song_tree.clone(),
                    alpha: 0.6,
                },
                BoostRound {
                    tree: song_tree.clone(),
                    alpha: 0.5,
                },
            ],
            class_weights: (1.0, 1.0),
            n_features: 4,
            config: cfg,
        };
        // on the Song side both rounds vote -1: margin = -1.1
        let pred = predict_track(&model, isrc(1), &padded(-1.0, 4)).unwrap();
        assert!((pred.margin + 1.1).abs() <= 1e-12);
        assert_eq!(pred.predicted_label, Label::Song);
        assert_eq!(pred.scores, (1.1, -1.1));

        // opposing votes with equal weight: margin exactly 0 -> Song
        let tie = AdaBoostModel {
            rounds: vec![
                BoostRound {
                    tree: song_tree.clone(),
                    alpha: 0.5,
                },
                BoostRound {
                    tree: {
                        // a tree voting the other way on the same input
                        let features = Matrix::from_rows(vec![-1.0, 1.0], 1);
                        let labels = vec![true, false];
                        let weights = vec![0.5, 0.5];
                        DecisionTree::fit(
                            TreeDataset {
                                features: &features,
                                labels: &labels,
                                weights: &weights,
                            },
                            &[0, 1],
                            &TreeConfig {
                                max_depth: 1,
                                min_leaf: 1,
                                mtry: None,
                            },
                            None,
                        )
                    },
                    alpha: 0.5,
                },
            ],
            class_weights: (1.0, 1.0),
            n_features: 4,
            config: cfg,
        };
        let pred = predict_track(&tie, isrc(2), &padded(-1.0, 4)).unwrap();
        assert_eq!(pred.margin, 0.0);
        assert_eq!(pred.predicted_label, Label::Song);
    }

    #[test]
    fn single_round_constant_tree_predicts_instrumental() {
        // one round, alpha 1, tree that always votes Instrumental
        let features = Matrix::from_rows(vec![0.0, 1.0], 1);
        let labels = vec![true, true];
        let weights = vec![0.5, 0.5];
        let tree = DecisionTree::fit(
            TreeDataset {
                features: &features,
                labels: &labels,
                weights: &weights,
            },
            &[0, 1],
            &TreeConfig {
                max_depth: 1,
                min_leaf: 1,
                mtry: None,
            },
            None,
        );
        let model = AdaBoostModel {
            rounds: vec![BoostRound { tree, alpha: 1.0 }],
            class_weights: (1.0, 1.0),
            n_features: 2,
            config: BoostConfig::default(),
        };
        let pred = predict_track(&model, isrc(3), &[5.0, 5.0]).unwrap();
        assert_eq!(pred.margin, 1.0);
        assert_eq!(pred.predicted_label, Label::Instrumental);
    }

    #[test]
    fn weights_stay_normalized_across_rounds() {
        // replicate training loop bookkeeping on a noisy problem and check
        // the invariant the trainer relies on
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let vectors: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let base = if i % 2 == 0 { -1.0 } else { 1.0 };
                vec![base + rng.random_range(-1.4..1.4), rng.random_range(-1.0..1.0)]
            })
            .collect();
        let labels: Vec<Label> = (0..60)
            .map(|i| if i % 2 == 0 { Label::Song } else { Label::Instrumental })
            .collect();
        let cfg = BoostConfig {
            n_rounds: 25,
            tree_depth: 2,
            class_weights: (1.0, 1.0),
            seed: 0,
        };
        let model = train_adaboost(&vectors, &labels, &cfg).unwrap();
        assert!(!model.rounds().is_empty());

        // independently replay the weight recursion and verify normalization
        let positive: Vec<bool> = labels.iter().map(|&l| l == Label::Instrumental).collect();
        let mut weights = vec![1.0 / 60.0; 60];
        for round in model.rounds() {
            let sum: f64 = weights.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9, "weights drifted to {sum}");
            let votes: Vec<bool> = vectors
                .iter()
                .map(|v| round.tree.predict_positive(v))
                .collect();
            let e: f64 = weights
                .iter()
                .zip(votes.iter().zip(&positive))
                .filter(|(_, (v, t))| v != t)
                .map(|(w, _)| w)
                .sum();
            assert!(e < 0.5, "kept round with error {e}");
            if e > 0.0 {
                for (w, (v, t)) in weights.iter_mut().zip(votes.iter().zip(&positive)) {
                    *w *= if v != t {
                        round.alpha.exp()
                    } else {
                        (-round.alpha).exp()
                    };
                }
                let total: f64 = weights.iter().sum();
                for w in &mut weights {
                    *w /= total;
                }
            }
        }
    }

    #[test]
    fn scaling_class_weights_preserves_labels() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let vectors: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let base = if i % 2 == 0 { -1.0 } else { 1.0 };
                vec![base + rng.random_range(-0.8..0.8), rng.random_range(-1.0..1.0)]
            })
            .collect();
        let labels: Vec<Label> = (0..50)
            .map(|i| if i % 2 == 0 { Label::Song } else { Label::Instrumental })
            .collect();
        let mut cfg = BoostConfig {
            n_rounds: 30,
            tree_depth: 2,
            class_weights: (1.0, 3.0),
            seed: 0,
        };
        let a = train_adaboost(&vectors, &labels, &cfg).unwrap();
        cfg.class_weights = (2.5, 7.5);
        let b = train_adaboost(&vectors, &labels, &cfg).unwrap();
        for v in &vectors {
            let pa = predict_track(&a, isrc(4), v).unwrap();
            let pb = predict_track(&b, isrc(4), v).unwrap();
            assert_eq!(pa.predicted_label, pb.predicted_label);
        }
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let cfg = BoostConfig::default();
        assert!(matches!(
            train_adaboost(&[], &[], &cfg).unwrap_err(),
            Error::EmptyInput(_)
        ));
        let v = vec![padded(0.0, 3), padded(1.0, 3)];
        assert!(matches!(
            train_adaboost(&v, &[Label::Song, Label::Song], &cfg).unwrap_err(),
            Error::SingleClass("Song")
        ));
        let ragged = vec![padded(0.0, 3), padded(1.0, 4)];
        assert!(matches!(
            train_adaboost(&ragged, &[Label::Song, Label::Instrumental], &cfg).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
        // prediction dimension check
        let model = train_adaboost(&v, &[Label::Song, Label::Instrumental], &cfg).unwrap();
        assert!(matches!(
            predict_track(&model, isrc(5), &[0.0; 7]).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
    }

    #[test]
    fn error_free_round_is_kept_with_capped_alpha() {
        let vectors = vec![padded(-1.0, 2), padded(1.0, 2)];
        let labels = vec![Label::Song, Label::Instrumental];
        let cfg = BoostConfig {
            n_rounds: 50,
            tree_depth: 2,
            class_weights: (1.0, 1.0),
            seed: 0,
        };
        let model = train_adaboost(&vectors, &labels, &cfg).unwrap();
        assert_eq!(model.rounds().len(), 1, "perfect tree ends training");
        assert_eq!(model.rounds()[0].alpha, ALPHA_CAP);
    }
}
