//! Experiment plans: stratified k-fold partitions and repeated balanced
//! sampling of an unbalanced test pool. Plans operate on label slices and
//! return index sets, so the corpus layer stays free to store records however
//! it likes.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Label;
use crate::rng::seeded_rng;

/// Which experiment protocol to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    /// Stratified k-fold cross-validation over one corpus.
    KFold { k: usize },
    /// Train on the train split; evaluate on repeated balanced samples of
    /// the test split (all minority tracks plus an equal-sized majority
    /// sample, disjoint across repetitions).
    CrossDbBalanced { repetitions: usize },
    /// Train on the train split; evaluate once on the full unbalanced test
    /// split.
    CrossDbFull,
}

/// A fully specified experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub positive_class: Label,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ExperimentKind::KFold { k } if k < 2 => {
                Err(Error::InvalidConfig("k-fold needs k >= 2".into()))
            }
            ExperimentKind::CrossDbBalanced { repetitions } if repetitions == 0 => {
                Err(Error::InvalidConfig("need at least one repetition".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Partition `0..labels.len()` into `k` disjoint folds, stratified so each
/// class's counts differ by at most one across folds. Seeded shuffle, then
/// round-robin dealing per class.
pub fn stratified_kfold(labels: &[Label], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidConfig("k-fold needs k >= 2".into()));
    }
    let mut folds: Vec<Vec<usize>> = (0..k).map(|_| Vec::new()).collect();
    let mut rng = seeded_rng(seed, "plan/kfold");
    for class in [Label::Song, Label::Instrumental] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::ClassSmallerThanK {
                label: class.as_str(),
                count: members.len(),
                k,
            });
        }
        members.shuffle(&mut rng);
        for (i, idx) in members.into_iter().enumerate() {
            folds[i % k].push(idx);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Balanced test samples for an unbalanced pool: every repetition takes all
/// Instrumentals plus an equal-sized sample of Songs drawn without
/// replacement across repetitions (so the Song samples are pairwise
/// disjoint).
pub fn cross_db_balanced_samples(
    labels: &[Label],
    repetitions: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if repetitions == 0 {
        return Err(Error::InvalidConfig("need at least one repetition".into()));
    }
    let instrumentals: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == Label::Instrumental)
        .collect();
    let mut songs: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == Label::Song)
        .collect();
    if instrumentals.is_empty() {
        return Err(Error::EmptyInput("instrumental test pool"));
    }
    let per_repetition = instrumentals.len();
    let needed = per_repetition * repetitions;
    if songs.len() < needed {
        return Err(Error::InsufficientSongs {
            needed,
            available: songs.len(),
            repetitions,
            per_repetition,
        });
    }
    let mut rng = seeded_rng(seed, "plan/cross-db-balanced");
    songs.shuffle(&mut rng);
    Ok((0..repetitions)
        .map(|r| {
            let mut sample = instrumentals.clone();
            sample.extend_from_slice(&songs[r * per_repetition..(r + 1) * per_repetition]);
            sample.sort_unstable();
            sample
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn labels(n_song: usize, n_instr: usize) -> Vec<Label> {
        let mut v = vec![Label::Song; n_song];
        v.extend(vec![Label::Instrumental; n_instr]);
        v
    }

    #[test]
    fn folds_partition_and_stratify() {
        let lab = labels(5, 5);
        let folds = stratified_kfold(&lab, 5, 3).unwrap();
        assert_eq!(folds.len(), 5);
        let mut seen = BTreeSet::new();
        for fold in &folds {
            assert_eq!(fold.len(), 2);
            let songs = fold.iter().filter(|&&i| lab[i] == Label::Song).count();
            assert_eq!(songs, 1, "each fold gets one Song and one Instrumental");
            for &i in fold {
                assert!(seen.insert(i), "index {i} appears twice");
            }
        }
        assert_eq!(seen.len(), 10, "folds cover the corpus");
    }

    #[test]
    fn fold_class_counts_differ_by_at_most_one() {
        let lab = labels(23, 11);
        let folds = stratified_kfold(&lab, 5, 9).unwrap();
        for class in [Label::Song, Label::Instrumental] {
            let counts: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|&&i| lab[i] == class).count())
                .collect();
            let max = counts.iter().max().unwrap();
            let min = counts.iter().min().unwrap();
            assert!(max - min <= 1, "{class} counts {counts:?}");
        }
    }

    #[test]
    fn folds_are_seeded() {
        let lab = labels(20, 20);
        assert_eq!(
            stratified_kfold(&lab, 4, 7).unwrap(),
            stratified_kfold(&lab, 4, 7).unwrap()
        );
        assert_ne!(
            stratified_kfold(&lab, 4, 7).unwrap(),
            stratified_kfold(&lab, 4, 8).unwrap()
        );
    }

    #[test]
    fn small_class_is_rejected() {
        let lab = labels(10, 3);
        let err = stratified_kfold(&lab, 5, 0).unwrap_err();
        assert!(matches!(
            err,
            Error::ClassSmallerThanK {
                label: "Instrumental",
                count: 3,
                k: 5
            }
        ));
    }

    #[test]
    fn balanced_samples_are_balanced_and_disjoint_in_songs() {
        // scaled-down protocol: 40 songs + 4 instrumentals, 8 repetitions
        let lab = labels(40, 4);
        let samples = cross_db_balanced_samples(&lab, 8, 5).unwrap();
        assert_eq!(samples.len(), 8);
        let mut used_songs = BTreeSet::new();
        for sample in &samples {
            assert_eq!(sample.len(), 8);
            let songs: Vec<usize> = sample
                .iter()
                .copied()
                .filter(|&i| lab[i] == Label::Song)
                .collect();
            let instr = sample.len() - songs.len();
            assert_eq!(songs.len(), 4, "half songs");
            assert_eq!(instr, 4, "half instrumentals");
            for s in songs {
                assert!(used_songs.insert(s), "song {s} reused across repetitions");
            }
        }
    }

    #[test]
    fn insufficient_songs_is_an_error() {
        let lab = labels(31, 4);
        let err = cross_db_balanced_samples(&lab, 8, 0).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientSongs {
                needed: 32,
                available: 31,
                ..
            }
        ));
    }

    #[test]
    fn paper_scale_sample_size() {
        // 4,456 instrumentals -> each balanced repetition holds 8,912 tracks
        let lab = labels(37_035, 4_456);
        let samples = cross_db_balanced_samples(&lab, 8, 1).unwrap();
        assert!(samples.iter().all(|s| s.len() == 8_912));
    }

    #[test]
    fn plan_validation() {
        assert!(ExperimentPlan {
            kind: ExperimentKind::KFold { k: 1 },
            seed: 0,
            positive_class: Label::Instrumental,
        }
        .validate()
        .is_err());
        assert!(ExperimentPlan {
            kind: ExperimentKind::CrossDbFull,
            seed: 0,
            positive_class: Label::Instrumental,
        }
        .validate()
        .is_ok());
    }
}
