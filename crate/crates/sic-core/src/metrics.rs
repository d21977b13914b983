//! Classification metrics and ROC analysis.

use alloc::vec::Vec;

// Float supplies the f64 math methods in no_std builds; whenever std is
// elsewhere in the crate graph the inherent methods shadow it, so the
// import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Label;

/// Precision, recall, and f-score for one class. Zero-denominator cases are
/// defined as 0 so degenerate predictors remain comparable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

/// Confusion matrix and derived metrics for one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// `confusion[true][predicted]`, indexed Song = 0, Instrumental = 1.
    pub confusion: [[usize; 2]; 2],
    /// Per-class metrics indexed like the confusion matrix.
    pub per_class: [ClassMetrics; 2],
    pub accuracy: f64,
    /// Support-weighted mean of the per-class f-scores.
    pub global_f_score: f64,
    /// Which class the experiment treats as the retrieval target.
    pub positive_class: Label,
    pub n_tracks: usize,
}

impl EvalReport {
    pub fn class_metrics(&self, label: Label) -> &ClassMetrics {
        &self.per_class[label.index()]
    }

    /// Count of true tracks of `label`.
    pub fn support(&self, label: Label) -> usize {
        self.confusion[label.index()][0] + self.confusion[label.index()][1]
    }
}

/// Round to three decimals, the precision used in rendered tables.
pub fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Compute the confusion matrix and every derived metric.
pub fn compute_metrics(
    truth: &[Label],
    predicted: &[Label],
    positive_class: Label,
) -> Result<EvalReport> {
    if truth.is_empty() {
        return Err(Error::EmptyInput("evaluation labels"));
    }
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            context: "truth vs predictions",
            left: truth.len(),
            right: predicted.len(),
        });
    }

    let mut confusion = [[0usize; 2]; 2];
    for (&t, &p) in truth.iter().zip(predicted) {
        confusion[t.index()][p.index()] += 1;
    }

    let metrics_for = |c: usize| {
        let tp = confusion[c][c];
        let fp = confusion[1 - c][c];
        let fn_ = confusion[c][1 - c];
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f_score = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ClassMetrics {
            precision,
            recall,
            f_score,
        }
    };
    let per_class = [metrics_for(0), metrics_for(1)];

    let n = truth.len();
    let accuracy = (confusion[0][0] + confusion[1][1]) as f64 / n as f64;
    let support = [
        confusion[0][0] + confusion[0][1],
        confusion[1][0] + confusion[1][1],
    ];
    let global_f_score = (support[0] as f64 * per_class[0].f_score
        + support[1] as f64 * per_class[1].f_score)
        / n as f64;

    Ok(EvalReport {
        confusion,
        per_class,
        accuracy,
        global_f_score,
        positive_class,
        n_tracks: n,
    })
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// A receiver operating characteristic curve with its trapezoidal AUC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(false positive rate, true positive rate)` sorted by FPR, starting
    /// at (0, 0) and ending at (1, 1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Sweep a decision threshold down over the distinct score values, grouping
/// ties, scoring toward `positive_class`.
pub fn roc_curve(scores: &[f64], truth: &[Label], positive_class: Label) -> Result<RocCurve> {
    if scores.len() != truth.len() {
        return Err(Error::LengthMismatch {
            context: "scores vs truth",
            left: scores.len(),
            right: truth.len(),
        });
    }
    let n_pos = truth.iter().filter(|&&l| l == positive_class).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 {
        return Err(Error::SingleClass("negative"));
    }
    if n_neg == 0 {
        return Err(Error::SingleClass("positive"));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = Vec::new();
    points.push((0.0, 0.0));
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if truth[order[i]] == positive_class {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
    }
    debug_assert_eq!(*points.last().unwrap(), (1.0, 1.0));

    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mixed(n_song: usize, n_instr: usize) -> Vec<Label> {
        let mut v = vec![Label::Song; n_song];
        v.extend(vec![Label::Instrumental; n_instr]);
        v
    }

    #[test]
    fn all_song_on_889_prevalence() {
        // prevalence 0.889: a constant Song predictor scores precision
        // 0.889, recall 1.000, f-score 0.941 on the Song side
        let truth = mixed(889, 111);
        let predicted = vec![Label::Song; 1000];
        let report = compute_metrics(&truth, &predicted, Label::Song).unwrap();
        let m = report.class_metrics(Label::Song);
        assert_eq!(round3(m.precision), 0.889);
        assert_eq!(round3(m.recall), 1.000);
        assert_eq!(round3(m.f_score), 0.941);
        assert_eq!(round3(report.accuracy), 0.889);
    }

    #[test]
    fn all_instrumental_on_110_prevalence() {
        let truth = mixed(890, 110);
        let predicted = vec![Label::Instrumental; 1000];
        let report = compute_metrics(&truth, &predicted, Label::Instrumental).unwrap();
        let m = report.class_metrics(Label::Instrumental);
        assert_eq!(round3(m.precision), 0.110);
        assert_eq!(round3(m.recall), 1.000);
        assert_eq!(round3(m.f_score), 0.198);
    }

    #[test]
    fn half_split_predictor_arithmetic() {
        // 2000 tracks at prevalence 0.889, an exact half split predicted
        // Song: Song precision 889/1000, recall 0.5, f 0.640
        let mut truth = Vec::new();
        let mut predicted = Vec::new();
        // 889 songs predicted Song, 889 predicted Instrumental
        for _ in 0..889 {
            truth.push(Label::Song);
            predicted.push(Label::Song);
            truth.push(Label::Song);
            predicted.push(Label::Instrumental);
        }
        // 111 instrumentals each way
        for _ in 0..111 {
            truth.push(Label::Instrumental);
            predicted.push(Label::Song);
            truth.push(Label::Instrumental);
            predicted.push(Label::Instrumental);
        }
        let report = compute_metrics(&truth, &predicted, Label::Song).unwrap();
        let m = report.class_metrics(Label::Song);
        assert_eq!(round3(m.precision), 0.889);
        assert_eq!(round3(m.recall), 0.500);
        assert_eq!(round3(m.f_score), 0.640);
        assert_eq!(round3(report.accuracy), 0.500);
    }

    #[test]
    fn zero_denominators_define_zero_metrics() {
        // nothing predicted Instrumental and nothing truly Instrumental
        // on the Song side of a perfect constant predictor
        let truth = mixed(5, 0);
        let predicted = vec![Label::Song; 5];
        let report = compute_metrics(&truth, &predicted, Label::Instrumental).unwrap();
        let m = report.class_metrics(Label::Instrumental);
        assert_eq!((m.precision, m.recall, m.f_score), (0.0, 0.0, 0.0));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let err = compute_metrics(&mixed(2, 1), &mixed(2, 0), Label::Song).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
        assert!(compute_metrics(&[], &[], Label::Song).is_err());
    }

    #[test]
    fn perfect_separation_gives_auc_one() {
        let truth = mixed(3, 3);
        // instrumentals all score above songs
        let scores = vec![0.1, 0.2, 0.3, 0.7, 0.8, 0.9];
        let roc = roc_curve(&scores, &truth, Label::Instrumental).unwrap();
        assert_eq!(roc.auc, 1.0);
        assert_eq!(*roc.points.first().unwrap(), (0.0, 0.0));
        assert_eq!(*roc.points.last().unwrap(), (1.0, 1.0));
    }

    #[test]
    fn constant_scores_give_two_point_curve() {
        let truth = mixed(4, 4);
        let scores = vec![0.5; 8];
        let roc = roc_curve(&scores, &truth, Label::Instrumental).unwrap();
        assert_eq!(roc.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(roc.auc, 0.5);
    }

    #[test]
    fn random_scores_hover_at_half_auc() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let truth: Vec<Label> = (0..1000)
            .map(|i| if i % 2 == 0 { Label::Song } else { Label::Instrumental })
            .collect();
        let scores: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
        let roc = roc_curve(&scores, &truth, Label::Instrumental).unwrap();
        assert!((roc.auc - 0.5).abs() <= 0.05, "auc = {}", roc.auc);
    }

    #[test]
    fn single_class_truth_is_rejected() {
        let err = roc_curve(&[0.1, 0.2], &mixed(2, 0), Label::Instrumental).unwrap_err();
        assert!(matches!(err, Error::SingleClass(_)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn metric_identities_hold(
            pairs in proptest::collection::vec((0u8..2, 0u8..2), 1..200),
        ) {
            let to_label = |b: u8| if b == 0 { Label::Song } else { Label::Instrumental };
            let truth: Vec<Label> = pairs.iter().map(|&(t, _)| to_label(t)).collect();
            let predicted: Vec<Label> = pairs.iter().map(|&(_, p)| to_label(p)).collect();
            let r = compute_metrics(&truth, &predicted, Label::Instrumental).unwrap();

            // accuracy re-derivable from the confusion matrix
            let n: usize = r.confusion.iter().flatten().sum();
            prop_assert_eq!(n, r.n_tracks);
            let acc = (r.confusion[0][0] + r.confusion[1][1]) as f64 / n as f64;
            prop_assert!((acc - r.accuracy).abs() < 1e-15);

            // f is exactly the harmonic mean of its own P and R
            for m in &r.per_class {
                let expected = if m.precision + m.recall > 0.0 {
                    2.0 * m.precision * m.recall / (m.precision + m.recall)
                } else {
                    0.0
                };
                prop_assert_eq!(m.f_score, expected);
                prop_assert!((0.0..=1.0).contains(&m.precision));
                prop_assert!((0.0..=1.0).contains(&m.recall));
            }
        }

        #[test]
        fn roc_is_monotone_with_bounded_auc(
            entries in proptest::collection::vec((0.0f64..1.0, 0u8..2), 4..300),
        ) {
            let truth: Vec<Label> = entries
                .iter()
                .map(|&(_, t)| if t == 0 { Label::Song } else { Label::Instrumental })
                .collect();
            let scores: Vec<f64> = entries.iter().map(|&(s, _)| s).collect();
            prop_assume!(truth.iter().any(|&l| l == Label::Song));
            prop_assume!(truth.iter().any(|&l| l == Label::Instrumental));
            let roc = roc_curve(&scores, &truth, Label::Instrumental).unwrap();
            for w in roc.points.windows(2) {
                prop_assert!(w[1].0 >= w[0].0);
                prop_assert!(w[1].1 >= w[0].1);
            }
            prop_assert!((0.0..=1.0).contains(&roc.auc));
        }
    }
}
