//! The experiment engine: loads per-track material, trains the requested
//! classifier on the plan's train side only, evaluates on the test side,
//! and aggregates per-run reports. Train/test disjointness is enforced by
//! ISRC before any training happens.

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sic_core::aggregate::build_track_vector;
use sic_core::baselines::ga::{mean_mfcc, predict_ga, train_ga, RansacModel};
use sic_core::baselines::vqmm::{predict_vqmm, train_vqmm, VqmmModel};
use sic_core::baselines::{predict_all, predict_rca};
use sic_core::frame_model::{
    align_labels, predict_frame_probabilities, train_frame_classifier, ProbabilityVector,
};
use sic_core::metrics::{compute_metrics, roc_curve, RocCurve};
use sic_core::plan::{cross_db_balanced_samples, stratified_kfold, ExperimentKind, ExperimentPlan};
use sic_core::track_model::{predict_track, train_adaboost};
use sic_core::{
    AdaBoostModel, EvalReport, FeatureMatrix, Label, Matrix, RandomForestModel,
    TrackPrediction, VocalActivityAnnotation,
};

use crate::config::RunConfig;
use crate::corpus::{load_annotation, CorpusManifest, Split, TrackRecord};
use crate::error::{Error, Result};
use crate::features::{features_for, FrontEnd};

/// Which classifier an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Proposed,
    Ga,
    Vqmm,
    Rca,
    AllSong,
    AllInstrumental,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Proposed => "proposed",
            ModelKind::Ga => "ga",
            ModelKind::Vqmm => "vqmm",
            ModelKind::Rca => "rca",
            ModelKind::AllSong => "all-song",
            ModelKind::AllInstrumental => "all-instrumental",
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<ModelKind, String> {
        match s.to_ascii_lowercase().as_str() {
            "proposed" => Ok(ModelKind::Proposed),
            "ga" => Ok(ModelKind::Ga),
            "vqmm" => Ok(ModelKind::Vqmm),
            "rca" => Ok(ModelKind::Rca),
            "all-song" | "allsong" => Ok(ModelKind::AllSong),
            "all-instrumental" | "allinstrumental" => Ok(ModelKind::AllInstrumental),
            other => Err(format!(
                "unknown model {other:?} (expected proposed, ga, vqmm, rca, all-song, \
                 or all-instrumental)"
            )),
        }
    }
}

/// A track with everything an experiment needs in memory.
#[derive(Debug, Clone)]
pub struct TrackData {
    pub record: TrackRecord,
    pub features: FeatureMatrix,
    pub annotation: Option<VocalActivityAnnotation>,
}

impl TrackData {
    pub fn label(&self) -> Label {
        self.record.label
    }

    /// The 13 MFCC columns (the slice both baselines consume).
    pub fn mfcc_matrix(&self) -> Matrix {
        let m = self.features.matrix();
        let mut values = Vec::with_capacity(m.n_rows() * 13);
        for r in 0..m.n_rows() {
            values.extend_from_slice(&m.row(r)[..13]);
        }
        Matrix::from_rows(values, 13)
    }
}

/// Decode, extract (or reuse cache), and parse annotations for every record,
/// in parallel across tracks.
pub fn prepare_tracks(
    manifest: &CorpusManifest,
    cache_dir: &Path,
    front_end: &FrontEnd,
) -> Result<Vec<TrackData>> {
    manifest
        .records
        .par_iter()
        .map(|record| {
            let features = features_for(manifest, record, cache_dir, front_end)?;
            let annotation = manifest
                .annotation_path(record)
                .map(|p| load_annotation(&p))
                .transpose()?;
            Ok(TrackData {
                record: record.clone(),
                features,
                annotation,
            })
        })
        .collect()
}

/// The two-stage pipeline bundled for prediction.
pub struct ProposedModel {
    pub frame: RandomForestModel,
    pub track: AdaBoostModel,
}

/// The stacked frame-training material for a train set: every usable track
/// (annotated Songs plus Instrumentals, which contribute all-false frames)
/// with its row range in the stack. Songs without annotations cannot supply
/// frame truth and stay out of this stage.
struct FrameTrainingSet {
    stacked: Matrix,
    labels: Vec<bool>,
    /// Per input track: its row range in `stacked`, or `None` when the
    /// track is not part of frame training.
    ranges: Vec<Option<std::ops::Range<usize>>>,
}

fn frame_training_set(train: &[TrackData]) -> Result<FrameTrainingSet> {
    let mut ranges = Vec::with_capacity(train.len());
    let mut matrices = Vec::new();
    let mut labels = Vec::new();
    let mut cursor = 0usize;
    for t in train {
        if t.label() == Label::Instrumental || t.annotation.is_some() {
            let rows = t.features.n_frames();
            ranges.push(Some(cursor..cursor + rows));
            cursor += rows;
            matrices.push(t.features.matrix());
            labels.extend(align_labels(
                t.annotation.as_ref(),
                t.features.frame_times_s(),
                t.label(),
            ));
        } else {
            ranges.push(None);
        }
    }
    if matrices.is_empty() {
        return Err(Error::MissingArtifact(
            "no train tracks usable for frame training (need annotated Songs or Instrumentals)"
                .into(),
        ));
    }
    Ok(FrameTrainingSet {
        stacked: Matrix::vstack(&matrices),
        labels,
        ranges,
    })
}

/// Train the frame classifier over every usable train track.
pub fn train_frame_stage(train: &[TrackData], cfg: &RunConfig) -> Result<RandomForestModel> {
    let set = frame_training_set(train)?;
    Ok(train_frame_classifier(
        &set.stacked,
        &set.labels,
        &cfg.rf_resolved(),
    )?)
}

/// Track descriptors for unseen tracks under a trained frame model.
pub fn track_vectors(
    frame_model: &RandomForestModel,
    tracks: &[TrackData],
    cfg: &RunConfig,
) -> Result<Vec<Vec<f64>>> {
    tracks
        .par_iter()
        .map(|t| {
            let probs = predict_frame_probabilities(frame_model, t.features.matrix())?;
            let vector = build_track_vector(&probs, &t.features, cfg.runs_threshold)?;
            Ok(vector.to_vec())
        })
        .collect()
}

/// How many track-level folds cross-fitting uses when the train set allows
/// it.
const CROSS_FIT_FOLDS: usize = 10;

/// Track descriptors for the frame model's own training tracks, produced by
/// track-level cross-fitting.
///
/// Scoring a track with a forest whose training stack contained any of that
/// track's frames leaks: sibling frames of the same track are nearly
/// identical, so the probabilities come out memorized and systematically
/// more extreme than anything the model emits on unseen audio, and a second
/// stage trained on them learns thresholds that do not transfer. Instead the
/// train tracks are split into stratified folds and each fold is scored by
/// a forest fit on the remaining folds only. The fold count shrinks to the
/// minority class size when the train set is tiny, and a train set too small
/// to split at all falls back to plain predictions.
fn train_side_track_vectors(
    frame_model: &RandomForestModel,
    train: &[TrackData],
    cfg: &RunConfig,
) -> Result<Vec<Vec<f64>>> {
    let labels: Vec<Label> = train.iter().map(TrackData::label).collect();
    let minority = labels
        .iter()
        .filter(|&&l| l == Label::Instrumental)
        .count()
        .min(labels.iter().filter(|&&l| l == Label::Song).count());
    let k = CROSS_FIT_FOLDS.min(minority);
    if k < 2 {
        return track_vectors(frame_model, train, cfg);
    }

    let fold_seed = sic_core::rng::derive_seed(cfg.seed, "track-model/cross-fit");
    let folds = stratified_kfold(&labels, k, fold_seed)?;
    let mut probs: Vec<Option<ProbabilityVector>> = vec![None; train.len()];
    for fold in &folds {
        let held_out: std::collections::HashSet<usize> = fold.iter().copied().collect();
        let rest: Vec<TrackData> = (0..train.len())
            .filter(|i| !held_out.contains(i))
            .map(|i| train[i].clone())
            .collect();
        let fold_model = train_frame_stage(&rest, cfg)?;
        for &i in fold {
            probs[i] = Some(predict_frame_probabilities(
                &fold_model,
                train[i].features.matrix(),
            )?);
        }
    }

    train
        .iter()
        .zip(probs)
        .map(|(t, p)| {
            let p = p.expect("folds partition the train set");
            let vector = build_track_vector(&p, &t.features, cfg.runs_threshold)?;
            Ok(vector.to_vec())
        })
        .collect()
}

/// Cross-fitted train-side vectors, exposed for diagnostics.
#[doc(hidden)]
pub fn debug_train_side_vectors(
    frame_model: &RandomForestModel,
    train: &[TrackData],
    cfg: &RunConfig,
) -> Result<Vec<Vec<f64>>> {
    train_side_track_vectors(frame_model, train, cfg)
}

/// Train the boosted track classifier on top of a frame model.
pub fn train_track_stage(
    frame_model: &RandomForestModel,
    train: &[TrackData],
    cfg: &RunConfig,
) -> Result<AdaBoostModel> {
    let vectors = train_side_track_vectors(frame_model, train, cfg)?;
    let labels: Vec<Label> = train.iter().map(TrackData::label).collect();
    Ok(train_adaboost(&vectors, &labels, &cfg.boost_resolved())?)
}

pub fn train_proposed(train: &[TrackData], cfg: &RunConfig) -> Result<ProposedModel> {
    let frame = train_frame_stage(train, cfg)?;
    let track = train_track_stage(&frame, train, cfg)?;
    Ok(ProposedModel { frame, track })
}

pub fn predict_proposed(
    model: &ProposedModel,
    tracks: &[TrackData],
    cfg: &RunConfig,
) -> Result<Vec<TrackPrediction>> {
    let vectors = track_vectors(&model.frame, tracks, cfg)?;
    tracks
        .iter()
        .zip(&vectors)
        .map(|(t, v)| Ok(predict_track(&model.track, t.record.isrc.clone(), v)?))
        .collect()
}

pub fn train_ga_baseline(train: &[TrackData], cfg: &RunConfig) -> Result<RansacModel> {
    let features: Vec<Vec<f64>> = train.iter().map(|t| mean_mfcc(&t.mfcc_matrix())).collect();
    let labels: Vec<Label> = train.iter().map(TrackData::label).collect();
    Ok(train_ga(&features, &labels, &cfg.ga_resolved())?)
}

pub fn train_vqmm_baseline(train: &[TrackData], cfg: &RunConfig) -> Result<VqmmModel> {
    let tracks: Vec<(Matrix, Label)> = train
        .iter()
        .map(|t| (t.mfcc_matrix(), t.label()))
        .collect();
    Ok(train_vqmm(&tracks, &cfg.vqmm_resolved())?)
}

/// One evaluated split: the report plus the raw predictions behind it.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: EvalReport,
    pub predictions: Vec<TrackPrediction>,
}

/// Train `model` on `train`, predict `test`, and score. Fails fast if any
/// ISRC appears on both sides.
pub fn evaluate_split(
    train: &[TrackData],
    test: &[TrackData],
    model: ModelKind,
    cfg: &RunConfig,
    positive_class: Label,
    run_seed: u64,
) -> Result<RunOutcome> {
    check_leakage(train, test)?;
    let isrcs: Vec<_> = test.iter().map(|t| t.record.isrc.clone()).collect();
    let predictions = match model {
        ModelKind::Proposed => {
            let trained = train_proposed(train, cfg)?;
            predict_proposed(&trained, test, cfg)?
        }
        ModelKind::Ga => {
            let trained = train_ga_baseline(train, cfg)?;
            let features: Vec<Vec<f64>> =
                test.iter().map(|t| mean_mfcc(&t.mfcc_matrix())).collect();
            predict_ga(&trained, &isrcs, &features)?
        }
        ModelKind::Vqmm => {
            let trained = train_vqmm_baseline(train, cfg)?;
            let mats: Vec<Matrix> = test.iter().map(TrackData::mfcc_matrix).collect();
            predict_vqmm(&trained, &isrcs, &mats)?
        }
        ModelKind::Rca => predict_rca(&isrcs, run_seed),
        ModelKind::AllSong => predict_all(Label::Song, &isrcs),
        ModelKind::AllInstrumental => predict_all(Label::Instrumental, &isrcs),
    };

    let truth: Vec<Label> = test.iter().map(TrackData::label).collect();
    let predicted: Vec<Label> = predictions.iter().map(|p| p.predicted_label).collect();
    let report = compute_metrics(&truth, &predicted, positive_class)?;
    Ok(RunOutcome {
        report,
        predictions,
    })
}

fn check_leakage(train: &[TrackData], test: &[TrackData]) -> Result<()> {
    let train_ids: std::collections::HashSet<_> =
        train.iter().map(|t| t.record.isrc.as_str()).collect();
    for t in test {
        if train_ids.contains(t.record.isrc.as_str()) {
            return Err(sic_core::Error::Leakage(t.record.isrc.to_string()).into());
        }
    }
    Ok(())
}

/// Mean and standard deviation of one metric across runs (sample std; zero
/// for a single run).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
}

fn summarize(values: &[f64]) -> MetricSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    MetricSummary { mean, std }
}

/// Per-class and global metric summaries across an experiment's runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// Indexed Song = 0, Instrumental = 1; tuples of
    /// (precision, recall, f_score) summaries.
    pub per_class: [(MetricSummary, MetricSummary, MetricSummary); 2],
    pub accuracy: MetricSummary,
    pub global_f_score: MetricSummary,
}

pub fn aggregate_reports(reports: &[EvalReport]) -> Aggregate {
    let collect = |f: &dyn Fn(&EvalReport) -> f64| -> Vec<f64> { reports.iter().map(f).collect() };
    let class_summary = |c: usize| {
        (
            summarize(&collect(&|r| r.per_class[c].precision)),
            summarize(&collect(&|r| r.per_class[c].recall)),
            summarize(&collect(&|r| r.per_class[c].f_score)),
        )
    };
    Aggregate {
        per_class: [class_summary(0), class_summary(1)],
        accuracy: summarize(&collect(&|r| r.accuracy)),
        global_f_score: summarize(&collect(&|r| r.global_f_score)),
    }
}

/// A full experiment: per-run outcomes, the aggregate, and the ROC of the
/// final run (drawn from prediction margins toward the positive class).
pub struct ExperimentOutcome {
    pub kind: ExperimentKind,
    pub model: ModelKind,
    pub reports: Vec<EvalReport>,
    pub aggregate: Aggregate,
    pub roc: Option<RocCurve>,
}

/// Execute a plan over prepared tracks.
///
/// K-fold treats the whole manifest as one corpus; the cross-database kinds
/// train on the `train` split and evaluate against the `test` split (full,
/// or repeated balanced samples of it).
pub fn run_experiment(
    plan: &ExperimentPlan,
    model: ModelKind,
    tracks: &[TrackData],
    cfg: &RunConfig,
) -> Result<ExperimentOutcome> {
    plan.validate()?;
    let mut reports = Vec::new();
    let mut last_predictions: Option<(Vec<TrackPrediction>, Vec<Label>)> = None;

    match plan.kind {
        ExperimentKind::KFold { k } => {
            let labels: Vec<Label> = tracks.iter().map(TrackData::label).collect();
            let folds = stratified_kfold(&labels, k, plan.seed)?;
            for (i, fold) in folds.iter().enumerate() {
                let in_fold: std::collections::HashSet<usize> = fold.iter().copied().collect();
                let test: Vec<TrackData> = fold.iter().map(|&i| tracks[i].clone()).collect();
                let train: Vec<TrackData> = (0..tracks.len())
                    .filter(|i| !in_fold.contains(i))
                    .map(|i| tracks[i].clone())
                    .collect();
                let run_seed = sic_core::rng::derive_seed(plan.seed, &format!("run/{i}"));
                let outcome =
                    evaluate_split(&train, &test, model, cfg, plan.positive_class, run_seed)?;
                let truth = test.iter().map(TrackData::label).collect();
                last_predictions = Some((outcome.predictions, truth));
                reports.push(outcome.report);
            }
        }
        ExperimentKind::CrossDbBalanced { repetitions } => {
            let train: Vec<TrackData> = tracks
                .iter()
                .filter(|t| t.record.split == Split::Train)
                .cloned()
                .collect();
            let pool: Vec<TrackData> = tracks
                .iter()
                .filter(|t| t.record.split == Split::Test)
                .cloned()
                .collect();
            let pool_labels: Vec<Label> = pool.iter().map(TrackData::label).collect();
            let samples = cross_db_balanced_samples(&pool_labels, repetitions, plan.seed)?;
            for (i, sample) in samples.iter().enumerate() {
                let test: Vec<TrackData> = sample.iter().map(|&i| pool[i].clone()).collect();
                let run_seed = sic_core::rng::derive_seed(plan.seed, &format!("run/{i}"));
                let outcome =
                    evaluate_split(&train, &test, model, cfg, plan.positive_class, run_seed)?;
                let truth = test.iter().map(TrackData::label).collect();
                last_predictions = Some((outcome.predictions, truth));
                reports.push(outcome.report);
            }
        }
        ExperimentKind::CrossDbFull => {
            let train: Vec<TrackData> = tracks
                .iter()
                .filter(|t| t.record.split == Split::Train)
                .cloned()
                .collect();
            let test: Vec<TrackData> = tracks
                .iter()
                .filter(|t| t.record.split == Split::Test)
                .cloned()
                .collect();
            if test.is_empty() {
                return Err(Error::Config(
                    "cross-db experiments need records with split = test".into(),
                ));
            }
            let run_seed = sic_core::rng::derive_seed(plan.seed, "run/0");
            let outcome =
                evaluate_split(&train, &test, model, cfg, plan.positive_class, run_seed)?;
            let truth = test.iter().map(TrackData::label).collect();
            last_predictions = Some((outcome.predictions, truth));
            reports.push(outcome.report);
        }
    }

    // margins toward the positive class make a score for ROC analysis; a
    // degenerate single-class run simply has no curve
    let roc = last_predictions.and_then(|(predictions, truth)| {
        let scores: Vec<f64> = predictions
            .iter()
            .map(|p| p.margin_toward(plan.positive_class))
            .collect();
        roc_curve(&scores, &truth, plan.positive_class).ok()
    });

    let aggregate = aggregate_reports(&reports);
    Ok(ExperimentOutcome {
        kind: plan.kind,
        model,
        reports,
        aggregate,
        roc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_synthetic_corpus, SynthConfig};
    use sic_core::plan::ExperimentKind;
    use tempfile::tempdir;

    fn small_corpus(seed: u64) -> (tempfile::TempDir, Vec<TrackData>, RunConfig) {
        let dir = tempdir().unwrap();
        let synth = SynthConfig {
            n_songs: 6,
            n_instrumentals: 6,
            n_test_songs: 6,
            n_test_instrumentals: 3,
            duration_s: 5.0,
            seed,
            ..SynthConfig::default()
        };
        let manifest = generate_synthetic_corpus(&synth, dir.path()).unwrap();
        let mut cfg = RunConfig::default();
        cfg.seed = seed;
        cfg.rf.n_trees = 10;
        cfg.rf.max_depth = 6;
        cfg.boost.n_rounds = 20;
        cfg.vqmm.k = 16;
        cfg.vqmm.kmeans_iters = 10;
        cfg.cache_dir = dir.path().join("cache");
        let tracks = prepare_tracks(&manifest, &cfg.cache_dir, &FrontEnd::of(&cfg)).unwrap();
        (dir, tracks, cfg)
    }

    #[test]
    fn leakage_is_detected() {
        let (_dir, tracks, cfg) = small_corpus(11);
        let err = evaluate_split(
            &tracks[..4],
            &tracks[2..6],
            ModelKind::AllSong,
            &cfg,
            Label::Instrumental,
            0,
        )
        .unwrap_err();
        assert!(err.to_string().contains("leakage"), "{err}");
    }

    #[test]
    fn kfold_all_song_reports_are_identical_per_fold_composition() {
        let (_dir, tracks, cfg) = small_corpus(12);
        // only train-split records so classes are balanced 6/6
        let train_only: Vec<TrackData> = tracks
            .iter()
            .filter(|t| t.record.split == Split::Train)
            .cloned()
            .collect();
        let plan = ExperimentPlan {
            kind: ExperimentKind::KFold { k: 3 },
            seed: 5,
            positive_class: Label::Song,
        };
        let outcome = run_experiment(&plan, ModelKind::AllSong, &train_only, &cfg).unwrap();
        assert_eq!(outcome.reports.len(), 3);
        for report in &outcome.reports {
            // stratified folds of a balanced corpus keep prevalence 0.5
            let m = report.class_metrics(Label::Song);
            assert_eq!(m.recall, 1.0);
            assert!((m.precision - 0.5).abs() < 1e-12);
        }
        assert_eq!(outcome.aggregate.accuracy.std, 0.0);
    }

    #[test]
    fn rca_is_roughly_half_right_on_unbalanced_test() {
        let (_dir, tracks, cfg) = small_corpus(13);
        let plan = ExperimentPlan {
            kind: ExperimentKind::CrossDbFull,
            seed: 3,
            positive_class: Label::Instrumental,
        };
        let outcome = run_experiment(&plan, ModelKind::Rca, &tracks, &cfg).unwrap();
        assert_eq!(outcome.reports.len(), 1);
        let r = &outcome.reports[0];
        // 9 test tracks, exactly 5 predicted Song
        let predicted_song = r.confusion[0][0] + r.confusion[1][0];
        assert_eq!(predicted_song, 5);
    }

    #[test]
    fn balanced_repetitions_have_even_class_composition() {
        let (_dir, tracks, cfg) = small_corpus(14);
        let plan = ExperimentPlan {
            kind: ExperimentKind::CrossDbBalanced { repetitions: 2 },
            seed: 9,
            positive_class: Label::Instrumental,
        };
        let outcome =
            run_experiment(&plan, ModelKind::AllInstrumental, &tracks, &cfg).unwrap();
        assert_eq!(outcome.reports.len(), 2);
        for r in &outcome.reports {
            assert_eq!(r.n_tracks, 6);
            let m = r.class_metrics(Label::Instrumental);
            assert_eq!(m.recall, 1.0);
            assert!((m.precision - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn proposed_pipeline_runs_end_to_end_on_a_tiny_corpus() {
        let (_dir, tracks, cfg) = small_corpus(15);
        let plan = ExperimentPlan {
            kind: ExperimentKind::CrossDbFull,
            seed: 1,
            positive_class: Label::Instrumental,
        };
        let outcome = run_experiment(&plan, ModelKind::Proposed, &tracks, &cfg).unwrap();
        let r = &outcome.reports[0];
        assert_eq!(r.n_tracks, 9);
        // the tiny corpus is easy: expect far better than chance
        assert!(r.accuracy >= 0.7, "accuracy {}", r.accuracy);
        assert!(outcome.roc.is_some());
    }
}
