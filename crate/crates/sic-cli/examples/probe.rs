// scratch probe, not part of the deliverable
use std::time::Instant;

use sic_cli::config::RunConfig;
use sic_cli::corpus::Split;
use sic_cli::experiment::*;
use sic_cli::features::FrontEnd;
use sic_cli::synth::{generate_synthetic_corpus, SynthConfig};
use sic_core::frame_model::predict_frame_probabilities;
use sic_core::plan::{ExperimentKind, ExperimentPlan};
use sic_core::Label;

fn main() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let synth = SynthConfig {
        n_songs: 30, n_instrumentals: 30, n_test_songs: 216, n_test_instrumentals: 24,
        duration_s: 8.0, seed: 42, ..SynthConfig::default()
    };
    let manifest = generate_synthetic_corpus(&synth, dir.path()).unwrap();
    let mut cfg = RunConfig::default();
    cfg.seed = 42;
    cfg.cache_dir = dir.path().join("cache");
    let tracks = prepare_tracks(&manifest, &cfg.cache_dir, &FrontEnd::of(&cfg)).unwrap();
    let train: Vec<TrackData> = tracks.iter().filter(|t| t.record.split == Split::Train).cloned().collect();
    let test: Vec<TrackData> = tracks.iter().filter(|t| t.record.split == Split::Test).cloned().collect();

    let frame = train_frame_stage(&train, &cfg).unwrap();
    let summarize = |set: &[TrackData], name: &str| {
        let mut by_label: [Vec<f64>; 2] = [vec![], vec![]];
        for t in set {
            let p = predict_frame_probabilities(&frame, t.features.matrix()).unwrap();
            let frac = p.values().iter().filter(|&&x| x >= 0.5).count() as f64 / p.len() as f64;
            by_label[t.label().index()].push(frac);
        }
        for (i, lab) in ["song", "instr"].iter().enumerate() {
            let v = &by_label[i];
            if v.is_empty() { continue; }
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let mn = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let mx = v.iter().cloned().fold(0.0f64, f64::max);
            println!("{name} {lab}: voiced_frac mean={mean:.3} min={mn:.3} max={mx:.3} n={}", v.len());
        }
    };
    summarize(&train, "train");
    summarize(&test, "test");

    let plan = ExperimentPlan { kind: ExperimentKind::CrossDbFull, seed: 42, positive_class: Label::Instrumental };
    for model in [ModelKind::Proposed, ModelKind::Ga, ModelKind::Vqmm, ModelKind::Rca] {
        let t = Instant::now();
        let outcome = run_experiment(&plan, model, &tracks, &cfg).unwrap();
        let r = &outcome.reports[0];
        let m = r.class_metrics(Label::Instrumental);
        println!(
            "{:<10} instr P={:.3} R={:.3} F={:.3} acc={:.3}  confusion={:?}  ({:?})",
            model.as_str(), m.precision, m.recall, m.f_score, r.accuracy, r.confusion, t.elapsed()
        );
    }
    println!("total: {:?}", t0.elapsed());
}
