// scratch probe, not part of the deliverable
use sic_cli::config::RunConfig;
use sic_cli::corpus::Split;
use sic_cli::experiment::*;
use sic_cli::features::FrontEnd;
use sic_cli::synth::{generate_synthetic_corpus, SynthConfig};
use sic_core::frame_model::predict_frame_probabilities;
use sic_core::Label;

fn main() {
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

    let model = train_proposed(&train, &cfg).unwrap();
    println!("rounds: {}", model.track.rounds().len());
    for (i, r) in model.track.rounds().iter().enumerate().take(4) {
        println!("round {i}: alpha={:.3} tree={:?}", r.alpha, r.tree);
    }
    let preds = predict_proposed(&model, &test, &cfg).unwrap();
    let mut fp = vec![];
    let mut fn_ = vec![];
    let mut song_margin_lo = vec![];
    for (p, t) in preds.iter().zip(&test) {
        let probs = predict_frame_probabilities(&model.frame, t.features.matrix()).unwrap();
        let frac = probs.values().iter().filter(|&&x| x >= 0.5).count() as f64 / probs.len() as f64;
        if t.label() == Label::Song {
            if p.predicted_label == Label::Instrumental { fp.push((frac, p.margin)); }
            else if p.margin > -2.0 { song_margin_lo.push((frac, p.margin)); }
        } else if p.predicted_label == Label::Song {
            fn_.push((frac, p.margin));
        }
    }
    let fmt = |v: &Vec<(f64,f64)>| v.iter().map(|&(f,m)| format!("({f:.2},{m:+.2})")).collect::<Vec<_>>().join(" ");
    fp.sort_by(|a,b| a.0.total_cmp(&b.0));
    println!("FP songs ({}): (voiced_frac, margin) {}", fp.len(), fmt(&fp));
    println!("near-boundary songs kept: {}", fmt(&song_margin_lo));
    println!("FN instrumentals ({}): {}", fn_.len(), fmt(&fn_));
}
