// scratch probe, not part of the deliverable
use sic_cli::config::RunConfig;
use sic_cli::corpus::Split;
use sic_cli::experiment::*;
use sic_cli::features::FrontEnd;
use sic_cli::synth::{generate_synthetic_corpus, SynthConfig};
use sic_core::track_model::{predict_track, train_adaboost};
use sic_core::{Isrc, Label};

fn main() {
    for seed in [42u64, 43, 44, 45, 46, 47, 48, 49] {
        let dir = tempfile::tempdir().unwrap();
        let synth = SynthConfig {
            n_songs: 30, n_instrumentals: 30, n_test_songs: 216, n_test_instrumentals: 24,
            duration_s: 8.0, seed, ..SynthConfig::default()
        };
        let manifest = generate_synthetic_corpus(&synth, dir.path()).unwrap();
        let mut cfg = RunConfig::default();
        cfg.seed = seed;
        cfg.cache_dir = dir.path().join("cache");
        let tracks = prepare_tracks(&manifest, &cfg.cache_dir, &FrontEnd::of(&cfg)).unwrap();
        let train: Vec<TrackData> = tracks.iter().filter(|t| t.record.split == Split::Train).cloned().collect();
        let test: Vec<TrackData> = tracks.iter().filter(|t| t.record.split == Split::Test).cloned().collect();

        let frame = train_frame_stage(&train, &cfg).unwrap();
        let train_vecs = debug_train_side_vectors(&frame, &train, &cfg).unwrap();
        let test_vecs = track_vectors(&frame, &test, &cfg).unwrap();
        let train_labels: Vec<Label> = train.iter().map(TrackData::label).collect();
        let truth: Vec<Label> = test.iter().map(TrackData::label).collect();

        for w_song in [1.0] {
            let mut boost_cfg = cfg.boost_resolved();
            boost_cfg.class_weights = (w_song, 1.0);
            let model = train_adaboost(&train_vecs, &train_labels, &boost_cfg).unwrap();
            let isrc = Isrc::new("ZZTST0000000").unwrap();
            let mut tp = 0; let mut fp = 0; let mut fn_ = 0;
            for (v, &t) in test_vecs.iter().zip(&truth) {
                let p = predict_track(&model, isrc.clone(), v).unwrap();
                match (p.predicted_label, t) {
                    (Label::Instrumental, Label::Instrumental) => tp += 1,
                    (Label::Instrumental, Label::Song) => fp += 1,
                    (Label::Song, Label::Instrumental) => fn_ += 1,
                    _ => {}
                }
            }
            let precision = tp as f64 / (tp + fp).max(1) as f64;
            let recall = tp as f64 / (tp + fn_).max(1) as f64;
            println!("seed {seed} w_song={w_song}: P={precision:.3} R={recall:.3} (tp={tp} fp={fp} fn={fn_}) rounds={}", model.rounds().len());
        }
    }
}
