// scratch probe, not part of the deliverable
use sic_cli::config::RunConfig;
use sic_cli::corpus::Split;
use sic_cli::experiment::*;
use sic_cli::features::FrontEnd;
use sic_cli::synth::{generate_synthetic_corpus, SynthConfig};
use sic_core::track_model::train_adaboost;
use sic_core::Label;

fn main() {
    let seed = 43u64;
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

    let model = train_adaboost(&train_vecs, &train_labels, &cfg.boost_resolved()).unwrap();
    println!("rounds {}", model.rounds().len());
    println!("tree0 {:?}", model.rounds()[0].tree);

    let stat = |vecs: &Vec<Vec<f64>>, labels: Vec<Label>, f: usize| {
        let mut s: Vec<f64> = vec![];
        let mut i: Vec<f64> = vec![];
        for (v, l) in vecs.iter().zip(&labels) {
            if *l == Label::Song { s.push(v[f]) } else { i.push(v[f]) }
        }
        let mm = |v: &Vec<f64>| (v.iter().cloned().fold(f64::INFINITY, f64::min),
                                 v.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        println!("  f{f}: song {:?} instr {:?}", mm(&s), mm(&i));
    };
    println!("TRAIN (cross-fitted):");
    for f in [0usize, 1, 9, 10, 39] { stat(&train_vecs, train_labels.clone(), f); }
    println!("TEST:");
    let test_labels: Vec<Label> = test.iter().map(TrackData::label).collect();
    for f in [0usize, 1, 9, 10, 39] { stat(&test_vecs, test_labels.clone(), f); }
}
