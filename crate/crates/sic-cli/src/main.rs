//! `sic`: batch classification of music tracks as Song or Instrumental.
//!
//! One binary drives the whole workflow: synthesize a corpus, extract
//! features, train the two-stage classifier and the baselines, predict,
//! run evaluation protocols, and emit tag playlists.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sic_cli::config::RunConfig;
use sic_cli::corpus::{load_manifest, Split};
use sic_cli::error::Error;
use sic_cli::experiment::{
    predict_proposed, prepare_tracks, run_experiment, train_frame_stage, train_ga_baseline,
    train_track_stage, train_vqmm_baseline, ModelKind, ProposedModel, TrackData,
};
use sic_cli::features::FrontEnd;
use sic_cli::formats::{
    parse_tag, read_predictions, write_experiment_outputs, write_playlist, write_predictions,
};
use sic_cli::model_store;
use sic_cli::synth::{generate_synthetic_corpus, SynthConfig};
use sic_core::plan::{ExperimentKind, ExperimentPlan};
use sic_core::playlist::{generate_playlist, DEFAULT_CAP};
use sic_core::Label;

#[derive(Parser)]
#[command(
    name = "sic",
    version,
    about = "Song/Instrumental classification: corpus synthesis, two-stage training, baselines, experiments, and playlist generation"
)]
struct Cli {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Root seed; every randomized stage derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_name = "FILE")]
    manifest: Option<PathBuf>,

    /// Feature cache directory (env SIC_CACHE_DIR overrides).
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,

    #[arg(long, global = true, value_name = "DIR")]
    model_dir: Option<PathBuf>,

    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Worker threads for per-track stages (0 = one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Extra `key=value` config overrides (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic corpus with annotations and a manifest.
    Synth {
        /// Output directory for audio/, ann/, and manifest.csv.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Train-split Songs.
        #[arg(long, default_value_t = 0)]
        songs: usize,
        /// Train-split Instrumentals.
        #[arg(long, default_value_t = 0)]
        instrumentals: usize,
        #[arg(long, default_value_t = 0)]
        test_songs: usize,
        #[arg(long, default_value_t = 0)]
        test_instrumentals: usize,
        #[arg(long, default_value_t = 8.0)]
        duration_s: f64,
        /// Vocal level scale; below 1.0 makes the task noisier.
        #[arg(long, default_value_t = 1.0)]
        voice_gain: f64,
    },
    /// Decode and cache features for every manifest track.
    Extract,
    /// Train the frame-level singing-voice model on the train split.
    TrainFrame {
        #[arg(long, value_name = "FILE")]
        model_out: Option<PathBuf>,
    },
    /// Train the boosted track classifier on top of a frame model.
    TrainTrack {
        #[arg(long, value_name = "FILE")]
        frame_model: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        model_out: Option<PathBuf>,
    },
    /// Train a reference baseline on the train split.
    TrainBaseline {
        /// `ga` or `vqmm`.
        name: String,
        #[arg(long, value_name = "FILE")]
        model_out: Option<PathBuf>,
    },
    /// Classify tracks with the trained two-stage pipeline.
    Predict {
        #[arg(long, value_name = "FILE")]
        frame_model: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        track_model: Option<PathBuf>,
        /// Which records to classify: train, test, or all.
        #[arg(long, default_value = "test")]
        split: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run an evaluation protocol and write report CSV/JSON (+ ROC points).
    Experiment {
        /// `kfold`, `cross-db-balanced`, or `cross-db-full`.
        kind: String,
        /// proposed, ga, vqmm, rca, all-song, or all-instrumental.
        #[arg(long)]
        model: ModelKind,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        repetitions: usize,
        /// Class whose retrieval the experiment targets.
        #[arg(long, default_value = "instrumental", value_parser = parse_tag)]
        positive_class: Label,
    },
    /// Build a precision-first tag playlist from predictions.
    Playlist {
        #[arg(long, value_name = "FILE")]
        predictions: Option<PathBuf>,
        #[arg(long, value_parser = parse_tag)]
        tag: Label,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Keep only predictions whose margin toward the tag strictly
        /// exceeds this.
        #[arg(long, default_value_t = 0.0)]
        min_margin: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // one line, machine-parsable
            eprintln!("error: {}", flatten(&err));
            ExitCode::FAILURE
        }
    }
}

fn flatten(err: &Error) -> String {
    let mut message = err.to_string();
    let mut source = std::error::Error::source(err);
    while let Some(cause) = source {
        message.push_str(&format!(": {cause}"));
        source = cause.source();
    }
    message.replace('\n', " ")
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for pair in &cli.set {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {pair:?}")))?;
        cfg.set(key.trim(), value.trim()).map_err(Error::Config)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(manifest) = &cli.manifest {
        cfg.manifest = manifest.clone();
    }
    if let Some(cache) = &cli.cache {
        cfg.cache_dir = cache.clone();
    }
    if let Some(dir) = &cli.model_dir {
        cfg.model_dir = dir.clone();
    }
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    cfg.apply_env();
    Ok(cfg)
}

fn load_tracks(cfg: &RunConfig, split: Option<Split>) -> Result<Vec<TrackData>, Error> {
    let manifest = load_manifest(&cfg.manifest)?;
    let tracks = prepare_tracks(&manifest, &cfg.cache_dir, &FrontEnd::of(cfg))?;
    Ok(match split {
        Some(split) => tracks
            .into_iter()
            .filter(|t| t.record.split == split)
            .collect(),
        None => tracks,
    })
}

/// A model trained under one front end must not consume features from
/// another.
fn ensure_front_end(current: &RunConfig, trained: &RunConfig, what: &str) -> Result<(), Error> {
    if FrontEnd::of(current) != FrontEnd::of(trained) {
        return Err(Error::Config(format!(
            "{what} was trained under a different front end \
             (config hash {} vs current {}); retrain it or align the config",
            trained.hash(),
            current.hash()
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = resolve_config(&cli)?;
    if cfg.jobs > 0 {
        // ignore failure: the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global();
    }

    match cli.command {
        Command::Synth {
            out,
            songs,
            instrumentals,
            test_songs,
            test_instrumentals,
            duration_s,
            voice_gain,
        } => {
            let synth = SynthConfig {
                n_songs: songs,
                n_instrumentals: instrumentals,
                n_test_songs: test_songs,
                n_test_instrumentals: test_instrumentals,
                duration_s,
                seed: cfg.seed,
                voice_gain,
                sample_rate_hz: cfg.sample_rate_hz,
            };
            let manifest = generate_synthetic_corpus(&synth, &out)?;
            println!(
                "wrote {} tracks to {} (manifest: {})",
                manifest.records.len(),
                out.display(),
                out.join("manifest.csv").display()
            );
        }

        Command::Extract => {
            let tracks = load_tracks(&cfg, None)?;
            println!(
                "extracted features for {} tracks into {}",
                tracks.len(),
                cfg.cache_dir.display()
            );
        }

        Command::TrainFrame { model_out } => {
            let train = load_tracks(&cfg, Some(Split::Train))?;
            let model = train_frame_stage(&train, &cfg)?;
            let path = model_out.unwrap_or_else(|| cfg.model_dir.join("frame_model.json"));
            model_store::save_frame_model(&model, &cfg, &path)?;
            println!(
                "trained frame model on {} tracks -> {}",
                train.len(),
                path.display()
            );
        }

        Command::TrainTrack {
            frame_model,
            model_out,
        } => {
            let frame_path =
                frame_model.unwrap_or_else(|| cfg.model_dir.join("frame_model.json"));
            let frame_doc = model_store::load_frame_model(&frame_path)?;
            ensure_front_end(&cfg, &frame_doc.run_config, "frame model")?;
            let train = load_tracks(&cfg, Some(Split::Train))?;
            let model = train_track_stage(&frame_doc.model, &train, &cfg)?;
            let path = model_out.unwrap_or_else(|| cfg.model_dir.join("track_model.json"));
            model_store::save_track_model(&model, &cfg, &path)?;
            println!(
                "trained track model on {} tracks -> {}",
                train.len(),
                path.display()
            );
        }

        Command::TrainBaseline { name, model_out } => {
            let train = load_tracks(&cfg, Some(Split::Train))?;
            match name.to_ascii_lowercase().as_str() {
                "ga" => {
                    let model = train_ga_baseline(&train, &cfg)?;
                    let path = model_out.unwrap_or_else(|| cfg.model_dir.join("ga_model.json"));
                    model_store::save_ga_model(&model, &cfg, &path)?;
                    println!("trained ga baseline -> {}", path.display());
                }
                "vqmm" => {
                    let model = train_vqmm_baseline(&train, &cfg)?;
                    let path = model_out.unwrap_or_else(|| cfg.model_dir.join("vqmm_model.json"));
                    model_store::save_vqmm_model(&model, &cfg, &path)?;
                    println!("trained vqmm baseline -> {}", path.display());
                }
                other => {
                    return Err(Error::Config(format!(
                        "unknown baseline {other:?} (expected ga or vqmm)"
                    )))
                }
            }
        }

        Command::Predict {
            frame_model,
            track_model,
            split,
            out,
        } => {
            let frame_path =
                frame_model.unwrap_or_else(|| cfg.model_dir.join("frame_model.json"));
            let track_path =
                track_model.unwrap_or_else(|| cfg.model_dir.join("track_model.json"));
            let frame_doc = model_store::load_frame_model(&frame_path)?;
            let track_doc = model_store::load_track_model(&track_path)?;
            ensure_front_end(&cfg, &frame_doc.run_config, "frame model")?;
            ensure_front_end(&cfg, &track_doc.run_config, "track model")?;

            let split = match split.as_str() {
                "train" => Some(Split::Train),
                "test" => Some(Split::Test),
                "all" => None,
                other => {
                    return Err(Error::Config(format!(
                        "unknown split {other:?} (expected train, test, or all)"
                    )))
                }
            };
            let tracks = load_tracks(&cfg, split)?;
            let model = ProposedModel {
                frame: frame_doc.model,
                track: track_doc.model,
            };
            let predictions = predict_proposed(&model, &tracks, &cfg)?;
            let path = out.unwrap_or_else(|| cfg.out_dir.join("predictions.csv"));
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            write_predictions(&path, &predictions)?;
            println!(
                "wrote {} predictions -> {}",
                predictions.len(),
                path.display()
            );
        }

        Command::Experiment {
            kind,
            model,
            k,
            repetitions,
            positive_class,
        } => {
            let kind = match kind.as_str() {
                "kfold" => ExperimentKind::KFold { k },
                "cross-db-balanced" => ExperimentKind::CrossDbBalanced { repetitions },
                "cross-db-full" => ExperimentKind::CrossDbFull,
                other => {
                    return Err(Error::Config(format!(
                        "unknown experiment {other:?} (expected kfold, cross-db-balanced, \
                         or cross-db-full)"
                    )))
                }
            };
            let plan = ExperimentPlan {
                kind,
                seed: cfg.seed,
                positive_class,
            };
            let tracks = load_tracks(&cfg, None)?;
            let outcome = run_experiment(&plan, model, &tracks, &cfg)?;
            let name = match kind {
                ExperimentKind::KFold { .. } => "kfold",
                ExperimentKind::CrossDbBalanced { .. } => "cross-db-balanced",
                ExperimentKind::CrossDbFull => "cross-db-full",
            };
            write_experiment_outputs(&cfg.out_dir, name, &outcome, &cfg)?;
            for (i, report) in outcome.reports.iter().enumerate() {
                let m = report.class_metrics(positive_class);
                println!(
                    "run {i}: {positive_class} precision {:.3} recall {:.3} f {:.3} accuracy {:.3}",
                    m.precision, m.recall, m.f_score, report.accuracy
                );
            }
            let agg = &outcome.aggregate;
            let (p, r, f) = &agg.per_class[positive_class.index()];
            println!(
                "aggregate ({} runs): {positive_class} precision {:.3} +/- {:.3}, \
                 recall {:.3} +/- {:.3}, f {:.3} +/- {:.3}, accuracy {:.3} +/- {:.3}",
                outcome.reports.len(),
                p.mean,
                p.std,
                r.mean,
                r.std,
                f.mean,
                f.std,
                agg.accuracy.mean,
                agg.accuracy.std
            );
            println!("reports under {}", cfg.out_dir.display());
        }

        Command::Playlist {
            predictions,
            tag,
            cap,
            min_margin,
            out,
        } => {
            let predictions_path =
                predictions.unwrap_or_else(|| cfg.out_dir.join("predictions.csv"));
            let preds = read_predictions(&predictions_path)?;
            let playlist = generate_playlist(&preds, tag, cap, min_margin)?;
            let path = out.unwrap_or_else(|| {
                cfg.out_dir
                    .join(format!("playlist_{}.txt", tag.as_str().to_ascii_lowercase()))
            });
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            write_playlist(&path, &playlist)?;
            println!(
                "playlist with {} of {} candidate predictions -> {}",
                playlist.len(),
                preds.len(),
                path.display()
            );
        }
    }
    Ok(())
}
