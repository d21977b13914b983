//! Resolved run configuration: one top-level seed, the DSP and model
//! parameters, and the working paths. A fully resolved copy is embedded in
//! every persisted artifact together with a stable hash, so any output can
//! be traced back to the exact settings that produced it.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sic_core::baselines::ga::GaConfig;
use sic_core::baselines::vqmm::VqmmConfig;
use sic_core::{BoostConfig, FrameSpec, MfccConfig, RfConfig};

use crate::error::{Error, Result};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "SIC_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub manifest: PathBuf,
    pub cache_dir: PathBuf,
    pub model_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Root seed; every randomized stage derives its own stream from this
    /// plus a purpose string.
    pub seed: u64,
    /// Worker threads for per-track stages; 0 means one per core.
    pub jobs: usize,
    pub sample_rate_hz: u32,
    pub frame: FrameSpec,
    pub mfcc: MfccConfig,
    pub rf: RfConfig,
    pub boost: BoostConfig,
    pub ga: GaConfig,
    pub vqmm: VqmmConfig,
    /// Probability threshold binarizing frames into voiced runs.
    pub runs_threshold: f64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            manifest: PathBuf::from("manifest.csv"),
            cache_dir: PathBuf::from("cache"),
            model_dir: PathBuf::from("models"),
            out_dir: PathBuf::from("out"),
            seed: 0,
            jobs: 0,
            sample_rate_hz: sic_core::audio::CANONICAL_RATE_HZ,
            frame: FrameSpec::default(),
            mfcc: MfccConfig::default(),
            rf: RfConfig::default(),
            boost: BoostConfig::default(),
            ga: GaConfig::default(),
            vqmm: VqmmConfig::default(),
            runs_threshold: 0.5,
        }
    }
}

impl RunConfig {
    /// Read a `key = value` config file (`#` comments, blank lines ignored)
    /// over the defaults.
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected key = value, got {raw:?}",
                    path.display(),
                    i + 1
                )));
            };
            cfg.set(key.trim(), value.trim()).map_err(|message| {
                Error::Config(format!("{}:{}: {message}", path.display(), i + 1))
            })?;
        }
        Ok(cfg)
    }

    /// Apply one key/value pair (used both by the file parser and by CLI
    /// overrides).
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| format!("bad value for {key}: {e}"))
        }
        match key {
            "manifest" => self.manifest = PathBuf::from(value),
            "cache_dir" => self.cache_dir = PathBuf::from(value),
            "model_dir" => self.model_dir = PathBuf::from(value),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "seed" => self.seed = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "sample_rate_hz" => self.sample_rate_hz = parse(key, value)?,
            "frame.len" => self.frame.frame_len = parse(key, value)?,
            "frame.hop" => self.frame.hop = parse(key, value)?,
            "mfcc.n_mels" => self.mfcc.n_mels = parse(key, value)?,
            "mfcc.n_coeffs" => self.mfcc.n_coeffs = parse(key, value)?,
            "mfcc.fmin_hz" => self.mfcc.fmin_hz = parse(key, value)?,
            "mfcc.fmax_hz" => self.mfcc.fmax_hz = Some(parse(key, value)?),
            "mfcc.log_floor" => self.mfcc.log_floor = parse(key, value)?,
            "rf.n_trees" => self.rf.n_trees = parse(key, value)?,
            "rf.max_depth" => self.rf.max_depth = parse(key, value)?,
            "rf.min_leaf" => self.rf.min_leaf = parse(key, value)?,
            "boost.n_rounds" => self.boost.n_rounds = parse(key, value)?,
            "boost.tree_depth" => self.boost.tree_depth = parse(key, value)?,
            "boost.class_weight_song" => self.boost.class_weights.0 = parse(key, value)?,
            "boost.class_weight_instrumental" => self.boost.class_weights.1 = parse(key, value)?,
            "ga.iterations" => self.ga.iterations = parse(key, value)?,
            "ga.inlier_threshold" => self.ga.inlier_threshold = parse(key, value)?,
            "vqmm.k" => self.vqmm.k = parse(key, value)?,
            "vqmm.kmeans_iters" => self.vqmm.kmeans_iters = parse(key, value)?,
            "runs.threshold" => self.runs_threshold = parse(key, value)?,
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    /// Honor the cache-dir environment override.
    pub fn apply_env(&mut self) {
        if let Ok(dir) = std::env::var(CACHE_DIR_ENV) {
            if !dir.is_empty() {
                self.cache_dir = PathBuf::from(dir);
            }
        }
    }

    /// Per-stage model configs with their seeds derived from the root seed.
    pub fn rf_resolved(&self) -> RfConfig {
        RfConfig {
            seed: sic_core::rng::derive_seed(self.seed, "frame-model"),
            ..self.rf
        }
    }

    pub fn boost_resolved(&self) -> BoostConfig {
        BoostConfig {
            seed: sic_core::rng::derive_seed(self.seed, "track-model"),
            ..self.boost
        }
    }

    pub fn ga_resolved(&self) -> GaConfig {
        GaConfig {
            seed: sic_core::rng::derive_seed(self.seed, "baseline/ga"),
            ..self.ga
        }
    }

    pub fn vqmm_resolved(&self) -> VqmmConfig {
        VqmmConfig {
            seed: sic_core::rng::derive_seed(self.seed, "baseline/vqmm"),
            ..self.vqmm
        }
    }

    /// Stable FNV-1a hash of the canonical JSON form, rendered as hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", fnv1a(json.as_bytes()))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
