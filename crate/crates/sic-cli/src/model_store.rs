//! Versioned model documents.
//!
//! Every trained model persists as JSON with a `schema` name/version field,
//! the full resolved run configuration, and its hash. Loading checks the
//! schema first, so a document from another version (or another model kind)
//! fails with a clear error instead of deserializing garbage.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sic_core::baselines::ga::RansacModel;
use sic_core::baselines::vqmm::VqmmModel;
use sic_core::{AdaBoostModel, RandomForestModel};

use crate::config::RunConfig;
use crate::error::{Error, Result};

pub const FRAME_MODEL_SCHEMA: &str = "frame_model/1";
pub const TRACK_MODEL_SCHEMA: &str = "track_model/1";
pub const GA_MODEL_SCHEMA: &str = "ga_model/1";
pub const VQMM_MODEL_SCHEMA: &str = "vqmm_model/1";

#[derive(Debug, Serialize, Deserialize)]
pub struct Document<M> {
    pub schema: String,
    pub config_hash: String,
    pub run_config: RunConfig,
    pub model: M,
}

fn save<M: Serialize>(schema: &str, model: &M, run_config: &RunConfig, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let doc = Document {
        schema: schema.to_string(),
        config_hash: run_config.hash(),
        run_config: run_config.clone(),
        model,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

fn load<M: DeserializeOwned>(schema: &str, path: &Path, run_hint: &str) -> Result<Document<M>> {
    let text = fs::read_to_string(path).map_err(|_| {
        Error::MissingArtifact(format!(
            "{} not found; run `{run_hint}` first",
            path.display()
        ))
    })?;
    // check the schema field before committing to the full payload shape
    #[derive(Deserialize)]
    struct SchemaOnly {
        schema: String,
    }
    let head: SchemaOnly = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })?;
    if head.schema != schema {
        return Err(Error::Document {
            path: path.into(),
            message: format!("schema mismatch: expected {schema:?}, found {:?}", head.schema),
        });
    }
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })
}

pub fn save_frame_model(model: &RandomForestModel, cfg: &RunConfig, path: &Path) -> Result<()> {
    save(FRAME_MODEL_SCHEMA, model, cfg, path)
}

pub fn load_frame_model(path: &Path) -> Result<Document<RandomForestModel>> {
    load(FRAME_MODEL_SCHEMA, path, "sic train-frame")
}

pub fn save_track_model(model: &AdaBoostModel, cfg: &RunConfig, path: &Path) -> Result<()> {
    save(TRACK_MODEL_SCHEMA, model, cfg, path)
}

pub fn load_track_model(path: &Path) -> Result<Document<AdaBoostModel>> {
    load(TRACK_MODEL_SCHEMA, path, "sic train-track")
}

pub fn save_ga_model(model: &RansacModel, cfg: &RunConfig, path: &Path) -> Result<()> {
    save(GA_MODEL_SCHEMA, model, cfg, path)
}

pub fn load_ga_model(path: &Path) -> Result<Document<RansacModel>> {
    load(GA_MODEL_SCHEMA, path, "sic train-baseline ga")
}

pub fn save_vqmm_model(model: &VqmmModel, cfg: &RunConfig, path: &Path) -> Result<()> {
    save(VQMM_MODEL_SCHEMA, model, cfg, path)
}

pub fn load_vqmm_model(path: &Path) -> Result<Document<VqmmModel>> {
    load(VQMM_MODEL_SCHEMA, path, "sic train-baseline vqmm")
}
