//! Versioned JSON files holding a complete ρMNK instance, so that several
//! runs can share one landscape without regenerating it.

use std::fs;
use std::path::Path;

use hdo_core::problems::RmnkInstance;
use serde::{Deserialize, Serialize};

pub const RMNK_FORMAT: &str = "rmnk-v1";

#[derive(Debug, thiserror::Error)]
pub enum RmnkFileError {
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed instance file {path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("unsupported format {found:?} (expected {RMNK_FORMAT:?})")]
    Format { found: String },
    #[error(transparent)]
    Invalid(#[from] hdo_core::Error),
}

#[derive(Serialize, Deserialize)]
struct RmnkFile {
    format: String,
    #[serde(flatten)]
    instance: RmnkInstance,
}

pub fn to_json(instance: &RmnkInstance) -> String {
    let file = RmnkFile { format: RMNK_FORMAT.into(), instance: instance.clone() };
    serde_json::to_string(&file).expect("instances always serialize")
}

pub fn from_json(text: &str, path: &str) -> Result<RmnkInstance, RmnkFileError> {
    let file: RmnkFile =
        serde_json::from_str(text).map_err(|source| RmnkFileError::Json { path: path.into(), source })?;
    if file.format != RMNK_FORMAT {
        return Err(RmnkFileError::Format { found: file.format });
    }
    file.instance.validate()?;
    Ok(file.instance)
}

pub fn save(instance: &RmnkInstance, path: &Path) -> Result<(), RmnkFileError> {
    fs::write(path, to_json(instance)).map_err(|source| RmnkFileError::Io { path: path.display().to_string(), source })
}

pub fn load(path: &Path) -> Result<RmnkInstance, RmnkFileError> {
    let text =
        fs::read_to_string(path).map_err(|source| RmnkFileError::Io { path: path.display().to_string(), source })?;
    from_json(&text, &path.display().to_string())
}
