//! JSON configuration file. Every field is optional; command-line flags win.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lyricstat::corpus::{InputFormat, TokenizeConfig};
use lyricstat::weat::OovPolicy;
use serde::{Deserialize, Serialize};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub ingest: IngestFile,
    pub style: StyleFile,
    pub train: TrainFile,
    pub weat: WeatFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestFile {
    pub format: Option<InputFormat>,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub max_reject_fraction: Option<f64>,
    pub tokenize: Option<TokenizeConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StyleFile {
    pub words: Option<Vec<String>>,
    pub top_k: Option<usize>,
    pub cohort: Option<String>,
    pub year: Option<i32>,
    pub swear_words: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub no_stopwords: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainFile {
    pub dim: Option<usize>,
    pub window: Option<usize>,
    pub negatives: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub min_count: Option<u64>,
    pub subsample: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub deterministic: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeatFile {
    pub tests: Option<PathBuf>,
    pub policy: Option<OovPolicy>,
    pub exact: Option<bool>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub inclusive: Option<bool>,
}

pub fn load(path: Option<&Path>) -> Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
}

/// Writes the resolved options as `<name>.config.json` and their digest as `<name>.config.sha256`.
pub fn echo<T: Serialize>(out_dir: &Path, name: &str, resolved: &T) -> Result<String> {
    let digest = lyricstat::digest::config_digest(resolved);
    let json = serde_json::to_string_pretty(resolved)?;
    let json_path = out_dir.join(format!("{name}.config.json"));
    fs::write(&json_path, json + "\n").with_context(|| format!("cannot write {}", json_path.display()))?;
    let digest_path = out_dir.join(format!("{name}.config.sha256"));
    fs::write(&digest_path, format!("{digest}\n")).with_context(|| format!("cannot write {}", digest_path.display()))?;
    Ok(digest)
}
