//! Run configuration: one flat TOML file holding the dataset paths and
//! every simulation knob. Relative dataset paths are resolved against
//! the config file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use loopsim::SimulationConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub ratings_file: PathBuf,
    pub users_file: PathBuf,
    pub movies_file: PathBuf,
    #[serde(flatten)]
    pub sim: SimulationConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut config: RunConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))?;
        config
            .sim
            .validate()
            .with_context(|| format!("invalid config file {}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for file in [
            &mut config.ratings_file,
            &mut config.users_file,
            &mut config.movies_file,
        ] {
            if file.is_relative() {
                *file = base.join(&file);
            }
        }
        Ok(config)
    }

    /// Hash of the canonical (JSON) form; stored in the manifest and in
    /// every checkpoint header so resumed runs cannot silently diverge.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex_digest(canonical.as_bytes())
    }

    pub fn data_files(&self) -> [&Path; 3] {
        [&self.ratings_file, &self.users_file, &self.movies_file]
    }
}

/// SHA-256 of the given bytes as lowercase hex.
pub fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    to_hex(&hasher.finalize())
}

/// Streamed SHA-256 over the content of several files.
pub fn fingerprint_files(paths: &[&Path]) -> Result<String> {
    let mut hasher = Sha256::new();
    for path in paths {
        let bytes = fs::read(path)
            .with_context(|| format!("cannot read dataset file {}", path.display()))?;
        hasher.update(&bytes);
    }
    Ok(to_hex(&hasher.finalize()))
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
