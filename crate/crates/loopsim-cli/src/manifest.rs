//! The run manifest ties an output directory to its configuration,
//! dataset fingerprint and checkpoints; `resume` refuses to continue a
//! run whose manifest no longer matches what was recorded.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SELECTIONS_FILE: &str = "selections.tsv";
pub const CHECKPOINT_DIR: &str = "checkpoints";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub iteration: u32,
    /// Relative to the manifest's directory.
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub config_hash: String,
    pub dataset_fingerprint: String,
    pub checkpoint_every: u32,
    pub started_at_unix: u64,
    pub finished_at_unix: Option<u64>,
    pub trajectory_csv: PathBuf,
    pub selections_log: PathBuf,
    pub checkpoints: Vec<CheckpointRecord>,
    pub completed: bool,
}

impl RunManifest {
    pub fn new(
        config: RunConfig,
        config_hash: String,
        dataset_fingerprint: String,
        checkpoint_every: u32,
    ) -> RunManifest {
        RunManifest {
            config,
            config_hash,
            dataset_fingerprint,
            checkpoint_every,
            started_at_unix: unix_now(),
            finished_at_unix: None,
            trajectory_csv: PathBuf::from(TRAJECTORY_FILE),
            selections_log: PathBuf::from(SELECTIONS_FILE),
            checkpoints: Vec::new(),
            completed: false,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, json)
            .with_context(|| format!("cannot write manifest {}", path.display()))?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<RunManifest> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("cannot parse manifest {}", path.display()))
    }

    pub fn mark_completed(&mut self) {
        self.completed = true;
        self.finished_at_unix = Some(unix_now());
    }

    pub fn latest_checkpoint(&self) -> Option<&CheckpointRecord> {
        self.checkpoints.iter().max_by_key(|c| c.iteration)
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
