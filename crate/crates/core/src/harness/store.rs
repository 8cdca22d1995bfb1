use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::meta::{RunConfig, SCHEMA_VERSION};
use crate::error::Result;

/// One line of the run log. Wall-clock data lives here rather than in the
/// result tables, which must be reproducible byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct RunLogEntry {
    pub schema_version: &'static str,
    pub config_hash: String,
    pub timestamp_ms: u128,
    pub command: String,
    pub seed: u64,
    pub workers: usize,
    pub wall_ms: u128,
    pub output: Option<PathBuf>,
    pub summary: serde_json::Value,
}

impl RunLogEntry {
    pub fn new(cfg: &RunConfig, wall: Duration, summary: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            config_hash: cfg.config_hash(),
            timestamp_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
            command: cfg.command.clone(),
            seed: cfg.seed,
            workers: cfg.workers,
            wall_ms: wall.as_millis(),
            output: cfg.output.clone(),
            summary,
        }
    }
}

/// Append-only JSON-lines log; existing lines are never rewritten.
#[derive(Clone, Debug)]
pub struct ResultStore {
    path: PathBuf,
}

impl ResultStore {
    pub fn open(path: impl AsRef<Path>) -> Self {
        Self {
            path: path.as_ref().to_path_buf(),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append<T: Serialize>(&self, record: &T) -> Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        f.write_all(line.as_bytes())?;
        Ok(())
    }
}
