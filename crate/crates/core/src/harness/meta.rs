use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

pub const SCHEMA_VERSION: &str = "1";

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "KLOOST_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(LabError::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// One invocation: the experiment, its parameters, and execution settings.
/// Only `command`, `params` and `seed` determine the output.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: &str, seed: u64, workers: usize) -> Self {
        Self {
            command: command.to_string(),
            params: BTreeMap::new(),
            seed,
            workers: workers.max(1),
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn canonical(&self) -> String {
        let mut s = format!("command={}\nseed={}\n", self.command, self.seed);
        for (k, v) in &self.params {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }

    pub fn config_hash(&self) -> String {
        config_hash(&self.canonical())
    }

    /// Run `f` on a pool with exactly `workers` threads.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        with_workers(self.workers, f)
    }
}

pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// First 16 hex digits of the SHA-256 of `canonical`.
pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// `git describe` of the source tree, or `KLOOST_GIT_DESCRIBE` if set.
pub fn git_describe() -> &'static str {
    static CELL: OnceLock<String> = OnceLock::new();
    CELL.get_or_init(|| {
        if let Ok(v) = std::env::var("KLOOST_GIT_DESCRIBE") {
            return v;
        }
        Command::new("git")
            .args(["describe", "--always", "--dirty", "--tags"])
            .current_dir(env!("CARGO_MANIFEST_DIR"))
            .output()
            .ok()
            .filter(|o| o.status.success())
            .and_then(|o| String::from_utf8(o.stdout).ok())
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| format!("v{}", env!("CARGO_PKG_VERSION")))
    })
}

/// Columns stamped on every output row.
#[derive(Clone, Debug, Serialize)]
pub struct RunMeta {
    pub schema_version: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub git_describe: String,
}

impl RunMeta {
    pub fn for_config(cfg: &RunConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            config_hash: cfg.config_hash(),
            seed: cfg.seed,
            git_describe: git_describe().to_string(),
        }
    }

    pub fn header() -> [&'static str; 4] {
        ["schema_version", "config_hash", "seed", "git_describe"]
    }

    pub fn fields(&self) -> [String; 4] {
        [
            self.schema_version.to_string(),
            self.config_hash.clone(),
            self.seed.to_string(),
            self.git_describe.clone(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_workers_and_output() {
        let a = RunConfig::new("scan", 3, 1).param("q", 101).param("B", 6);
        let mut b = RunConfig::new("scan", 3, 8).param("B", 6).param("q", 101);
        b.output = Some("x.csv".into());
        assert_eq!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 16);
        assert_ne!(
            a.config_hash(),
            RunConfig::new("scan", 4, 1)
                .param("q", 101)
                .param("B", 6)
                .config_hash()
        );
    }

    #[test]
    fn known_digest() {
        // sha256("") = e3b0c442...
        assert_eq!(config_hash(""), "e3b0c44298fc1c14");
    }

    #[test]
    fn pool_size_is_respected() {
        assert_eq!(with_workers(3, rayon::current_num_threads).unwrap(), 3);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
