use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Record of one command invocation, written next to its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub duration_seconds: f64,
    /// Arguments after the program name; replaying them reproduces the run.
    pub argv: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, params: Value, seed: Option<u64>, argv: &[String]) -> Self {
        Self {
            command: command.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            duration_seconds: 0.0,
            argv: argv.iter().skip(1).cloned().collect(),
        }
    }

    pub fn finish(&mut self, outputs: Vec<PathBuf>, elapsed: Duration) {
        self.outputs = outputs;
        self.duration_seconds = elapsed.as_secs_f64();
    }

    pub fn path_for(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write(&self, out: &Path) -> anyhow::Result<PathBuf> {
        let path = Self::path_for(out);
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
