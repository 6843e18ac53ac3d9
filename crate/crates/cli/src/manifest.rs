use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const FILE_NAME: &str = "manifest.json";

/// Record of one invocation, written once to the output directory when it ends.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    pub wall_clock_seconds: f64,
    pub version: String,
}

pub struct ManifestBuilder {
    command: String,
    config_hash: String,
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn start(command: &str) -> Self {
        Self {
            command: command.to_string(),
            config_hash: String::new(),
            seed: None,
            inputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn config(&mut self, hash: String, seed: Option<u64>) {
        self.config_hash = hash;
        self.seed = seed;
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn finish(self, output_dir: &Path) -> CliResult<RunManifest> {
        let manifest = RunManifest {
            command: self.command,
            config_hash: self.config_hash,
            seed: self.seed,
            inputs: self.inputs,
            output_dir: output_dir.to_path_buf(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let path = output_dir.join(FILE_NAME);
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::data(&path, e.to_string()))?;
        std::fs::write(&path, json + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}
