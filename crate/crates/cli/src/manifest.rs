use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

/// Record of one artifact-producing run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub version: String,
    pub wall_time_ms: u128,
    pub outputs: Vec<OutputDigest>,
}

pub struct Recorder {
    command: String,
    parameters: BTreeMap<String, String>,
    started: Instant,
    outputs: Vec<PathBuf>,
}

impl Recorder {
    pub fn new(command: &str) -> Self {
        Recorder { command: command.into(), parameters: BTreeMap::new(), started: Instant::now(), outputs: Vec::new() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.into(), value.to_string());
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> std::io::Result<()> {
        std::fs::write(path, contents)?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Writes the manifest next to the first output, or to `target` when given.
    /// Returns `None` when the run produced no files.
    pub fn finish(self, target: Option<&Path>) -> std::io::Result<Option<PathBuf>> {
        if self.outputs.is_empty() {
            return Ok(None);
        }
        let outputs = self
            .outputs
            .iter()
            .map(|p| {
                let bytes = std::fs::read(p)?;
                Ok(OutputDigest { path: p.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) })
            })
            .collect::<std::io::Result<Vec<_>>>()?;
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_ms: self.started.elapsed().as_millis(),
            outputs,
        };
        let path = match target {
            Some(p) => p.to_path_buf(),
            None => {
                let mut name = self.outputs[0].clone().into_os_string();
                name.push(".manifest.json");
                PathBuf::from(name)
            }
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(Some(path))
    }
}
