//! Run manifests: one JSON record per invocation describing what was run,
//! on which inputs and what it produced.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputFile>,
    pub outputs: Vec<PathBuf>,
    pub duration_seconds: f64,
}

pub fn sha256_file(path: &Path) -> Result<(String, u64), String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    let hex = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok((hex, bytes.len() as u64))
}

impl Manifest {
    pub fn new(
        command: &'static str,
        config: serde_json::Value,
        inputs: &[PathBuf],
        outputs: Vec<PathBuf>,
        started: Instant,
    ) -> Result<Self, String> {
        let inputs = inputs
            .iter()
            .map(|p| {
                sha256_file(p).map(|(sha256, bytes)| InputFile {
                    path: p.clone(),
                    sha256,
                    bytes,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            argv: std::env::args().collect(),
            config,
            inputs,
            outputs,
            duration_seconds: started.elapsed().as_secs_f64(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), String> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
    }
}
