//! `manifest.json`: what was run, on which inputs, producing what.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::cli::Command;
use crate::error::{Error, Result};

pub const FILE_NAME: &str = "manifest.json";
pub const DIGEST_ALGORITHM: &str = "sha256";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// The full command with every option resolved, replayable by `semcell rerun`.
    pub command: Command,
    pub digest_algorithm: String,
    pub inputs: Vec<InputDigest>,
    pub started_at: String,
    pub finished_at: String,
    pub item_count: usize,
    pub unit_count: usize,
    /// Artifact file names relative to the output directory.
    pub outputs: Vec<String>,
    /// Resolved configuration and run statistics.
    pub details: BTreeMap<String, Value>,
}

impl RunManifest {
    pub fn new(command: Command, started_at: String) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            digest_algorithm: DIGEST_ALGORITHM.to_string(),
            inputs: Vec::new(),
            started_at,
            finished_at: String::new(),
            item_count: 0,
            unit_count: 0,
            outputs: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest {
            path: path.to_path_buf(),
            digest: file_digest(path)?,
        });
        Ok(())
    }

    pub fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(FILE_NAME);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::data(path, format!("invalid manifest: {e}")))
    }

    /// Fails if any recorded input no longer has its recorded digest.
    pub fn verify_inputs(&self) -> Result<()> {
        if self.digest_algorithm != DIGEST_ALGORITHM {
            return Err(Error::data(
                "manifest",
                format!("unsupported digest algorithm {:?}", self.digest_algorithm),
            ));
        }
        for input in &self.inputs {
            let now = file_digest(&input.path)?;
            if now != input.digest {
                return Err(Error::data(
                    &input.path,
                    "input changed since the recorded run",
                ));
            }
        }
        Ok(())
    }
}

pub fn file_digest(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(hasher.finalize()))
}
