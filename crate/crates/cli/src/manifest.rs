use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::failure::Failure;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputFile {
    /// Path relative to the output directory.
    pub path: String,
    pub bytes: u64,
}

/// Record of one command invocation and the files it wrote.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<OutputFile>,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis())
}

/// Collects output files under one directory and writes the manifest last.
pub struct Outputs {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Outputs {
    pub fn create(
        dir: &Path,
        argv: &[String],
        subcommand: &str,
        config: &impl Serialize,
        seed: Option<u64>,
    ) -> Result<Self, Failure> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                tool: "csl".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: argv.to_vec(),
                subcommand: subcommand.into(),
                config: serde_json::to_value(config)?,
                seed,
                started_unix_ms: now_ms(),
                finished_unix_ms: 0,
                outputs: Vec::new(),
            },
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        fs::write(self.dir.join(name), contents)?;
        self.manifest.outputs.push(OutputFile {
            path: name.into(),
            bytes: contents.len() as u64,
        });
        Ok(())
    }

    pub fn finish(mut self) -> Result<RunManifest, Failure> {
        self.manifest.finished_unix_ms = now_ms();
        let text = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(self.dir.join(MANIFEST_FILE), text)?;
        Ok(self.manifest)
    }
}
