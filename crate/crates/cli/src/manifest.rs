use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

/// Everything needed to rerun a command and compare its output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    /// Every parameter after defaults and profiles are resolved.
    pub params: Value,
    pub seed: Option<u64>,
    pub prng: &'static str,
    pub engine_version: &'static str,
    pub started: String,
    pub finished: String,
    pub workers: usize,
    pub outputs: Vec<PathBuf>,
}

pub struct ManifestBuilder {
    command: String,
    started: DateTime<Utc>,
    workers: usize,
}

fn stamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl ManifestBuilder {
    pub fn start(command: &str, workers: usize) -> Self {
        Self {
            command: command.to_string(),
            started: Utc::now(),
            workers,
        }
    }

    pub fn finish(self, params: Value, seed: Option<u64>, outputs: Vec<PathBuf>) -> RunManifest {
        RunManifest {
            command: self.command,
            argv: std::env::args().collect(),
            params,
            seed,
            prng: hanoiwalk::experiments::PRNG_ID,
            engine_version: hanoiwalk::VERSION,
            started: stamp(self.started),
            finished: stamp(Utc::now()),
            workers: self.workers,
            outputs,
        }
    }
}

/// `out.csv` gets `out.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write_manifest(manifest: &RunManifest, output: &Path) -> anyhow::Result<PathBuf> {
    let path = manifest_path(output);
    let mut w = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut w, manifest)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(path)
}
