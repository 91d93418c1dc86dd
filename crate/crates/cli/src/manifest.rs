//! Run manifests: what ran, with which inputs, and checksums of what it wrote.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::input::{digest, sha256_hex, InputDigest};
use crate::job::Job;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TOOL: &str = "zetacast";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub job: Job,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub artifacts: Vec<Artifact>,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub finished: u64,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn artifacts(dir: &Path, files: &[String]) -> Result<Vec<Artifact>> {
    files
        .iter()
        .map(|f| {
            let bytes = std::fs::read(dir.join(f)).with_context(|| format!("reading back {f}"))?;
            Ok(Artifact {
                file: f.clone(),
                sha256: sha256_hex(&bytes),
                bytes: bytes.len() as u64,
            })
        })
        .collect()
}

/// Executes `job` into `out` and writes the manifest next to its artifacts.
pub fn run(job: &Job, out: &Path) -> Result<RunManifest> {
    let started = now();
    let inputs = job.inputs().into_iter().map(digest).collect::<Result<Vec<_>>>()?;
    let files = job.execute(out)?;
    let manifest = RunManifest {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        job: job.clone(),
        seed: job.seed(),
        inputs,
        artifacts: artifacts(out, &files)?,
        started,
        finished: now(),
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(out.join(MANIFEST_FILE), text).context("writing manifest")?;
    Ok(manifest)
}

pub fn load(path: &Path) -> Result<RunManifest> {
    let path = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: RunManifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if manifest.tool != TOOL {
        bail!("{} was not written by {TOOL}", path.display());
    }
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    Input { location: String },
    Missing { file: String },
    Unexpected { file: String },
    Changed { file: String },
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mismatch::Input { location } => write!(f, "input {location} differs from the recorded checksum"),
            Mismatch::Missing { file } => write!(f, "{file} was not produced"),
            Mismatch::Unexpected { file } => write!(f, "{file} is new"),
            Mismatch::Changed { file } => write!(f, "{file} differs"),
        }
    }
}

pub fn compare(recorded: &RunManifest, fresh: &RunManifest) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for input in &recorded.inputs {
        if !fresh.inputs.contains(input) {
            out.push(Mismatch::Input {
                location: input.location.clone(),
            });
        }
    }
    for a in &recorded.artifacts {
        match fresh.artifacts.iter().find(|b| b.file == a.file) {
            None => out.push(Mismatch::Missing { file: a.file.clone() }),
            Some(b) if b != a => out.push(Mismatch::Changed { file: a.file.clone() }),
            Some(_) => {}
        }
    }
    for b in &fresh.artifacts {
        if !recorded.artifacts.iter().any(|a| a.file == b.file) {
            out.push(Mismatch::Unexpected { file: b.file.clone() });
        }
    }
    out
}

/// Re-runs a recorded job into `out` and lists every difference from the record.
pub fn replay(recorded: &RunManifest, out: &Path) -> Result<Vec<Mismatch>> {
    let fresh = run(&recorded.job, out)?;
    Ok(compare(recorded, &fresh))
}
