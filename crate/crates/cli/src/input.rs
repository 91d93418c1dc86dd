//! Input locations: file paths or `fixture:<name>` for the embedded tables.

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zetacast_core::data::{read_macro_csv, read_table, NumericTable, SchemaConfig};
use zetacast_core::{fixtures, MacroSeries};

pub const FIXTURE_PREFIX: &str = "fixture:";

/// Resolves a user-supplied location. Files are canonicalized so a manifest can be
/// replayed from any working directory.
pub fn resolve(location: &str) -> Result<String> {
    if let Some(name) = location.strip_prefix(FIXTURE_PREFIX) {
        fixture(name)?;
        return Ok(location.to_string());
    }
    let path = std::fs::canonicalize(location).with_context(|| format!("input {location} not found"))?;
    Ok(path.to_string_lossy().into_owned())
}

fn fixture(name: &str) -> Result<&'static str> {
    let file = if name.ends_with(".csv") {
        name.to_string()
    } else {
        format!("{name}.csv")
    };
    fixtures::ALL
        .iter()
        .find(|(f, _)| *f == file)
        .map(|(_, contents)| *contents)
        .ok_or_else(|| {
            let known: Vec<&str> = fixtures::ALL.iter().map(|(f, _)| f.trim_end_matches(".csv")).collect();
            anyhow!("unknown fixture '{name}' (known: {})", known.join(", "))
        })
}

pub fn read_bytes(location: &str) -> Result<Vec<u8>> {
    match location.strip_prefix(FIXTURE_PREFIX) {
        Some(name) => Ok(fixture(name)?.as_bytes().to_vec()),
        None => std::fs::read(location).with_context(|| format!("reading {location}")),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load_table(location: &str) -> Result<NumericTable> {
    read_table(read_bytes(location)?.as_slice()).with_context(|| format!("reading table {location}"))
}

pub fn load_macro(location: &str, schema: &SchemaConfig, beta: f64) -> Result<MacroSeries> {
    read_macro_csv(read_bytes(location)?.as_slice(), schema, beta)
        .with_context(|| format!("reading macro series {location}"))
}

/// Checksum of an input at the time a job ran.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub location: String,
    pub sha256: String,
}

pub fn digest(location: &str) -> Result<InputDigest> {
    Ok(InputDigest {
        location: location.to_string(),
        sha256: sha256_hex(&read_bytes(location)?),
    })
}
