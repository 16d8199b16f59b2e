//! Atomic file output, CSV formatting and run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rotorbath::RawConfig;
use serde::Serialize;

use crate::failure::{CliResult, Failure};

/// Writes to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Failure::config(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| Failure::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Failure::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))
}

/// 17 significant digits, enough to reproduce every f64 exactly.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// CSV with a header row, as bytes.
pub fn csv_bytes<I>(header: &[&str], rows: I) -> CliResult<Vec<u8>>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| Failure::config(format!("csv encoding: {e}"));
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(&r).map_err(wrap)?;
    }
    w.into_inner()
        .map_err(|e| Failure::config(format!("csv encoding: {e}")))
}

pub fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)
        .map_err(|e| Failure::config(format!("json encoding: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

pub fn unix_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Provenance record written next to the files it lists.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub subcommand: String,
    pub arguments: Vec<String>,
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
    pub config: Option<RawConfig>,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn start(subcommand: &str, output_dir: &Path, seed: Option<u64>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            arguments: std::env::args().skip(1).collect(),
            output_dir: output_dir.to_path_buf(),
            seed,
            config: None,
            started_unix_ms: unix_millis(),
            finished_unix_ms: 0,
            files: Vec::new(),
        }
    }

    /// Writes `bytes` atomically to `name` in the output directory and records it.
    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        write_atomic(&self.output_dir.join(name), bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.finished_unix_ms = unix_millis();
        let bytes = json_bytes(&self)?;
        write_atomic(&self.output_dir.join("manifest.json"), &bytes)
    }
}
