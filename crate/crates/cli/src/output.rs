//! Data-file emission and the run manifest.
//!
//! Data files are written first (each via a temporary file and rename), then
//! the manifest, whose checksums are verified against the files on disk.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";

/// Column name and its unit ("1" for dimensionless, "count" for tallies).
pub type Column = (&'static str, &'static str);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<ColumnUnit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnUnit {
    pub name: &'static str,
    pub unit: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub seed: u64,
    pub config: Value,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub files: Vec<FileRecord>,
    pub conventions: Value,
    pub results: Value,
}

/// Accumulates the files of one run.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<FileRecord>,
}

impl OutputSet {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    /// Writes a CSV with a header row. Floats should be pre-formatted with
    /// [`fmt_f64`] so output is reproducible to the bit.
    pub fn write_csv(&mut self, rel: &str, columns: &[Column], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = columns.iter().map(|c| c.0).collect();
        w.write_record(&header).map_err(|e| CliError::Runtime(format!("{rel}: {e}")))?;
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            w.write_record(row).map_err(|e| CliError::Runtime(format!("{rel}: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Runtime(format!("{rel}: {e}")))?;
        let units = columns.iter().map(|&(name, unit)| ColumnUnit { name, unit }).collect();
        self.write_bytes(rel, &bytes, units)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(format!("{rel}: {e}")))?;
        bytes.push(b'\n');
        self.write_bytes(rel, &bytes, Vec::new())
    }

    fn write_bytes(&mut self, rel: &str, bytes: &[u8], columns: Vec<ColumnUnit>) -> Result<(), CliError> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        write_atomic(&path, bytes)?;
        self.files.push(FileRecord { path: rel.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64, columns });
        Ok(())
    }

    /// Writes `manifest.json` and re-reads every data file to confirm its checksum.
    pub fn finish(self, config: &RunConfig, started: u64, conventions: Value, results: Value) -> Result<RunManifest, CliError> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: config.subcommand.as_str(),
            seed: config.seed,
            config: serde_json::to_value(config).map_err(|e| CliError::Runtime(e.to_string()))?,
            started_unix_s: started,
            finished_unix_s: unix_now(),
            files: self.files,
            conventions,
            results,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
        bytes.push(b'\n');
        write_atomic(&self.dir.join(MANIFEST_NAME), &bytes)?;
        verify_manifest(&self.dir, &manifest)?;
        Ok(manifest)
    }
}

/// Recomputes each listed file's checksum.
pub fn verify_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    for f in &manifest.files {
        let path = dir.join(&f.path);
        let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        if sha256_hex(&bytes) != f.sha256 {
            return Err(CliError::Runtime(format!("{}: checksum mismatch after write", path.display())));
        }
    }
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 2.0, 1e-300, -0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
