//! Atomic file output, CSV formatting and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "ghlab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Missing numeric values in CSV output.
pub const NA: &str = "NA";

/// Write via a temporary file in the target directory and rename it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the subcommand name and the canonical JSON form of its config.
pub fn config_hash<T: Serialize>(subcommand: &str, config: &T) -> Result<String> {
    let mut bytes = subcommand.as_bytes().to_vec();
    bytes.push(b'\n');
    bytes.extend(serde_json::to_vec(config)?);
    Ok(sha256_hex(&bytes))
}

/// Shortest round-trip decimal form, `NaN`/`inf` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), fmt_f64)
}

/// CSV table whose leading columns identify the format, the config and the
/// tool version on every row.
pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
    prefix: [String; 3],
    rows: usize,
}

impl CsvTable {
    pub fn new(format: &str, config_hash: &str, header: &[String]) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        let mut h = vec!["format".to_string(), "config_hash".into(), "tool_version".into()];
        h.extend(header.iter().cloned());
        writer.write_record(&h)?;
        Ok(Self {
            writer,
            prefix: [format.to_string(), config_hash.to_string(), TOOL_VERSION.to_string()],
            rows: 0,
        })
    }

    pub fn push(&mut self, fields: Vec<String>) -> Result<()> {
        let mut rec: Vec<String> = self.prefix.to_vec();
        rec.extend(fields);
        self.writer.write_record(&rec)?;
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn into_bytes(self) -> Result<Vec<u8>> {
        self.writer.into_inner().map_err(|e| anyhow::anyhow!("csv flush: {}", e.error()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
    pub rows: Option<usize>,
}

/// Sidecar describing one run. Timing lives here and nowhere else.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub subcommand: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub workers: usize,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
    pub passed: bool,
    pub outputs: Vec<OutputFile>,
    pub summary: serde_json::Value,
}

/// `data.csv` gets `data.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn csv_rows_carry_prefix_and_quote() {
        let mut t = CsvTable::new("fmt/1", "abc", &["x".into(), "note".into()]).unwrap();
        t.push(vec![fmt_f64(0.1), "a, b".into()]).unwrap();
        t.push(vec![fmt_opt(None), NA.into()]).unwrap();
        let s = String::from_utf8(t.into_bytes().unwrap()).unwrap();
        let lines: Vec<&str> = s.split("\r\n").collect();
        assert_eq!(lines[0], "format,config_hash,tool_version,x,note");
        assert_eq!(lines[1], format!("fmt/1,abc,{TOOL_VERSION},0.1,\"a, b\""));
        assert!(lines[2].ends_with(",NA,NA"), "{}", lines[2]);
    }
}
