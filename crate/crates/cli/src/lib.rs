//! Library half of the `ghlab` binary: configs, subcommands and output.

pub mod app;
pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::Result;

use commands::RunOutcome;
use output::{manifest_path, sha256_hex, write_atomic, Manifest, OutputFile, TOOL, TOOL_VERSION};

/// Worker count from the environment, if set.
pub const WORKERS_ENV: &str = "GHLAB_WORKERS";

/// Write the main artifact (CSV, or the JSON report for verification
/// commands) and its manifest. Without a path the artifact goes to stdout
/// and no manifest is written.
pub fn emit(
    out: &RunOutcome,
    path: Option<&Path>,
    workers: usize,
    started: SystemTime,
    elapsed: Duration,
    stdout: &mut dyn Write,
) -> Result<()> {
    let body = match &out.csv {
        Some(csv) => csv.clone(),
        None => {
            let mut v = serde_json::to_vec_pretty(&out.report)?;
            v.push(b'\n');
            v
        }
    };
    let Some(path) = path else {
        stdout.write_all(&body)?;
        return Ok(());
    };
    write_atomic(path, &body)?;
    let manifest = Manifest {
        tool: TOOL,
        tool_version: TOOL_VERSION,
        subcommand: out.subcommand.to_string(),
        config_hash: out.config_hash.clone(),
        config: out.config.clone(),
        workers,
        started_unix: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        elapsed_seconds: elapsed.as_secs_f64(),
        passed: out.passed,
        outputs: vec![OutputFile {
            path: path.to_path_buf(),
            sha256: sha256_hex(&body),
            rows: out.rows,
        }],
        summary: out.report.clone(),
    };
    let mut m = serde_json::to_vec_pretty(&manifest)?;
    m.push(b'\n');
    write_atomic(&manifest_path(path), &m)?;
    Ok(())
}
