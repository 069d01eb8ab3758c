//! Argument parsing and dispatch for the `ghlab` binary. Exit codes: 0 on
//! success, 1 when a verification fails or a row errors, 2 on usage or
//! configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime};

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::commands::{self, with_workers, RunOutcome};
use crate::config::{load_config, McRunConfig, ScanConfig};
use crate::{emit, WORKERS_ENV};

#[derive(Parser, Debug)]
#[command(name = "ghlab", version, about = "Gauge-Higgs subsystem code numerical lab")]
struct Cli {
    /// Worker threads. Output does not depend on this.
    #[arg(long, global = true, env = WORKERS_ENV, default_value_t = 1)]
    workers: usize,

    /// Output file. Overrides `output` in the config; stdout when absent.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice layout, boundary classes and logical supports.
    Geometry {
        #[arg(long, default_value_t = 3)]
        lx: usize,
        #[arg(long, default_value_t = 2)]
        ly: usize,
    },
    /// Check the toric-code and gauge-Higgs code structure.
    CodeCheck {
        #[arg(long, default_value_t = 3)]
        lx: usize,
        #[arg(long, default_value_t = 2)]
        ly: usize,
    },
    /// Verify the gauge-Higgs to toric-code mapping numerically.
    MapVerify {
        #[arg(long, default_value_t = 2)]
        lx: usize,
        #[arg(long, default_value_t = 2)]
        ly: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.3, 1.0, 2.5])]
        j: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Parameter scan of the decohered ground state.
    Scan {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare density-matrix elements with random-bond Ising partition functions.
    RbimOracle {
        #[arg(long, default_value_t = 3)]
        lx: usize,
        #[arg(long, default_value_t = 2)]
        ly: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Keep every sampled pair in the report.
        #[arg(long)]
        pairs: bool,
    },
    /// Monte Carlo of the 2D random-bond Ising model.
    RbimMc {
        #[arg(long)]
        config: PathBuf,
    },
    /// Response of the logical coherence to a gauge coupling.
    Stability {
        #[arg(long)]
        config: PathBuf,
    },
}

fn dispatch(cli: &Cli) -> Result<(RunOutcome, Option<PathBuf>)> {
    let out = |cfg_out: &Option<PathBuf>| cli.output.clone().or_else(|| cfg_out.clone());
    Ok(match &cli.command {
        Command::Geometry { lx, ly } => (commands::geometry(*lx, *ly)?, cli.output.clone()),
        Command::CodeCheck { lx, ly } => (commands::code_check(*lx, *ly)?, cli.output.clone()),
        Command::MapVerify { lx, ly, j, tol } => (commands::map_verify(*lx, *ly, j, *tol)?, cli.output.clone()),
        Command::RbimOracle {
            lx,
            ly,
            p,
            samples,
            seed,
            tol,
            pairs,
        } => (
            commands::rbim_oracle(*lx, *ly, p, *samples, *seed, *tol, *pairs)?,
            cli.output.clone(),
        ),
        Command::Scan { config } => {
            let cfg: ScanConfig = load_config(config)?;
            (commands::scan(&cfg)?, out(&cfg.output))
        }
        Command::Stability { config } => {
            let cfg: ScanConfig = load_config(config)?;
            (commands::stability(&cfg)?, out(&cfg.output))
        }
        Command::RbimMc { config } => {
            let cfg: McRunConfig = load_config(config)?;
            (commands::rbim_mc(&cfg)?, out(&cfg.output))
        }
    })
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(err) => {
            let to_stdout = !err.use_stderr();
            let text = err.render().to_string();
            let _ = if to_stdout { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return if to_stdout { 0 } else { 2 };
        }
    };
    let started = SystemTime::now();
    let clock = Instant::now();
    let (outcome, path) = match with_workers(cli.workers, || dispatch(&cli)).and_then(|r| r) {
        Ok(v) => v,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err:#}");
            return 2;
        }
    };
    if let Err(err) = emit(&outcome, path.as_deref(), cli.workers, started, clock.elapsed(), stdout) {
        let _ = writeln!(stderr, "error: {err:#}");
        return 2;
    }
    let _ = writeln!(stderr, "{}", outcome.summary);
    if outcome.passed {
        0
    } else {
        let _ = writeln!(stderr, "{}: FAILED", outcome.subcommand);
        1
    }
}
