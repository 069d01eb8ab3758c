//! One function per subcommand. Each returns the artifacts in memory; the
//! caller decides where they go.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use ghlab_core::channel::{default_gauge_observable, plaquette_average, run_scan, Observable, ScanSpec};
use ghlab_core::exact::{verify_mapping, HamiltonianModel};
use ghlab_core::lattice::GeometryReport;
use ghlab_core::rbim::{binder_crossing, mc_estimate, nishimori_beta, run_oracle, McConfig};
use ghlab_core::seed::seed_derive;
use ghlab_core::stability::{stability_scan, CouplingSpec};
use ghlab_core::{build_lghm_code, build_tc_code, verify_code, LatticeGeometry, PauliOperator};

use crate::config::{McLine, McRunConfig, ScanConfig};
use crate::output::{config_hash, fmt_f64, fmt_opt, CsvTable, NA};

pub const SCAN_FORMAT: &str = "ghlab-scan/1";
pub const STABILITY_FORMAT: &str = "ghlab-stability/1";
pub const MC_FORMAT: &str = "ghlab-rbim-mc/1";

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub subcommand: &'static str,
    pub config_hash: String,
    pub config: serde_json::Value,
    /// CSV body for table-producing subcommands.
    pub csv: Option<Vec<u8>>,
    pub rows: Option<usize>,
    pub report: serde_json::Value,
    pub passed: bool,
    pub summary: String,
}

fn outcome<C: Serialize>(
    subcommand: &'static str,
    config: &C,
    report: serde_json::Value,
    passed: bool,
    summary: String,
) -> Result<RunOutcome> {
    Ok(RunOutcome {
        subcommand,
        config_hash: config_hash(subcommand, config)?,
        config: serde_json::to_value(config)?,
        csv: None,
        rows: None,
        report,
        passed,
        summary,
    })
}

/// Run `f` on a pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("building worker pool")?;
    Ok(pool.install(f))
}

pub fn geometry(lx: usize, ly: usize) -> Result<RunOutcome> {
    let g = LatticeGeometry::new(lx, ly)?;
    let rep = GeometryReport::new(&g);
    let summary = format!(
        "{lx}x{ly}: {} links, {} vertices, {} plaquettes, k = {}\n{}",
        rep.n_links,
        rep.n_vertices,
        rep.n_plaquettes,
        rep.logical_qubits,
        g.render_ascii()
    );
    let mut report = serde_json::to_value(&rep)?;
    report["ascii"] = json!(g.render_ascii());
    outcome("geometry", &json!({"lx": lx, "ly": ly}), report, true, summary)
}

pub fn code_check(lx: usize, ly: usize) -> Result<RunOutcome> {
    let g = LatticeGeometry::new(lx, ly)?;
    let tc = verify_code(&g, &build_tc_code(&g)?)?;
    let lghm = verify_code(&g, &build_lghm_code(&g)?)?;
    let passed = tc.passed && lghm.passed;
    let summary = format!(
        "{lx}x{ly}: toric code n={} stabilizers={} k={} [{}]; gauge-Higgs n={} stabilizers={} k={} [{}]",
        tc.n_qubits,
        tc.stabilizer_generators,
        tc.logical_qubits,
        if tc.passed { "ok" } else { "FAIL" },
        lghm.n_qubits,
        lghm.stabilizer_generators,
        lghm.logical_qubits,
        if lghm.passed { "ok" } else { "FAIL" },
    );
    outcome(
        "code-check",
        &json!({"lx": lx, "ly": ly}),
        json!({"toric_code": tc, "gauge_higgs": lghm, "passed": passed}),
        passed,
        summary,
    )
}

pub fn map_verify(lx: usize, ly: usize, js: &[f64], tol: f64) -> Result<RunOutcome> {
    let g = LatticeGeometry::new(lx, ly)?;
    let rep = verify_mapping(&g, js, tol)?;
    let worst = rep
        .checks
        .iter()
        .map(|c| {
            c.spectrum_dev_symbolic
                .max(c.spectrum_dev_circuit)
                .max(c.matrix_dev_symbolic)
                .max(c.matrix_dev_circuit)
        })
        .fold(0.0, f64::max);
    let summary = format!(
        "{lx}x{ly} ({} qubits): worst deviation {worst:.3e} at tol {tol:e}, logicals invariant: {} [{}]",
        rep.n_lghm_qubits,
        rep.logical_x_invariant && rep.logical_z_invariant,
        if rep.passed { "ok" } else { "FAIL" }
    );
    let passed = rep.passed;
    outcome(
        "map-verify",
        &json!({"lx": lx, "ly": ly, "j": js, "tol": tol}),
        serde_json::to_value(&rep)?,
        passed,
        summary,
    )
}

pub fn rbim_oracle(
    lx: usize,
    ly: usize,
    ps: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
    keep_pairs: bool,
) -> Result<RunOutcome> {
    let g = LatticeGeometry::new(lx, ly)?;
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    for (k, &p) in ps.iter().enumerate() {
        let mut rep = run_oracle(&g, p, samples, seed_derive(seed, k as u64), tol)?;
        lines.push(format!(
            "p={p}: worst relative residual {:.3e} over {} pairs ({} same-class) [{}]",
            rep.worst_relative_residual,
            rep.samples,
            rep.same_class_pairs,
            if rep.passed { "ok" } else { "FAIL" }
        ));
        if !keep_pairs {
            rep.pairs.clear();
        }
        reports.push(rep);
    }
    let passed = reports.iter().all(|r| r.passed);
    let worst = reports.iter().map(|r| r.worst_relative_residual).fold(0.0, f64::max);
    outcome(
        "rbim-oracle",
        &json!({"lx": lx, "ly": ly, "p": ps, "samples": samples, "seed": seed, "tol": tol}),
        json!({"passed": passed, "worst_relative_residual": worst, "reports": reports}),
        passed,
        lines.join("\n"),
    )
}

/// Scan spec and observable names from a config.
pub fn scan_spec(cfg: &ScanConfig) -> Result<ScanSpec> {
    if cfg.model != HamiltonianModel::Tc {
        bail!("scans run on the toric-code register; set model = \"tc\" (got {})", cfg.model);
    }
    let g = LatticeGeometry::new(cfg.lx, cfg.ly)?;
    let mut spec = ScanSpec::new(cfg.lx, cfg.ly, cfg.j.values().context("j")?, cfg.p_x.values().context("p_x")?);
    if cfg.observables.is_empty() {
        let (_, op) = default_gauge_observable(&g)?;
        spec.observables.push(Observable {
            name: "o_g".into(),
            op,
        });
    }
    for o in &cfg.observables {
        spec.observables.push(Observable {
            name: o.name.clone(),
            op: plaquette_average(&g, &o.plaquettes).with_context(|| format!("observable {}", o.name))?,
        });
    }
    spec.top_k = cfg.top_k;
    spec.log_base = cfg.log_base;
    spec.kraus_cap = cfg.kraus_cap;
    spec.sector = cfg.sector;
    spec.seed = cfg.seed;
    spec.validate()?;
    Ok(spec)
}

pub fn scan(cfg: &ScanConfig) -> Result<RunOutcome> {
    let spec = scan_spec(cfg)?;
    let hash = config_hash("scan", cfg)?;
    let rows = run_scan(&spec)?;
    let mut header: Vec<String> = [
        "j",
        "p_x",
        "status",
        "error",
        "entropy",
        "log_base",
        "purity",
        "rank",
        "logical_z",
        "ground_energy",
        "degeneracy",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for o in &spec.observables {
        header.push(format!("{}_mean", o.name));
        header.push(format!("{}_var", o.name));
    }
    let mut table = CsvTable::new(SCAN_FORMAT, &hash, &header)?;
    let mut errors = 0;
    for r in &rows {
        errors += r.error.is_some() as usize;
        let mut f = vec![
            fmt_f64(r.j),
            fmt_f64(r.p_x),
            if r.error.is_some() { "error" } else { "ok" }.to_string(),
            r.error.clone().unwrap_or_else(|| NA.into()),
            fmt_opt(r.entropy),
            spec.log_base.label().to_string(),
            fmt_opt(r.purity),
            r.rank.map_or_else(|| NA.into(), |v| v.to_string()),
            fmt_opt(r.logical_z),
            fmt_opt(r.ground_energy),
            r.degeneracy.map_or_else(|| NA.into(), |v| v.to_string()),
        ];
        for o in &r.observables {
            f.push(fmt_opt(o.as_ref().map(|v| v.mean)));
            f.push(fmt_opt(o.as_ref().map(|v| v.variance)));
        }
        table.push(f)?;
    }
    let n = table.rows();
    let mut out = outcome(
        "scan",
        cfg,
        json!({"rows": n, "errored_rows": errors, "observables": spec.observables.iter().map(|o| &o.name).collect::<Vec<_>>()}),
        errors == 0,
        format!("{n} rows, {errors} errored"),
    )?;
    out.csv = Some(table.into_bytes()?);
    out.rows = Some(n);
    Ok(out)
}

pub fn coupling_spec(cfg: &ScanConfig) -> Result<(CouplingSpec, Vec<f64>)> {
    let g = LatticeGeometry::new(cfg.lx, cfg.ly)?;
    let c = cfg.coupling.clone().unwrap_or(crate::config::CouplingConfig {
        plaquettes: None,
        logical: None,
        dt: vec![ghlab_core::stability::DEFAULT_DT],
    });
    if c.dt.is_empty() {
        bail!("coupling.dt is empty");
    }
    let mut spec = match &c.plaquettes {
        Some(ps) => CouplingSpec::with_plaquettes(&g, ps, c.dt[0])?,
        None => CouplingSpec::default_for(&g)?,
    };
    spec.dt = c.dt[0];
    if let Some(l) = &c.logical {
        spec.logical_op = l.parse::<PauliOperator>().context("coupling.logical")?;
    }
    for &dt in &c.dt {
        CouplingSpec { dt, ..spec.clone() }
            .validate(&g)
            .with_context(|| format!("coupling with dt = {dt}"))?;
    }
    Ok((spec, c.dt))
}

pub fn stability(cfg: &ScanConfig) -> Result<RunOutcome> {
    let spec = scan_spec(cfg)?;
    let (coupling, dts) = coupling_spec(cfg)?;
    let hash = config_hash("stability", cfg)?;
    let rows = stability_scan(&spec, &coupling, &dts)?;
    let header: Vec<String> = [
        "j",
        "p_x",
        "dt",
        "status",
        "error",
        "mean",
        "variance",
        "f_exact_re",
        "f_exact_im",
        "abs_f_exact",
        "f_cumulant_re",
        "f_cumulant_im",
        "abs_f_cumulant",
        "coherence_loss",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut table = CsvTable::new(STABILITY_FORMAT, &hash, &header)?;
    let mut errors = 0;
    for r in &rows {
        errors += r.error.is_some() as usize;
        table.push(vec![
            fmt_f64(r.j),
            fmt_f64(r.p_x),
            fmt_f64(r.dt),
            if r.error.is_some() { "error" } else { "ok" }.to_string(),
            r.error.clone().unwrap_or_else(|| NA.into()),
            fmt_opt(r.mean),
            fmt_opt(r.variance),
            fmt_opt(r.exact_f.map(|c| c.0)),
            fmt_opt(r.exact_f.map(|c| c.1)),
            fmt_opt(r.abs_exact_f),
            fmt_opt(r.cumulant_f.map(|c| c.0)),
            fmt_opt(r.cumulant_f.map(|c| c.1)),
            fmt_opt(r.abs_cumulant_f),
            fmt_opt(r.coherence_loss),
        ])?;
    }
    let n = table.rows();
    let mut out = outcome(
        "stability",
        cfg,
        json!({"rows": n, "errored_rows": errors, "logical_op": coupling.logical_op.to_string()}),
        errors == 0,
        format!("{n} rows, {errors} errored"),
    )?;
    out.csv = Some(table.into_bytes()?);
    out.rows = Some(n);
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
struct McPoint {
    l: usize,
    p: f64,
    beta: f64,
}

fn mc_points(cfg: &McRunConfig) -> Result<Vec<McPoint>> {
    if cfg.sizes.is_empty() {
        bail!("sizes is empty");
    }
    let ps = cfg.p.values().context("p")?;
    let mut pts = Vec::new();
    for &l in &cfg.sizes {
        match cfg.line {
            McLine::Nishimori => {
                if cfg.beta.is_some() {
                    bail!("beta must not be set on the Nishimori line");
                }
                for &p in &ps {
                    let beta = nishimori_beta(p)?.value();
                    if !beta.is_finite() {
                        bail!("p = 0 has infinite Nishimori beta; use line = \"fixed-beta\"");
                    }
                    pts.push(McPoint { l, p, beta });
                }
            }
            McLine::FixedBeta => {
                let betas = cfg
                    .beta
                    .as_ref()
                    .context("line = \"fixed-beta\" needs a beta grid")?
                    .values()
                    .context("beta")?;
                for &p in &ps {
                    for &beta in &betas {
                        pts.push(McPoint { l, p, beta });
                    }
                }
            }
        }
    }
    Ok(pts)
}

/// Crossings of consecutive sizes along the varying parameter.
fn mc_crossings(cfg: &McRunConfig, pts: &[McPoint], binder: &[f64]) -> Vec<serde_json::Value> {
    let per_size = pts.len() / cfg.sizes.len();
    let x: Vec<f64> = pts[..per_size]
        .iter()
        .map(|p| match cfg.line {
            McLine::Nishimori => p.p,
            McLine::FixedBeta => p.beta.tanh(),
        })
        .collect();
    // Only a single curve per size is meaningful for a crossing.
    let single_curve = cfg.line == McLine::Nishimori || pts[..per_size].iter().all(|q| q.p == pts[0].p);
    if !single_curve {
        return Vec::new();
    }
    cfg.sizes
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let a = &binder[k * per_size..(k + 1) * per_size];
            let b = &binder[(k + 1) * per_size..(k + 2) * per_size];
            json!({
                "sizes": w,
                "axis": if cfg.line == McLine::Nishimori { "p" } else { "tanh_beta" },
                "crossing": binder_crossing(&x, a, b),
            })
        })
        .collect()
}

pub fn rbim_mc(cfg: &McRunConfig) -> Result<RunOutcome> {
    let pts = mc_points(cfg)?;
    let hash = config_hash("rbim-mc", cfg)?;
    let results: Vec<Result<ghlab_core::rbim::McEstimate, String>> = pts
        .par_iter()
        .enumerate()
        .map(|(k, pt)| {
            mc_estimate(&McConfig {
                l: pt.l,
                p: pt.p,
                beta: pt.beta,
                sweeps: cfg.sweeps,
                thermalization: cfg.thermalization,
                replicas: cfg.replicas,
                seed: seed_derive(cfg.seed, k as u64),
            })
            .map_err(|e| e.to_string())
        })
        .collect();
    let header: Vec<String> = [
        "line",
        "l",
        "p",
        "beta",
        "replicas",
        "sweeps",
        "thermalization",
        "status",
        "error",
        "energy",
        "energy_err",
        "abs_m",
        "abs_m_err",
        "m2",
        "m4",
        "binder",
        "binder_err",
        "thermalized",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut table = CsvTable::new(MC_FORMAT, &hash, &header)?;
    let line = match cfg.line {
        McLine::Nishimori => "nishimori",
        McLine::FixedBeta => "fixed-beta",
    };
    let mut binder = Vec::with_capacity(pts.len());
    let mut errors = 0;
    let mut unthermalized = 0;
    for (pt, r) in pts.iter().zip(&results) {
        let mut f = vec![
            line.to_string(),
            pt.l.to_string(),
            fmt_f64(pt.p),
            fmt_f64(pt.beta),
            cfg.replicas.to_string(),
            cfg.sweeps.to_string(),
            cfg.thermalization.to_string(),
        ];
        match r {
            Ok(e) => {
                binder.push(e.binder);
                unthermalized += !e.thermalized as usize;
                f.extend([
                    "ok".to_string(),
                    NA.to_string(),
                    fmt_f64(e.energy),
                    fmt_f64(e.energy_err),
                    fmt_f64(e.abs_m),
                    fmt_f64(e.abs_m_err),
                    fmt_f64(e.m2),
                    fmt_f64(e.m4),
                    fmt_f64(e.binder),
                    fmt_f64(e.binder_err),
                    e.thermalized.to_string(),
                ]);
            }
            Err(msg) => {
                errors += 1;
                binder.push(f64::NAN);
                f.extend(["error".to_string(), msg.clone()]);
                f.extend(std::iter::repeat_n(NA.to_string(), 9));
            }
        }
        table.push(f)?;
    }
    let crossings = mc_crossings(cfg, &pts, &binder);
    let n = table.rows();
    let mut out = outcome(
        "rbim-mc",
        cfg,
        json!({"rows": n, "errored_rows": errors, "unthermalized_rows": unthermalized, "crossings": crossings}),
        errors == 0,
        format!("{n} points, {errors} errored, {unthermalized} flagged as not thermalized"),
    )?;
    out.csv = Some(table.into_bytes()?);
    out.rows = Some(n);
    Ok(out)
}
