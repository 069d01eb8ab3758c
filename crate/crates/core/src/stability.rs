//! Logical dephasing from a coupling `V = L₀ ⊗ O_G` between a logical
//! operator and a gauge observable.
//!
//! For a short step `dt` the off-diagonal logical element picks up
//! `F = Tr[e^{-2i dt O_G} ρ] - 1`, evaluated here on the dephased toric-code
//! state. [`cumulant_f`] is its second-order cumulant approximation, which
//! differs from [`exact_f`] at order `dt³`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    decohere_links, default_gauge_observable, observable_moments, plaquette_average, DecoheredState, ScanSpec,
};
use crate::channel::scan::tc_ground_state;
use crate::error::{invalid_param, GhError, Result};
use crate::exact::state::inner;
use crate::exact::{PauliSum, SparseMatrix, StateVector};
use crate::lattice::LatticeGeometry;
use crate::pauli::PauliOperator;

pub const DEFAULT_DT: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct CouplingSpec {
    pub logical_op: PauliOperator,
    pub gauge_op: PauliSum,
    pub dt: f64,
}

impl CouplingSpec {
    /// `L₀ = L_x` and `O_G` the average of the central plaquette pair.
    pub fn default_for(geom: &LatticeGeometry) -> Result<Self> {
        let (_, og) = default_gauge_observable(geom)?;
        Ok(Self {
            logical_op: geom.logical_x(),
            gauge_op: og,
            dt: DEFAULT_DT,
        })
    }

    /// `L₀ = L_x` and `O_G` the average of the given plaquettes.
    pub fn with_plaquettes(geom: &LatticeGeometry, plaquettes: &[usize], dt: f64) -> Result<Self> {
        Ok(Self {
            logical_op: geom.logical_x(),
            gauge_op: plaquette_average(geom, plaquettes)?,
            dt,
        })
    }

    /// `dt > 0`, `L₀` anticommutes with `L_z`, `O_G` is Hermitian and each
    /// of its strings anticommutes with some dephasing operator `σ^x_ℓ`.
    pub fn validate(&self, geom: &LatticeGeometry) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid_param("dt", self.dt, "must be finite and > 0"));
        }
        let n = geom.n_links();
        if self.logical_op.n_qubits() != n || self.gauge_op.n_qubits() != n {
            return Err(GhError::DimensionMismatch {
                expected: n,
                found: if self.logical_op.n_qubits() != n {
                    self.logical_op.n_qubits()
                } else {
                    self.gauge_op.n_qubits()
                },
            });
        }
        if self.logical_op.commutes(&geom.logical_z())? {
            return Err(invalid_param(
                "logical_op",
                &self.logical_op,
                "must anticommute with L_z so the initial logical state is off-diagonal",
            ));
        }
        if !self.gauge_op.is_hermitian() {
            return Err(GhError::NonHermitian("gauge_op".into()));
        }
        let noise: Vec<PauliOperator> = geom
            .non_smooth_links()
            .into_iter()
            .map(|l| PauliOperator::x_on(n, &[l]))
            .collect();
        for (_, p) in self.gauge_op.terms() {
            let hit = noise.iter().map(|x| x.commutes(p)).collect::<Result<Vec<bool>>>()?;
            if hit.iter().all(|&c| c) {
                return Err(GhError::NotChannelCompatible(format!(
                    "gauge term {p} commutes with every dephasing operator"
                )));
            }
        }
        Ok(())
    }
}

/// `e^{-iθO}` for a Hermitian sum of commuting strings,
/// `∏_k (cos θc_k - i sin θc_k P_k)`.
fn commuting_exponential(op: &PauliSum, theta: f64) -> Result<PauliSum> {
    let n = op.n_qubits();
    let mut acc = PauliSum::new(n);
    acc.push(1.0, PauliOperator::identity(n))?;
    for (c, p) in op.simplify().terms() {
        let a = theta * c.re;
        let mut f = PauliSum::new(n);
        f.push(a.cos(), PauliOperator::identity(n))?;
        f.push(Complex64::new(0.0, -a.sin()), p.clone())?;
        acc = acc.product(&f)?;
    }
    Ok(acc)
}

/// `e^{tA} v` by scaled Taylor series.
fn expm_apply(a: &SparseMatrix, v: &[Complex64], t: Complex64) -> Vec<Complex64> {
    let steps = (t.norm() * a.inf_norm()).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut out = v.to_vec();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut sum = out.clone();
        for k in 1..=60 {
            term = a.apply(&term);
            let scale = h / k as f64;
            for x in term.iter_mut() {
                *x *= scale;
            }
            let mut tn = 0.0;
            for (s, x) in sum.iter_mut().zip(&term) {
                *s += x;
                tn += x.norm_sqr();
            }
            if tn.sqrt() < 1e-17 {
                break;
            }
        }
        out = sum;
    }
    out
}

/// `Tr[e^{-2i dt O} ρ] - 1`. Any finite `dt` is accepted so that
/// `F(-dt) = F(dt)*` can be checked.
pub fn exact_f(d: &DecoheredState, op: &PauliSum, dt: f64) -> Result<Complex64> {
    if !dt.is_finite() {
        return Err(invalid_param("dt", dt, "must be finite"));
    }
    if !op.is_hermitian() {
        return Err(GhError::NonHermitian("gauge_op".into()));
    }
    if op.mutually_commuting() {
        let u = commuting_exponential(op, 2.0 * dt)?;
        return Ok(d.trace_with(&u)? - 1.0);
    }
    exact_f_dense(d, op, dt)
}

/// [`exact_f`] by exponentiating on every branch state; used when the
/// strings of `op` do not commute.
pub fn exact_f_dense(d: &DecoheredState, op: &PauliSum, dt: f64) -> Result<Complex64> {
    let sparse = op.to_sparse()?;
    let base = d.base_state();
    let n = base.n_qubits();
    let t = Complex64::new(0.0, -2.0 * dt);
    let parts: Vec<Complex64> = d
        .branch_masks()
        .par_iter()
        .zip(d.branch_weights())
        .filter(|(_, &w)| w > 0.0)
        .map(|(&m, &w)| {
            let flip = PauliOperator::x_on(n, &(0..n).filter(|&q| m >> q & 1 == 1).collect::<Vec<_>>());
            let v: StateVector = base.apply_pauli(&flip)?;
            let u = expm_apply(&sparse, v.amplitudes(), t);
            Ok(inner(v.amplitudes(), &u) * w)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum::<Complex64>() - 1.0)
}

/// `e^{-2i dt ⟨O⟩} (1 - 2 dt² Var O) - 1`.
pub fn cumulant_f(mean: f64, variance: f64, dt: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * dt * mean) * (1.0 - 2.0 * dt * dt * variance) - 1.0
}

/// Change of the logical density matrix, `[[0, F], [F*, 0]]`.
pub fn logical_deviation(f: Complex64) -> [[Complex64; 2]; 2] {
    let z = Complex64::new(0.0, 0.0);
    [[z, f], [f.conj(), z]]
}

/// Least-squares slope of `log|exact_f - cumulant_f|` against `log dt`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AccuracyFit {
    pub slope: f64,
    pub intercept: f64,
    pub dts: Vec<f64>,
    pub deviations: Vec<f64>,
}

pub fn order_of_accuracy(d: &DecoheredState, op: &PauliSum, dts: &[f64]) -> Result<AccuracyFit> {
    if dts.len() < 2 || dts.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(invalid_param("dts", format!("{dts:?}"), "need at least two positive steps"));
    }
    let (mean, var) = observable_moments(d, op)?;
    let mut deviations = Vec::with_capacity(dts.len());
    for &dt in dts {
        deviations.push((exact_f(d, op, dt)? - cumulant_f(mean, var, dt)).norm());
    }
    let xs: Vec<f64> = dts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = deviations.iter().map(|e| e.ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(GhError::Unsupported(
            "cumulant expansion is exact on this state; no slope to fit".into(),
        ));
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(AccuracyFit {
        slope,
        intercept: my - slope * mx,
        dts: dts.to_vec(),
        deviations,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityRow {
    pub j: f64,
    pub p_x: f64,
    pub dt: f64,
    pub error: Option<String>,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub exact_f: Option<(f64, f64)>,
    pub abs_exact_f: Option<f64>,
    pub cumulant_f: Option<(f64, f64)>,
    pub abs_cumulant_f: Option<f64>,
    /// `1 - |1 + F|`, the loss of off-diagonal logical coherence.
    pub coherence_loss: Option<f64>,
}

impl StabilityRow {
    fn failed(j: f64, p_x: f64, dt: f64, msg: String) -> Self {
        Self {
            j,
            p_x,
            dt,
            error: Some(msg),
            mean: None,
            variance: None,
            exact_f: None,
            abs_exact_f: None,
            cumulant_f: None,
            abs_cumulant_f: None,
            coherence_loss: None,
        }
    }
}

/// Rows ordered by `j`, then `p_x`, then `dt`. The scan spec supplies the
/// geometry, grids, sector, seed and Kraus cap; its observables are unused.
pub fn stability_scan(spec: &ScanSpec, coupling: &CouplingSpec, dts: &[f64]) -> Result<Vec<StabilityRow>> {
    spec.validate()?;
    let geom = LatticeGeometry::new(spec.lx, spec.ly)?;
    for &dt in dts {
        CouplingSpec { dt, ..coupling.clone() }.validate(&geom)?;
    }
    let grounds: Vec<_> = spec
        .j_grid
        .par_iter()
        .enumerate()
        .map(|(k, &j)| tc_ground_state(&geom, j, spec.sector, spec.seed, k as u64))
        .collect();
    let links = geom.non_smooth_links();
    let tasks: Vec<_> = spec
        .j_grid
        .iter()
        .zip(&grounds)
        .flat_map(|(&j, gs)| spec.p_grid.iter().map(move |&p| (j, p, gs)))
        .collect();
    let rows: Vec<Vec<StabilityRow>> = tasks
        .into_par_iter()
        .map(|(j, p, gs)| {
            let eval = || -> Result<Vec<StabilityRow>> {
                let gs = gs.as_ref().map_err(|e| GhError::Unsupported(e.to_string()))?;
                let d = decohere_links(&gs.state, &links, p, spec.kraus_cap)?;
                let (mean, var) = observable_moments(&d, &coupling.gauge_op)?;
                dts.iter()
                    .map(|&dt| {
                        let fe = exact_f(&d, &coupling.gauge_op, dt)?;
                        let fc = cumulant_f(mean, var, dt);
                        Ok(StabilityRow {
                            j,
                            p_x: p,
                            dt,
                            error: None,
                            mean: Some(mean),
                            variance: Some(var),
                            exact_f: Some((fe.re, fe.im)),
                            abs_exact_f: Some(fe.norm()),
                            cumulant_f: Some((fc.re, fc.im)),
                            abs_cumulant_f: Some(fc.norm()),
                            coherence_loss: Some(1.0 - (fe + 1.0).norm()),
                        })
                    })
                    .collect()
            };
            eval().unwrap_or_else(|e| {
                dts.iter()
                    .map(|&dt| StabilityRow::failed(j, p, dt, e.to_string()))
                    .collect()
            })
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}
