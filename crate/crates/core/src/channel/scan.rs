//! Grid scans over the coupling `J` and the error probability `p_x`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result};
use crate::exact::{
    build_hamiltonian, ground_state_in_sector, GroundOptions, GroundState, HamiltonianModel, PauliSum, Sector,
};
use crate::lattice::LatticeGeometry;
use crate::seed::seed_derive;

use super::{decohere_links, entropy, observable_moments, purity, LogBase, DEFAULT_KRAUS_CAP};

#[derive(Clone, Debug)]
pub struct Observable {
    pub name: String,
    pub op: PauliSum,
}

#[derive(Clone, Debug)]
pub struct ScanSpec {
    pub lx: usize,
    pub ly: usize,
    pub j_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub observables: Vec<Observable>,
    pub top_k: Option<usize>,
    pub log_base: LogBase,
    pub kraus_cap: usize,
    pub sector: Sector,
    /// Master seed for the eigensolver start vectors.
    pub seed: u64,
}

impl ScanSpec {
    pub fn new(lx: usize, ly: usize, j_grid: Vec<f64>, p_grid: Vec<f64>) -> Self {
        Self {
            lx,
            ly,
            j_grid,
            p_grid,
            observables: Vec::new(),
            top_k: None,
            log_base: LogBase::Natural,
            kraus_cap: DEFAULT_KRAUS_CAP,
            sector: Sector::PLUS,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        LatticeGeometry::new(self.lx, self.ly)?;
        if self.j_grid.is_empty() || self.p_grid.is_empty() {
            return Err(invalid_param("grid", "[]", "grids must be non-empty"));
        }
        for &j in &self.j_grid {
            if !(j.is_finite() && j >= 0.0) {
                return Err(invalid_param("j", j, "must be finite and >= 0"));
            }
        }
        for &p in &self.p_grid {
            if !(0.0..=0.5).contains(&p) {
                return Err(invalid_param("p_x", p, "must lie in [0, 1/2]"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservableValue {
    pub mean: f64,
    pub variance: f64,
}

/// One grid point. Numerical fields are `None` when the row errored.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub j: f64,
    pub p_x: f64,
    pub error: Option<String>,
    pub entropy: Option<f64>,
    pub purity: Option<f64>,
    pub rank: Option<usize>,
    pub logical_z: Option<f64>,
    pub ground_energy: Option<f64>,
    pub degeneracy: Option<usize>,
    pub observables: Vec<Option<ObservableValue>>,
}

impl ScanRow {
    fn failed(j: f64, p_x: f64, n_obs: usize, msg: String) -> Self {
        Self {
            j,
            p_x,
            error: Some(msg),
            entropy: None,
            purity: None,
            rank: None,
            logical_z: None,
            ground_energy: None,
            degeneracy: None,
            observables: vec![None; n_obs],
        }
    }
}

/// Ground state of the toric-code Hamiltonian at coupling `j`, seeded from
/// the task stream `(seed, task)`.
pub fn tc_ground_state(geom: &LatticeGeometry, j: f64, sector: Sector, seed: u64, task: u64) -> Result<GroundState> {
    let h = build_hamiltonian(HamiltonianModel::Tc, geom, j)?;
    let mut opts = GroundOptions::default();
    opts.lanczos.seed = seed_derive(seed, task);
    ground_state_in_sector(&h, geom, sector, &opts)
}

fn evaluate_row(spec: &ScanSpec, geom: &LatticeGeometry, gs: &GroundState, j: f64, p: f64) -> Result<ScanRow> {
    let d = decohere_links(&gs.state, &geom.non_smooth_links(), p, spec.kraus_cap)?;
    let lz = d.pauli_expectation(&geom.logical_z())?.re;
    let mut observables = Vec::with_capacity(spec.observables.len());
    for o in &spec.observables {
        let (mean, variance) = observable_moments(&d, &o.op)?;
        observables.push(Some(ObservableValue { mean, variance }));
    }
    Ok(ScanRow {
        j,
        p_x: p,
        error: None,
        entropy: Some(entropy(&d, spec.top_k, spec.log_base)),
        purity: Some(purity(&d)),
        rank: Some(d.rank(1e-12)),
        logical_z: Some(lz),
        ground_energy: Some(gs.energy),
        degeneracy: Some(gs.degeneracy),
        observables,
    })
}

/// Rows in `j`-major order. Failures are recorded per row and the scan
/// continues. Output does not depend on the rayon thread count.
pub fn run_scan(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    spec.validate()?;
    let geom = LatticeGeometry::new(spec.lx, spec.ly)?;
    let n_obs = spec.observables.len();
    let grounds: Vec<Result<GroundState>> = spec
        .j_grid
        .par_iter()
        .enumerate()
        .map(|(k, &j)| tc_ground_state(&geom, j, spec.sector, spec.seed, k as u64))
        .collect();
    let rows = spec
        .j_grid
        .iter()
        .zip(&grounds)
        .flat_map(|(&j, gs)| spec.p_grid.iter().map(move |&p| (j, p, gs)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(j, p, gs)| match gs {
            Ok(gs) => evaluate_row(spec, &geom, gs, j, p)
                .unwrap_or_else(|e| ScanRow::failed(j, p, n_obs, e.to_string())),
            Err(e) => ScanRow::failed(j, p, n_obs, e.to_string()),
        })
        .collect();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::default_gauge_observable;

    #[test]
    fn single_point_equals_direct_call() {
        let g = LatticeGeometry::new(3, 2).unwrap();
        let (_, og) = default_gauge_observable(&g).unwrap();
        let mut spec = ScanSpec::new(3, 2, vec![0.5], vec![0.2]);
        spec.observables.push(Observable {
            name: "o_g".into(),
            op: og.clone(),
        });
        let rows = run_scan(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        let gs = tc_ground_state(&g, 0.5, Sector::PLUS, 0, 0).unwrap();
        let d = crate::channel::decohere(&gs.state, &g, 0.2).unwrap();
        assert_eq!(rows[0].entropy.unwrap(), entropy(&d, None, LogBase::Natural));
        let (m, v) = observable_moments(&d, &og).unwrap();
        let o = rows[0].observables[0].as_ref().unwrap();
        assert_eq!((o.mean, o.variance), (m, v));
    }
}
