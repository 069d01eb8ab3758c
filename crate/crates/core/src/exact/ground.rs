//! Symmetry-resolved ground states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GhError, Result};
use crate::lattice::{LatticeGeometry, LghmLayout};
use crate::pauli::PauliOperator;

use super::hamiltonian::{HamiltonianModel, HamiltonianSpec};
use super::lanczos::{lowest_eigenpair, LanczosOptions};
use super::state::{inner, StateVector};
use super::SparseMatrix;

/// Joint eigenvalues of `P̃` (product of all stars), `S̃_Z` (product of all
/// plaquettes) and `L_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    pub p: i8,
    pub sz: i8,
    pub lz: i8,
}

impl Sector {
    pub const PLUS: Sector = Sector { p: 1, sz: 1, lz: 1 };
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = |v: i8| if v > 0 { '+' } else { '-' };
        write!(f, "(P={}, SZ={}, Lz={})", s(self.p), s(self.sz), s(self.lz))
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub state: StateVector,
    pub energy: f64,
    /// Dimension of the ground space at tolerance `degeneracy_tol`.
    pub degeneracy: usize,
    /// Number of ground-space states in the requested sector.
    pub sector_degeneracy: usize,
    /// `⟨H²⟩ - ⟨H⟩²` on the returned state.
    pub energy_variance: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct GroundOptions {
    pub lanczos: LanczosOptions,
    pub degeneracy_tol: f64,
    pub max_degeneracy: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        Self {
            lanczos: LanczosOptions::default(),
            degeneracy_tol: 1e-9,
            max_degeneracy: 16,
        }
    }
}

/// Symmetry operators `(P̃, S̃_Z, L_z)` in the register of `model`.
pub fn sector_operators(model: HamiltonianModel, geom: &LatticeGeometry) -> [PauliOperator; 3] {
    let ops = [geom.rough_product(), geom.smooth_product(), geom.logical_z()];
    match model {
        HamiltonianModel::Tc => ops,
        _ => {
            let lay = LghmLayout::new(geom);
            ops.map(|o| lay.embed_links(&o))
        }
    }
}

/// Orthonormal basis of the lowest eigenspace, found by repeated deflated
/// Lanczos until the next eigenvalue lies above `E0 + degeneracy_tol`.
pub fn ground_space(h: &SparseMatrix, opts: &GroundOptions) -> Result<(Vec<f64>, Vec<Vec<Complex64>>, f64)> {
    let mut vecs: Vec<Vec<Complex64>> = Vec::new();
    let mut energies: Vec<f64> = Vec::new();
    let mut worst_residual: f64 = 0.0;
    loop {
        let pair = lowest_eigenpair(h, &vecs, &opts.lanczos)?;
        if let Some(&e0) = energies.first() {
            if pair.value > e0 + opts.degeneracy_tol {
                break;
            }
        }
        worst_residual = worst_residual.max(pair.residual);
        energies.push(pair.value);
        vecs.push(pair.vector);
        if vecs.len() >= opts.max_degeneracy || vecs.len() == h.dim() {
            break;
        }
    }
    Ok((energies, vecs, worst_residual))
}

/// Restrict the span of `basis` to the `target` eigenspace of `op`.
fn select_eigenspace(
    basis: &[Vec<Complex64>],
    op: &PauliOperator,
    target: f64,
) -> Result<Vec<Vec<Complex64>>> {
    let d = basis.len();
    let images: Vec<StateVector> = basis
        .iter()
        .map(|b| StateVector::from_amplitudes(op.n_qubits(), b.clone())?.apply_pauli(op))
        .collect::<Result<_>>()?;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = inner(&basis[i], images[j].amplitudes());
        }
    }
    // Symmetrise against rounding before the Hermitian solver.
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = m.symmetric_eigen();
    let mut out = Vec::new();
    for k in 0..d {
        if (eig.eigenvalues[k] - target).abs() < 1e-6 {
            let col = eig.eigenvectors.column(k);
            let mut v = vec![Complex64::new(0.0, 0.0); basis[0].len()];
            for (i, b) in basis.iter().enumerate() {
                let c = col[i];
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += c * bi;
                }
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Lowest-energy state of `h` in the requested symmetry sector.
///
/// The ground space is resolved by simultaneous diagonalisation of `P̃`,
/// `S̃_Z` and `L_z` within it; fails with `SectorNotFound` if the sector is
/// absent from the ground space.
pub fn ground_state_in_sector(
    h: &HamiltonianSpec,
    geom: &LatticeGeometry,
    sector: Sector,
    opts: &GroundOptions,
) -> Result<GroundState> {
    let ops = sector_operators(h.model, geom);
    for op in &ops {
        for (_, t) in h.terms.terms() {
            if !op.commutes(t)? {
                return Err(GhError::Unsupported(format!(
                    "sector operator {op} does not commute with the Hamiltonian"
                )));
            }
        }
    }
    let sparse = h.terms.to_sparse()?;
    let (_, mut basis, residual) = ground_space(&sparse, opts)?;
    let degeneracy = basis.len();
    let targets = [sector.p, sector.sz, sector.lz];
    for (op, &t) in ops.iter().zip(&targets) {
        basis = select_eigenspace(&basis, op, t as f64)?;
        if basis.is_empty() {
            return Err(GhError::SectorNotFound(sector.to_string()));
        }
    }
    let sector_degeneracy = basis.len();
    let mut state = StateVector::from_amplitudes(h.n_qubits(), basis.swap_remove(0))?;
    state.normalize();
    state.canonicalize_phase();
    let hv = sparse.apply(state.amplitudes());
    let e = inner(state.amplitudes(), &hv).re;
    let h2 = inner(&hv, &hv).re;
    Ok(GroundState {
        energy: e,
        energy_variance: (h2 - e * e).max(0.0),
        degeneracy,
        sector_degeneracy,
        residual,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{build_hamiltonian, expectation};

    #[test]
    fn tc_j0_is_stabilizer_state() {
        let g = LatticeGeometry::new(3, 2).unwrap();
        let h = build_hamiltonian(HamiltonianModel::Tc, &g, 0.0).unwrap();
        let gs = ground_state_in_sector(&h, &g, Sector::PLUS, &GroundOptions::default()).unwrap();
        assert!((gs.energy + 12.0).abs() < 1e-10);
        assert_eq!(gs.degeneracy, 2);
        assert_eq!(gs.sector_degeneracy, 1);
        for v in 0..6 {
            assert!((expectation(&gs.state, &g.star(v)).unwrap() - 1.0).abs() < 1e-10);
            assert!((expectation(&gs.state, &g.plaquette(v)).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!((expectation(&gs.state, &g.logical_z()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn missing_sector_reported() {
        let g = LatticeGeometry::new(2, 1).unwrap();
        let h = build_hamiltonian(HamiltonianModel::Tc, &g, 0.0).unwrap();
        let bad = Sector { p: -1, sz: 1, lz: 1 };
        assert!(matches!(
            ground_state_in_sector(&h, &g, bad, &GroundOptions::default()),
            Err(GhError::SectorNotFound(_))
        ));
    }
}
