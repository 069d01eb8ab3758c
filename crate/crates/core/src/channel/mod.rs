//! Dephasing of the non-smooth links and the information measures of the
//! resulting mixed state.
//!
//! The channel applies `σ^x_ℓ` with probability `p` independently on each
//! non-smooth link. Its output on a pure state is the mixture
//! `ρ = Σ_S w_S X_S|ψ⟩⟨ψ|X_S` over link subsets `S`, with
//! `w_S = p^|S| (1-p)^(n_d-|S|)`. The nonzero spectrum of `ρ` equals the
//! spectrum of the Gram matrix `G_{SS'} = √(w_S w_S') ⟨ψ|X_S X_S'|ψ⟩`, which
//! is real because every `X_T` is Hermitian.

pub mod scan;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, GhError, Result};
use crate::exact::{PauliSum, StateVector};
use crate::lattice::LatticeGeometry;
use crate::pauli::PauliOperator;

pub use scan::{run_scan, Observable, ScanRow, ScanSpec};

pub const DEFAULT_KRAUS_CAP: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e", alias = "natural", alias = "ln")]
    Natural,
    #[serde(rename = "2", alias = "two", alias = "bits")]
    Two,
}

impl LogBase {
    pub fn label(self) -> &'static str {
        match self {
            LogBase::Natural => "e",
            LogBase::Two => "2",
        }
    }

    fn ln_scale(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecoheredState {
    p_x: f64,
    base: StateVector,
    /// Dephased link ids, in increasing order; bit `k` of a branch index
    /// refers to `decohered[k]`.
    decohered: Vec<usize>,
    flip_masks: Vec<u64>,
    weights: Vec<f64>,
    eigenvalues: Vec<f64>,
}

/// Branch weights `w_S` indexed by subset mask.
pub fn branch_weights(n_d: usize, p: f64) -> Vec<f64> {
    (0..1usize << n_d)
        .map(|s| {
            let k = s.count_ones() as i32;
            p.powi(k) * (1.0 - p).powi(n_d as i32 - k)
        })
        .collect()
}

/// Dephase every non-smooth link of `psi` with probability `p_x`.
pub fn decohere(psi: &StateVector, geom: &LatticeGeometry, p_x: f64) -> Result<DecoheredState> {
    decohere_links(psi, &geom.non_smooth_links(), p_x, DEFAULT_KRAUS_CAP)
}

/// Dephase the given links with probability `p_x`.
pub fn decohere_links(psi: &StateVector, links: &[usize], p_x: f64, kraus_cap: usize) -> Result<DecoheredState> {
    if !(0.0..=0.5).contains(&p_x) {
        return Err(invalid_param("p_x", p_x, "must lie in [0, 1/2]"));
    }
    if links.len() > kraus_cap {
        return Err(GhError::TooManyKrausBranches {
            count: links.len(),
            cap: kraus_cap,
        });
    }
    let n = psi.n_qubits();
    if let Some(&bad) = links.iter().find(|&&l| l >= n) {
        return Err(GhError::QubitOutOfRange { qubit: bad, n });
    }
    let nrm = psi.norm();
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(invalid_param("psi", format!("norm {nrm}"), "state must be normalised"));
    }
    let mut decohered = links.to_vec();
    decohered.sort_unstable();
    decohered.dedup();
    let n_d = decohered.len();
    let flip_masks: Vec<u64> = (0..1usize << n_d)
        .map(|s| {
            decohered
                .iter()
                .enumerate()
                .filter(|(k, _)| s >> k & 1 == 1)
                .fold(0u64, |m, (_, &l)| m | 1 << l)
        })
        .collect();
    let weights = branch_weights(n_d, p_x);

    // Overlaps c(T) = ⟨ψ|X_T|ψ⟩ for every subset T.
    let amps = psi.amplitudes();
    let overlaps: Vec<f64> = flip_masks
        .par_iter()
        .map(|&t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, a) in amps.iter().enumerate() {
                acc += a.conj() * amps[b ^ t as usize];
            }
            acc.re
        })
        .collect();

    let dim = weights.len();
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let gram = DMatrix::<f64>::from_fn(dim, dim, |i, j| sq[i] * sq[j] * overlaps[i ^ j]);
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));

    Ok(DecoheredState {
        p_x,
        base: psi.clone(),
        decohered,
        flip_masks,
        weights,
        eigenvalues,
    })
}

impl DecoheredState {
    pub fn p_x(&self) -> f64 {
        self.p_x
    }

    pub fn base_state(&self) -> &StateVector {
        &self.base
    }

    pub fn decohered_links(&self) -> &[usize] {
        &self.decohered
    }

    pub fn branch_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn branch_masks(&self) -> &[u64] {
        &self.flip_masks
    }

    /// Spectrum of `ρ` restricted to the branch span, nonincreasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > tol).count()
    }

    /// Check the spectral invariants: eigenvalues not below `-1e-12`,
    /// summing to one within `1e-10`, weights summing to one.
    pub fn validate(&self) -> Result<()> {
        let wsum: f64 = self.weights.iter().sum();
        let esum: f64 = self.eigenvalues.iter().sum();
        let emin = self.eigenvalues.last().copied().unwrap_or(0.0);
        if (wsum - 1.0).abs() > 1e-12 || (esum - 1.0).abs() > 1e-10 || emin < -1e-12 {
            return Err(GhError::Unsupported(format!(
                "decohered state violates invariants: weight sum {wsum}, trace {esum}, min eigenvalue {emin}"
            )));
        }
        Ok(())
    }

    /// `⟨b|ρ|b'⟩` in the computational basis.
    pub fn matrix_element(&self, b: u64, b_prime: u64) -> Complex64 {
        let amps = self.base.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&m, &w) in self.flip_masks.iter().zip(&self.weights) {
            acc += amps[(b ^ m) as usize] * amps[(b_prime ^ m) as usize].conj() * w;
        }
        acc
    }

    /// `Tr[ρ P]` for a Pauli string, summed branch by branch using
    /// `X_S P X_S = (-1)^{|z(P) ∩ S|} P`.
    pub fn pauli_expectation(&self, op: &PauliOperator) -> Result<Complex64> {
        let n = self.base.n_qubits();
        if op.n_qubits() != n {
            return Err(GhError::DimensionMismatch {
                expected: n,
                found: op.n_qubits(),
            });
        }
        let amps = self.base.amplitudes();
        let mut base = Complex64::new(0.0, 0.0);
        for (b, &a) in amps.iter().enumerate() {
            let (t, amp) = op.act_on_basis(b as u64);
            base += amps[t as usize].conj() * amp * a;
        }
        let z = op.z_bits().to_mask();
        let mut sign_sum = 0.0;
        for (&m, &w) in self.flip_masks.iter().zip(&self.weights) {
            if (z & m).count_ones() % 2 == 0 {
                sign_sum += w;
            } else {
                sign_sum -= w;
            }
        }
        Ok(base * sign_sum)
    }

    /// `Tr[ρ O]` for a sum of Pauli strings.
    pub fn trace_with(&self, op: &PauliSum) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, p) in op.terms() {
            acc += c * self.pauli_expectation(p)?;
        }
        Ok(acc)
    }

    /// Dense `ρ`, for cross-checks on small registers.
    pub fn density_matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.base.n_qubits();
        if n > 12 {
            return Err(GhError::StateTooLarge { n, limit: 12 });
        }
        let dim = 1usize << n;
        let amps = self.base.amplitudes();
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for (&m, &w) in self.flip_masks.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            for i in 0..dim {
                let ai = amps[i ^ m as usize];
                if ai.norm() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    rho[(i, j)] += ai * amps[j ^ m as usize].conj() * w;
                }
            }
        }
        Ok(rho)
    }
}

/// `-Σ λ log λ` over the `top_k` largest eigenvalues (all if `None`).
pub fn entropy(d: &DecoheredState, top_k: Option<usize>, base: LogBase) -> f64 {
    let k = top_k.unwrap_or(usize::MAX);
    let s: f64 = d
        .eigenvalues()
        .iter()
        .take(k)
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    // A pure state gives -ε ln(1+ε) < 0 from rounding.
    s.max(0.0) / base.ln_scale()
}

/// `Σ λ²`.
pub fn purity(d: &DecoheredState) -> f64 {
    d.eigenvalues().iter().map(|l| l * l).sum()
}

/// Mean and variance of a Hermitian Pauli sum in the mixed state.
pub fn observable_moments(d: &DecoheredState, op: &PauliSum) -> Result<(f64, f64)> {
    if !op.is_hermitian() {
        return Err(GhError::NonHermitian(format!("{} term sum", op.len())));
    }
    let mean = d.trace_with(op)?.re;
    let sq = op.product(op)?;
    let second = d.trace_with(&sq)?.re;
    let var = second - mean * mean;
    // Rounding can push an exact zero slightly negative.
    Ok((mean, if var < 0.0 && var > -1e-12 { 0.0 } else { var }))
}

/// Average of the plaquette operators `B̃_p` over `plaquettes`.
pub fn plaquette_average(geom: &LatticeGeometry, plaquettes: &[usize]) -> Result<PauliSum> {
    if plaquettes.is_empty() {
        return Err(invalid_param("plaquettes", "[]", "need at least one plaquette"));
    }
    let w = 1.0 / plaquettes.len() as f64;
    let mut s = PauliSum::new(geom.n_links());
    for &p in plaquettes {
        if p >= geom.n_plaquettes() {
            return Err(invalid_param("plaquettes", p, "plaquette id out of range"));
        }
        s.push(w, geom.plaquette(p))?;
    }
    Ok(s)
}

/// Default gauge observable: average of the two adjacent bulk plaquettes
/// nearest the lattice centre.
pub fn default_gauge_observable(geom: &LatticeGeometry) -> Result<(Vec<usize>, PauliSum)> {
    let (a, b) = geom.central_plaquette_pair().ok_or_else(|| {
        invalid_param(
            "geometry",
            format!("{}x{}", geom.lx, geom.ly),
            "no pair of adjacent four-link plaquettes; choose plaquettes explicitly",
        )
    })?;
    Ok((vec![a, b], plaquette_average(geom, &[a, b])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{build_hamiltonian, ground_state_in_sector, GroundOptions, HamiltonianModel, Sector};

    fn tc_ground(lx: usize, ly: usize, j: f64) -> (LatticeGeometry, StateVector) {
        let g = LatticeGeometry::new(lx, ly).unwrap();
        let h = build_hamiltonian(HamiltonianModel::Tc, &g, j).unwrap();
        let gs = ground_state_in_sector(&h, &g, Sector::PLUS, &GroundOptions::default()).unwrap();
        (g, gs.state)
    }

    #[test]
    fn zero_noise_is_pure() {
        let (g, psi) = tc_ground(2, 2, 0.4);
        let d = decohere(&psi, &g, 0.0).unwrap();
        assert!((purity(&d) - 1.0).abs() < 1e-12);
        assert!(entropy(&d, None, LogBase::Natural).abs() < 1e-10);
        d.validate().unwrap();
    }

    #[test]
    fn gram_spectrum_matches_dense_density_matrix() {
        for (lx, ly) in [(2, 1), (2, 2)] {
            let (g, psi) = tc_ground(lx, ly, 0.6);
            let d = decohere(&psi, &g, 0.17).unwrap();
            let rho = d.density_matrix().unwrap();
            let mut dense: Vec<f64> = rho.symmetric_eigen().eigenvalues.iter().copied().collect();
            dense.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (i, &l) in dense.iter().enumerate() {
                let g = d.eigenvalues().get(i).copied().unwrap_or(0.0);
                assert!((l - g).abs() < 1e-10, "{lx}x{ly} eigenvalue {i}: {l} vs {g}");
            }
        }
    }

    #[test]
    fn branch_sum_matches_closed_form() {
        // Σ_S w_S (-1)^{|z ∩ S|} = (1-2p)^{|z ∩ D|}
        let (g, psi) = tc_ground(3, 2, 0.3);
        let p = 0.23;
        let d = decohere(&psi, &g, p).unwrap();
        for pl in 0..g.n_plaquettes() {
            let op = g.plaquette(pl);
            let pure = crate::exact::expectation(&psi, &op).unwrap();
            let m = g.plaquettes[pl].boundary.iter().filter(|l| !g.links[**l].is_smooth()).count();
            let want = pure * (1.0 - 2.0 * p).powi(m as i32);
            assert!((d.pauli_expectation(&op).unwrap().re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_probability_and_cap() {
        let (g, psi) = tc_ground(2, 1, 0.0);
        assert!(decohere(&psi, &g, 0.6).is_err());
        assert!(matches!(
            decohere_links(&psi, &g.non_smooth_links(), 0.1, 0),
            Err(GhError::TooManyKrausBranches { .. })
        ));
    }
}
