//! Verification that the mapping circuit carries the gauge-Higgs
//! Hamiltonian to the toric code in the gauge-fixed sector.
//!
//! Two independent routes are compared against `H_TC`:
//! symbolic conjugation of every Pauli term followed by sector restriction,
//! and matrix elements `⟨s(b')| U H U† |s(b)⟩` computed by running the
//! circuit on state vectors, where `|s(b)⟩ = |+⟩_v |0⟩_p |b⟩_links`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{GhError, Result};
use crate::lattice::{LatticeGeometry, LghmLayout};
use crate::seed::stream_rng;

use super::circuit::{mapping_circuit, plaquette_circuit, restrict_sum_to_sector, Direction};
use super::hamiltonian::{build_hamiltonian, HamiltonianModel};
use super::{PauliSum, StateVector};

/// Largest gauge-Higgs register accepted by [`verify_mapping`].
pub const MAX_MAPPING_QUBITS: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct MappingCheck {
    pub j: f64,
    /// Conjugated terms all preserve the gauge-fixed sector.
    pub sector_closed: bool,
    pub spectrum_dev_symbolic: f64,
    pub spectrum_dev_circuit: f64,
    pub matrix_dev_symbolic: f64,
    pub matrix_dev_circuit: f64,
    /// Weight of `U H U† |s(b)⟩` outside the gauge-fixed sector, worst `b`.
    pub leakage: f64,
    /// After the plaquette transformation alone, restricted to `Z_p = +1`,
    /// the terms coincide with the intermediate gauge-Higgs Hamiltonian.
    pub gh_terms_match: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MappingReport {
    pub lx: usize,
    pub ly: usize,
    pub n_lghm_qubits: usize,
    pub n_links: usize,
    pub tol: f64,
    pub logical_x_invariant: bool,
    pub logical_z_invariant: bool,
    pub round_trip_error: f64,
    pub checks: Vec<MappingCheck>,
    pub passed: bool,
}

fn dense_hermitian_spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    ev
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn spectrum_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn verify_mapping(geom: &LatticeGeometry, j_values: &[f64], tol: f64) -> Result<MappingReport> {
    let lay = LghmLayout::new(geom);
    let n = lay.n_qubits();
    if n > MAX_MAPPING_QUBITS {
        return Err(GhError::StateTooLarge {
            n,
            limit: MAX_MAPPING_QUBITS,
        });
    }
    let nl = geom.n_links();
    let off = lay.link_offset();
    let x_fixed: Vec<usize> = (0..geom.n_vertices()).map(|v| lay.vertex(v)).collect();
    let z_fixed: Vec<usize> = (0..geom.n_plaquettes()).map(|p| lay.plaquette(p)).collect();
    let u = mapping_circuit(geom);
    let up = plaquette_circuit(geom);

    let lx_op = lay.embed_links(&geom.logical_x());
    let lz_op = lay.embed_links(&geom.logical_z());
    let logical_x_invariant = u.conjugate(&lx_op, Direction::Forward)? == lx_op;
    let logical_z_invariant = u.conjugate(&lz_op, Direction::Forward)? == lz_op;

    let mut rng = stream_rng(0x006d_6170, 0);
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut psi = StateVector::from_amplitudes(n, amps)?;
    psi.normalize();
    let mut round = psi.clone();
    u.apply_state(&mut round, Direction::Forward)?;
    u.apply_state(&mut round, Direction::Inverse)?;
    let round_trip_error = psi
        .amplitudes()
        .iter()
        .zip(round.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    let mut checks = Vec::new();
    for &j in j_values {
        let h_lghm = build_hamiltonian(HamiltonianModel::Lghm, geom, j)?;
        let h_tc = build_hamiltonian(HamiltonianModel::Tc, geom, j)?;
        let tc_dense = h_tc.terms.to_sparse()?.to_dense();
        let tc_spec = dense_hermitian_spectrum(&tc_dense);

        // Symbolic route.
        let conj = u.conjugate_sum(&h_lghm.terms, Direction::Forward)?;
        let restricted = restrict_sum_to_sector(&conj, &x_fixed, &z_fixed, off..n);
        let sector_closed = restricted.is_some();
        let (spectrum_dev_symbolic, matrix_dev_symbolic) = match &restricted {
            Some(r) => {
                let d = r.to_sparse()?.to_dense();
                (spectrum_diff(&dense_hermitian_spectrum(&d), &tc_spec), max_abs_diff(&d, &tc_dense))
            }
            None => (f64::INFINITY, f64::INFINITY),
        };

        // Circuit route.
        let sparse = h_lghm.terms.to_sparse()?;
        let dim_l = 1usize << nl;
        let nv = geom.n_vertices();
        let amp_v = (0.5f64).powf(nv as f64 / 2.0);
        let mut m = DMatrix::<Complex64>::zeros(dim_l, dim_l);
        let mut leakage: f64 = 0.0;
        for b in 0..dim_l {
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
            for vb in 0..1usize << nv {
                amps[vb | (b << off)] = Complex64::new(amp_v, 0.0);
            }
            let mut s = StateVector::from_amplitudes(n, amps)?;
            u.apply_state(&mut s, Direction::Inverse)?;
            let mut w = StateVector::from_amplitudes(n, sparse.apply(s.amplitudes()))?;
            u.apply_state(&mut w, Direction::Forward)?;
            let wa = w.amplitudes();
            for bp in 0..dim_l {
                let mut acc = Complex64::new(0.0, 0.0);
                for vb in 0..1usize << nv {
                    acc += wa[vb | (bp << off)] * amp_v;
                }
                m[(bp, b)] = acc;
            }
            // Distance of w from its projection onto the sector.
            let mut out_sq = 0.0;
            for (i, a) in wa.iter().enumerate() {
                let plaquettes_clear = (i >> nv) & ((1usize << geom.n_plaquettes()) - 1) == 0;
                let proj = if plaquettes_clear {
                    m[(i >> off, b)] * amp_v
                } else {
                    Complex64::new(0.0, 0.0)
                };
                out_sq += (a - proj).norm_sqr();
            }
            leakage = leakage.max(out_sq.sqrt());
        }
        let spectrum_dev_circuit = spectrum_diff(&dense_hermitian_spectrum(&m), &tc_spec);
        let matrix_dev_circuit = max_abs_diff(&m, &tc_dense);

        // Intermediate model.
        let h_gh = build_hamiltonian(HamiltonianModel::Gh, geom, j)?;
        let after_up = up.conjugate_sum(&h_lghm.terms, Direction::Forward)?;
        let gh_terms_match = match (
            restrict_sum_to_sector(&after_up, &[], &z_fixed, 0..n),
            restrict_sum_to_sector(&h_gh.terms, &[], &z_fixed, 0..n),
        ) {
            (Some(a), Some(b)) => strip_plaquettes(&a, &z_fixed).approx_eq(&strip_plaquettes(&b, &z_fixed), tol),
            _ => false,
        };

        let passed = sector_closed
            && spectrum_dev_symbolic <= tol
            && spectrum_dev_circuit <= tol
            && matrix_dev_symbolic <= tol
            && matrix_dev_circuit <= tol
            && leakage <= tol
            && gh_terms_match;
        checks.push(MappingCheck {
            j,
            sector_closed,
            spectrum_dev_symbolic,
            spectrum_dev_circuit,
            matrix_dev_symbolic,
            matrix_dev_circuit,
            leakage,
            gh_terms_match,
            passed,
        });
    }
    let passed = logical_x_invariant
        && logical_z_invariant
        && round_trip_error <= 1e-12
        && checks.iter().all(|c| c.passed);
    Ok(MappingReport {
        lx: geom.lx,
        ly: geom.ly,
        n_lghm_qubits: n,
        n_links: nl,
        tol,
        logical_x_invariant,
        logical_z_invariant,
        round_trip_error,
        checks,
        passed,
    })
}

/// Replace `Z` letters on the fixed plaquette qubits by identity.
fn strip_plaquettes(sum: &PauliSum, z_fixed: &[usize]) -> PauliSum {
    let mut out = PauliSum::new(sum.n_qubits());
    for (c, p) in sum.terms() {
        let mut q = p.clone();
        for &k in z_fixed {
            q.set_letter(k, 'I').expect("valid letter");
        }
        out.push(*c, q).expect("same size");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_geometry_maps_exactly() {
        let g = LatticeGeometry::new(2, 1).unwrap();
        let rep = verify_mapping(&g, &[0.0, 0.6], 1e-10).unwrap();
        assert!(rep.passed, "{rep:#?}");
    }
}
