use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, GhError, Result};
use crate::lattice::{LatticeGeometry, LghmLayout};
use crate::pauli::PauliOperator;

use super::PauliSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianModel {
    /// Gauge-Higgs model with vertex and plaquette matter.
    Lghm,
    /// Gauge-Higgs model after the plaquette transformation; defined on the
    /// full gauge-Higgs register with plaquette qubits idle.
    Gh,
    /// Toric code with boundary-restricted fields, on the link register.
    Tc,
}

impl fmt::Display for HamiltonianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HamiltonianModel::Lghm => "lghm",
            HamiltonianModel::Gh => "gh",
            HamiltonianModel::Tc => "tc",
        })
    }
}

impl FromStr for HamiltonianModel {
    type Err = GhError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lghm" => Ok(HamiltonianModel::Lghm),
            "gh" => Ok(HamiltonianModel::Gh),
            "tc" => Ok(HamiltonianModel::Tc),
            other => Err(GhError::Unsupported(format!("unknown model tag '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    pub model: HamiltonianModel,
    pub lx: usize,
    pub ly: usize,
    pub j: f64,
    pub terms: PauliSum,
}

impl HamiltonianSpec {
    pub fn n_qubits(&self) -> usize {
        self.terms.n_qubits()
    }
}

pub fn build_hamiltonian(model: HamiltonianModel, geom: &LatticeGeometry, j: f64) -> Result<HamiltonianSpec> {
    if !(j >= 0.0 && j.is_finite()) {
        return Err(invalid_param("j", j, "coupling must be finite and >= 0"));
    }
    let terms = match model {
        HamiltonianModel::Tc => tc_terms(geom, j)?,
        HamiltonianModel::Lghm => lghm_terms(geom, j)?,
        HamiltonianModel::Gh => gh_terms(geom, j)?,
    };
    Ok(HamiltonianSpec {
        model,
        lx: geom.lx,
        ly: geom.ly,
        j,
        terms,
    })
}

/// `-Σ G̃_v - Σ B̃_p - J Σ_{non-rough} σ^z - J Σ_{non-smooth} σ^x`.
fn tc_terms(geom: &LatticeGeometry, j: f64) -> Result<PauliSum> {
    let n = geom.n_links();
    let mut h = PauliSum::new(n);
    for v in 0..geom.n_vertices() {
        h.push(-1.0, geom.star(v))?;
    }
    for p in 0..geom.n_plaquettes() {
        h.push(-1.0, geom.plaquette(p))?;
    }
    for l in geom.non_rough_links() {
        h.push(-j, PauliOperator::z_on(n, &[l]))?;
    }
    for l in geom.non_smooth_links() {
        h.push(-j, PauliOperator::x_on(n, &[l]))?;
    }
    Ok(h)
}

/// `-Σ X_v - J Σ X_p σ^x X_p' - Σ Z_p - J Σ Z_v σ^z Z_v'`.
fn lghm_terms(geom: &LatticeGeometry, j: f64) -> Result<PauliSum> {
    let lay = LghmLayout::new(geom);
    let n = lay.n_qubits();
    let mut h = PauliSum::new(n);
    for v in 0..geom.n_vertices() {
        h.push(-1.0, PauliOperator::x_on(n, &[lay.vertex(v)]))?;
    }
    for p in 0..geom.n_plaquettes() {
        h.push(-1.0, PauliOperator::z_on(n, &[lay.plaquette(p)]))?;
    }
    for link in &geom.links {
        if let [p, q] = link.plaquettes[..] {
            h.push(
                -j,
                PauliOperator::x_on(n, &[lay.plaquette(p), lay.plaquette(q), lay.link(link.id)]),
            )?;
        }
    }
    for link in &geom.links {
        if let [u, v] = link.vertices[..] {
            h.push(-j, PauliOperator::z_on(n, &[lay.vertex(u), lay.vertex(v), lay.link(link.id)]))?;
        }
    }
    Ok(h)
}

/// `-Σ X_v - J Σ_{non-smooth} σ^x - Σ B̃_p - J Σ Z_v σ^z Z_v'`.
fn gh_terms(geom: &LatticeGeometry, j: f64) -> Result<PauliSum> {
    let lay = LghmLayout::new(geom);
    let n = lay.n_qubits();
    let mut h = PauliSum::new(n);
    for v in 0..geom.n_vertices() {
        h.push(-1.0, PauliOperator::x_on(n, &[lay.vertex(v)]))?;
    }
    for l in geom.non_smooth_links() {
        h.push(-j, PauliOperator::x_on(n, &[lay.link(l)]))?;
    }
    for p in 0..geom.n_plaquettes() {
        h.push(-1.0, lay.embed_links(&geom.plaquette(p)))?;
    }
    for link in &geom.links {
        if let [u, v] = link.vertices[..] {
            h.push(-j, PauliOperator::z_on(n, &[lay.vertex(u), lay.vertex(v), lay.link(link.id)]))?;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_counts() {
        let g = LatticeGeometry::new(3, 2).unwrap();
        assert_eq!(build_hamiltonian(HamiltonianModel::Tc, &g, 0.5).unwrap().terms.len(), 26);
        let g = LatticeGeometry::new(2, 2).unwrap();
        let h = build_hamiltonian(HamiltonianModel::Lghm, &g, 1.0).unwrap();
        assert_eq!(h.n_qubits(), 15);
        // 4 X_v, 3 Z_p, 2 dual hoppings, 4 matter hoppings
        assert_eq!(h.terms.len(), 13);
    }

    #[test]
    fn negative_coupling_rejected() {
        let g = LatticeGeometry::new(2, 1).unwrap();
        assert!(build_hamiltonian(HamiltonianModel::Tc, &g, -0.1).is_err());
        assert!("xyz".parse::<HamiltonianModel>().is_err());
    }
}
