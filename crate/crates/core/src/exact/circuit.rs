//! Hadamard/CZ circuits acting on states and, by conjugation, on Pauli
//! operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GhError, Result};
use crate::lattice::{LatticeGeometry, LghmLayout};
use crate::pauli::{Phase, PauliOperator};

use super::{PauliSum, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    Cz(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `U`
    Forward,
    /// `U†`
    Inverse,
}

/// Gate list applied left to right: `U = g_k ... g_2 g_1`.
#[derive(Clone, Debug)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, g: Gate) {
        match g {
            Gate::H(q) => assert!(q < self.n),
            Gate::Cz(a, b) => assert!(a < self.n && b < self.n && a != b),
        }
        self.gates.push(g);
    }

    /// `other` after `self`.
    pub fn then(mut self, other: &Circuit) -> Circuit {
        assert_eq!(self.n, other.n);
        self.gates.extend_from_slice(&other.gates);
        self
    }

    fn ordered(&self, dir: Direction) -> Box<dyn Iterator<Item = &Gate> + '_> {
        // Every gate is self-inverse, so U† is the reversed list.
        match dir {
            Direction::Forward => Box::new(self.gates.iter()),
            Direction::Inverse => Box::new(self.gates.iter().rev()),
        }
    }

    pub fn apply_state(&self, state: &mut StateVector, dir: Direction) -> Result<()> {
        if state.n_qubits() != self.n {
            return Err(GhError::DimensionMismatch {
                expected: self.n,
                found: state.n_qubits(),
            });
        }
        let amps = state.amplitudes_mut();
        for g in self.ordered(dir) {
            match *g {
                Gate::H(q) => apply_h(amps, q),
                Gate::Cz(a, b) => {
                    let m = (1usize << a) | (1usize << b);
                    for (i, amp) in amps.iter_mut().enumerate() {
                        if i & m == m {
                            *amp = -*amp;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `U P U†` for `Forward`, `U† P U` for `Inverse`.
    pub fn conjugate(&self, op: &PauliOperator, dir: Direction) -> Result<PauliOperator> {
        if op.n_qubits() != self.n {
            return Err(GhError::DimensionMismatch {
                expected: self.n,
                found: op.n_qubits(),
            });
        }
        // U P U† peels off the first gate innermost: g_k..(g_1 P g_1)..g_k.
        let mut p = op.clone();
        for g in self.ordered(dir) {
            p = conjugate_gate(&p, *g)?;
        }
        Ok(p)
    }

    pub fn conjugate_sum(&self, sum: &PauliSum, dir: Direction) -> Result<PauliSum> {
        sum.map_terms(self.n, |p| self.conjugate(p, dir))
    }
}

fn apply_h(amps: &mut [Complex64], q: usize) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (a, b) = (amps[i], amps[i | bit]);
            amps[i] = (a + b) * s;
            amps[i | bit] = (a - b) * s;
        }
    }
}

/// Image of a single-qubit letter on `q` under the gate.
fn letter_image(n: usize, q: usize, letter: char, gate: Gate) -> Result<PauliOperator> {
    let single = |l: char| PauliOperator::single(n, q, l);
    match gate {
        Gate::H(t) if t == q => match letter {
            'X' => single('Z'),
            'Z' => single('X'),
            'Y' => Ok(single('Y')?.negated()),
            _ => single('I'),
        },
        Gate::Cz(a, b) if a == q || b == q => {
            let other = if a == q { b } else { a };
            let base = single(letter)?;
            if matches!(letter, 'X' | 'Y') {
                base.multiply(&PauliOperator::single(n, other, 'Z')?)
            } else {
                Ok(base)
            }
        }
        _ => single(letter),
    }
}

fn conjugate_gate(p: &PauliOperator, gate: Gate) -> Result<PauliOperator> {
    let n = p.n_qubits();
    let touched: Vec<usize> = match gate {
        Gate::H(q) => vec![q],
        Gate::Cz(a, b) => vec![a, b],
    };
    let mut rest = p.clone();
    let mut images = Vec::new();
    for &q in &touched {
        let l = p.letter(q);
        if l != 'I' {
            rest.set_letter(q, 'I')?;
            images.push(letter_image(n, q, l, gate)?);
        }
    }
    // Letters on distinct qubits commute, so P = rest · L_a · L_b.
    let mut out = rest;
    for img in &images {
        out = out.multiply(img)?;
    }
    Ok(out)
}

/// Plaquette transformation: Hadamards on plaquette qubits around CZs with
/// their boundary links (`∏ CNOT(link → plaquette)`).
pub fn plaquette_circuit(geom: &LatticeGeometry) -> Circuit {
    let lay = LghmLayout::new(geom);
    let mut c = Circuit::new(lay.n_qubits());
    for p in 0..geom.n_plaquettes() {
        c.push(Gate::H(lay.plaquette(p)));
    }
    for p in &geom.plaquettes {
        for &l in &p.boundary {
            c.push(Gate::Cz(lay.plaquette(p.id), lay.link(l)));
        }
    }
    for p in 0..geom.n_plaquettes() {
        c.push(Gate::H(lay.plaquette(p)));
    }
    c
}

/// Vertex transformation: Hadamards on links around CZs with the vertex
/// qubits (`∏ CNOT(vertex → link)`).
pub fn vertex_circuit(geom: &LatticeGeometry) -> Circuit {
    let lay = LghmLayout::new(geom);
    let mut c = Circuit::new(lay.n_qubits());
    for l in 0..geom.n_links() {
        c.push(Gate::H(lay.link(l)));
    }
    for v in &geom.vertices {
        for &l in &v.star {
            c.push(Gate::Cz(lay.vertex(v.id), lay.link(l)));
        }
    }
    for l in 0..geom.n_links() {
        c.push(Gate::H(lay.link(l)));
    }
    c
}

/// Full mapping `U = U_v U_p` (plaquette transformation applied first).
pub fn mapping_circuit(geom: &LatticeGeometry) -> Circuit {
    plaquette_circuit(geom).then(&vertex_circuit(geom))
}

/// Apply the mapping circuit to a gauge-Higgs register state.
pub fn apply_mapping_to_state(geom: &LatticeGeometry, state: &mut StateVector, dir: Direction) -> Result<()> {
    mapping_circuit(geom).apply_state(state, dir)
}

/// Conjugate a gauge-Higgs register operator sum by the mapping circuit.
pub fn apply_mapping_to_sum(geom: &LatticeGeometry, sum: &PauliSum, dir: Direction) -> Result<PauliSum> {
    mapping_circuit(geom).conjugate_sum(sum, dir)
}

/// Drop qubits fixed in a known Pauli eigenstate: `x_fixed` qubits are in
/// `X = +1`, `z_fixed` qubits in `Z = +1`. Returns the operator on the
/// remaining `keep` qubits, or `None` if it does not preserve that sector.
pub fn restrict_to_sector(
    op: &PauliOperator,
    x_fixed: &[usize],
    z_fixed: &[usize],
    keep: std::ops::Range<usize>,
) -> Option<PauliOperator> {
    for &q in x_fixed {
        if !matches!(op.letter(q), 'I' | 'X') {
            return None;
        }
    }
    for &q in z_fixed {
        if !matches!(op.letter(q), 'I' | 'Z') {
            return None;
        }
    }
    Some(op.restrict(keep.start, keep.len()))
}

/// `restrict_to_sector` term by term.
pub fn restrict_sum_to_sector(
    sum: &PauliSum,
    x_fixed: &[usize],
    z_fixed: &[usize],
    keep: std::ops::Range<usize>,
) -> Option<PauliSum> {
    let mut out = PauliSum::new(keep.len());
    for (c, p) in sum.terms() {
        let r = restrict_to_sector(p, x_fixed, z_fixed, keep.clone())?;
        out.push(*c, r.with_phase(Phase::PlusOne)).ok()?;
    }
    Some(out)
}
