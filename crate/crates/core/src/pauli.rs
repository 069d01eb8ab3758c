//! Pauli operators in symplectic form, with exact phases, and spans of
//! Pauli groups modulo phase.
//!
//! An operator is stored as `i^e` times a tensor product of letters
//! `I, X, Y, Z`, where qubit `q` carries `X` if only `x[q]` is set, `Z` if
//! only `z[q]` is set and `Y` if both are.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GhError, Result};
use crate::gf2::{self, BitVec, Echelon};

/// Global phase `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + other.exponent())
    }

    pub fn conj(self) -> Phase {
        Phase::from_exponent(4 - self.exponent())
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    fn token(self) -> &'static str {
        match self {
            Phase::PlusOne => "+1",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-1",
            Phase::MinusI => "-i",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x: BitVec,
    z: BitVec,
    phase: Phase,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: Phase::PlusOne,
        }
    }

    /// Build from letter-form bit vectors. Positions set in both are `Y`.
    pub fn from_bits(x: BitVec, z: BitVec, phase: Phase) -> Result<Self> {
        if x.len() != z.len() {
            return Err(GhError::DimensionMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(Self { x, z, phase })
    }

    pub fn x_on(n: usize, qubits: &[usize]) -> Self {
        Self {
            x: BitVec::from_indices(n, qubits.iter().copied()),
            z: BitVec::zeros(n),
            phase: Phase::PlusOne,
        }
    }

    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::from_indices(n, qubits.iter().copied()),
            phase: Phase::PlusOne,
        }
    }

    pub fn single(n: usize, qubit: usize, letter: char) -> Result<Self> {
        if qubit >= n {
            return Err(GhError::QubitOutOfRange { qubit, n });
        }
        let mut op = Self::identity(n);
        op.set_letter(qubit, letter)?;
        Ok(op)
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = self.phase.mul(Phase::MinusOne);
        self
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }

    pub fn set_letter(&mut self, q: usize, letter: char) -> Result<()> {
        let (x, z) = match letter {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            other => return Err(GhError::Parse(format!("unknown Pauli letter '{other}'"))),
        };
        self.x.set(q, x);
        self.z.set(q, z);
        Ok(())
    }

    pub fn support(&self) -> Vec<usize> {
        self.x.or(&self.z).iter_ones().collect()
    }

    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Letter strings are Hermitian, so the operator is Hermitian exactly
    /// when its phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    fn y_count(&self) -> u32 {
        self.x.and_count(&self.z)
    }

    fn check_same(&self, other: &PauliOperator) -> Result<()> {
        if self.n_qubits() != other.n_qubits() {
            return Err(GhError::DimensionMismatch {
                expected: self.n_qubits(),
                found: other.n_qubits(),
            });
        }
        Ok(())
    }

    /// Operator product `self · other` with exact phase.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.check_same(other)?;
        let x = self.x.xor(&other.x);
        let z = self.z.xor(&other.z);
        // Write each factor as i^{e + ny} X^x Z^z, reorder the middle
        // Z^{z1} X^{x2} (sign (-1)^{z1.x2}), then convert back to letters.
        let ny3 = x.and_count(&z);
        let e = self.phase.exponent() as u32
            + other.phase.exponent() as u32
            + self.y_count()
            + other.y_count()
            + 2 * self.z.and_count(&other.x)
            + 4 * ny3
            - ny3;
        Ok(PauliOperator {
            x,
            z,
            phase: Phase::from_exponent((e % 4) as u8),
        })
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        self.check_same(other)?;
        Ok((self.x.and_count(&other.z) + self.z.and_count(&other.x)) % 2 == 0)
    }

    pub fn adjoint(&self) -> PauliOperator {
        PauliOperator {
            x: self.x.clone(),
            z: self.z.clone(),
            phase: self.phase.conj(),
        }
    }

    /// Symplectic row `(x | z)` of length `2n`, phase discarded.
    pub fn symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    /// Equal as elements of the Pauli group modulo phase.
    pub fn same_up_to_phase(&self, other: &PauliOperator) -> bool {
        self.x == other.x && self.z == other.z
    }

    /// Tensor product `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &PauliOperator) -> PauliOperator {
        PauliOperator {
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
            phase: self.phase.mul(other.phase),
        }
    }

    /// Place this operator on qubits `offset..offset+n` of a larger register.
    pub fn embed(&self, total: usize, offset: usize) -> PauliOperator {
        assert!(offset + self.n_qubits() <= total);
        let mut out = PauliOperator::identity(total);
        for q in self.x.iter_ones() {
            out.x.set(offset + q, true);
        }
        for q in self.z.iter_ones() {
            out.z.set(offset + q, true);
        }
        out.phase = self.phase;
        out
    }

    /// Restrict to qubits `offset..offset+len`, keeping the phase.
    pub fn restrict(&self, offset: usize, len: usize) -> PauliOperator {
        PauliOperator {
            x: self.x.slice(offset, len),
            z: self.z.slice(offset, len),
            phase: self.phase,
        }
    }

    /// Action on a computational basis state: `P|b> = amp |b'>`.
    ///
    /// Only valid for at most 64 qubits.
    #[inline]
    pub fn act_on_basis(&self, b: u64) -> (u64, Complex64) {
        let (xm, zm) = (self.x.to_mask(), self.z.to_mask());
        let ny = (xm & zm).count_ones();
        // Z^z first picks up (-1)^{z.b}, letters carry i^{ny}.
        let k = self.phase.exponent() as u32 + ny + 2 * (zm & b).count_ones();
        (b ^ xm, Phase::from_exponent((k % 4) as u8).to_complex())
    }

    /// Dense `2^n x 2^n` matrix, row index = output basis state.
    /// Intended for small test oracles only.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.n_qubits();
        assert!(n <= 12, "dense matrix requested for {n} qubits");
        let dim = 1usize << n;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for b in 0..dim as u64 {
            let (out, amp) = self.act_on_basis(b);
            m[out as usize][b as usize] = amp;
        }
        m
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.phase.token())?;
        for q in 0..self.n_qubits() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliOperator {
    type Err = GhError;

    /// Parses `"<phase> <letters>"` with phase one of `+1 -1 +i -i`.
    /// A bare letter string is read with phase `+1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, letters) = match s.split_once(char::is_whitespace) {
            Some((p, rest)) => {
                let phase = match p {
                    "+1" | "1" => Phase::PlusOne,
                    "-1" => Phase::MinusOne,
                    "+i" | "i" => Phase::PlusI,
                    "-i" => Phase::MinusI,
                    other => return Err(GhError::Parse(format!("unknown phase token '{other}'"))),
                };
                (phase, rest.trim())
            }
            None => (Phase::PlusOne, s),
        };
        if letters.is_empty() {
            return Err(GhError::Parse("empty Pauli string".into()));
        }
        let mut op = PauliOperator::identity(letters.chars().count());
        for (q, c) in letters.chars().enumerate() {
            op.set_letter(q, c)?;
        }
        op.phase = phase;
        Ok(op)
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A generating set of a Pauli group, considered modulo phases.
#[derive(Clone, Debug)]
pub struct PauliSpan {
    n: usize,
    generators: Vec<PauliOperator>,
    labels: Vec<String>,
    echelon: Echelon,
}

impl PauliSpan {
    pub fn new(n: usize, generators: Vec<PauliOperator>) -> Result<Self> {
        let labels = (0..generators.len()).map(|i| format!("g{i}")).collect();
        Self::with_labels(n, generators, labels)
    }

    pub fn with_labels(n: usize, generators: Vec<PauliOperator>, labels: Vec<String>) -> Result<Self> {
        assert_eq!(generators.len(), labels.len());
        let mut echelon = Echelon::new(2 * n);
        for g in &generators {
            if g.n_qubits() != n {
                return Err(GhError::DimensionMismatch {
                    expected: n,
                    found: g.n_qubits(),
                });
            }
            echelon.insert(&g.symplectic());
        }
        Ok(Self {
            n,
            generators,
            labels,
            echelon,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn contains(&self, op: &PauliOperator) -> bool {
        op.n_qubits() == self.n && self.echelon.contains(&op.symplectic())
    }

    pub fn contains_span(&self, other: &PauliSpan) -> bool {
        other.generators.iter().all(|g| self.contains(g))
    }

    pub fn same_span(&self, other: &PauliSpan) -> bool {
        self.n == other.n && self.rank() == other.rank() && self.contains_span(other)
    }

    /// Union of generating sets, labels kept.
    pub fn union(&self, other: &PauliSpan) -> Result<PauliSpan> {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        PauliSpan::with_labels(self.n, gens, labels)
    }

    /// Greedy maximal independent subset, in generator order.
    pub fn independent_indices(&self) -> Vec<usize> {
        let rows: Vec<BitVec> = self.generators.iter().map(|g| g.symplectic()).collect();
        gf2::independent_subset(&rows, 2 * self.n)
    }

    /// Rank of the commutator form restricted to the span: twice the number
    /// of anticommuting pairs in a symplectic basis.
    pub fn commutator_rank(&self) -> usize {
        let idx = self.independent_indices();
        let rows: Vec<BitVec> = idx
            .iter()
            .map(|&i| {
                BitVec::from_bools(
                    &idx.iter()
                        .map(|&j| !self.generators[i].commutes(&self.generators[j]).expect("same size"))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        gf2::rank(&rows, idx.len())
    }

    /// Elements of the span commuting with every generator of the span.
    pub fn center(&self) -> Result<PauliSpan> {
        centralizer_in_span(self, &self.generators)
    }

    pub fn is_abelian(&self) -> bool {
        self.commutator_rank() == 0
    }
}

/// Subgroup of `span` commuting with every operator in `constraints`.
///
/// Each output generator is a product of an independent subset of the input
/// generators; its label joins theirs with `*`. The generators come from the
/// nullspace of the pairing matrix with the lowest-index-pivot convention,
/// so the output is a deterministic function of the inputs.
pub fn centralizer_in_span(span: &PauliSpan, constraints: &[PauliOperator]) -> Result<PauliSpan> {
    for c in constraints {
        if c.n_qubits() != span.n {
            return Err(GhError::DimensionMismatch {
                expected: span.n,
                found: c.n_qubits(),
            });
        }
    }
    let basis = span.independent_indices();
    let pairing: Vec<BitVec> = constraints
        .iter()
        .map(|c| {
            BitVec::from_bools(
                &basis
                    .iter()
                    .map(|&i| !span.generators[i].commutes(c).expect("checked"))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let null = gf2::nullspace(&pairing, basis.len());
    let mut gens = Vec::with_capacity(null.len());
    let mut labels = Vec::with_capacity(null.len());
    for v in &null {
        let mut op = PauliOperator::identity(span.n);
        let mut parts = Vec::new();
        for k in v.iter_ones() {
            let i = basis[k];
            op = op.multiply(&span.generators[i])?;
            parts.push(span.labels[i].clone());
        }
        // Products of commuting Hermitian generators stay Hermitian; fix the
        // sign convention to +1 so labels alone identify the operator.
        if !op.is_hermitian() {
            op = op.with_phase(Phase::PlusOne);
        }
        gens.push(op);
        labels.push(parts.join("*"));
    }
    PauliSpan::with_labels(span.n, gens, labels)
}

/// Whether every pair in `ops` commutes.
pub fn mutually_commuting(ops: &[PauliOperator]) -> Result<bool> {
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            if !a.commutes(b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn dense_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let d = a.len();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for i in 0..d {
            for k in 0..d {
                if a[i][k].norm() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    fn dense_eq(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> bool {
        a.iter().zip(b).all(|(r, s)| r.iter().zip(s).all(|(x, y)| (x - y).norm() < 1e-12))
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(p("+1 X").multiply(&p("+1 Z")).unwrap(), p("-i Y"));
        assert_eq!(p("+1 Z").multiply(&p("+1 X")).unwrap(), p("+i Y"));
        assert_eq!(p("+1 X").multiply(&p("+1 Y")).unwrap(), p("+i Z"));
        assert_eq!(p("+1 Y").multiply(&p("+1 Y")).unwrap(), p("+1 I"));
    }

    #[test]
    fn text_round_trip() {
        for s in ["+1 XIZY", "-1 ZZ", "+i YIX", "-i IIII"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("+2 XX".parse::<PauliOperator>().is_err());
        assert!("+1 XQ".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(
            p("XX").multiply(&p("XXX")),
            Err(GhError::DimensionMismatch { .. })
        ));
        assert!(p("XX").commutes(&p("Z")).is_err());
    }

    #[test]
    fn two_qubit_products_match_dense_matrices() {
        let letters = ['I', 'X', 'Y', 'Z'];
        let mut ops = Vec::new();
        for a in letters {
            for b in letters {
                ops.push(p(&format!("+1 {a}{b}")));
            }
        }
        for a in &ops {
            for b in &ops {
                let prod = a.multiply(b).unwrap();
                assert!(dense_eq(&prod.to_dense(), &dense_mul(&a.to_dense(), &b.to_dense())));
                let ab = dense_mul(&a.to_dense(), &b.to_dense());
                let ba = dense_mul(&b.to_dense(), &a.to_dense());
                assert_eq!(a.commutes(b).unwrap(), dense_eq(&ab, &ba));
            }
        }
    }

    #[test]
    fn center_of_two_qubit_group() {
        // <XX, ZZ, ZI>: ZI anticommutes with XX, so the center is <ZZ>.
        let span = PauliSpan::new(2, vec![p("XX"), p("ZZ"), p("ZI")]).unwrap();
        let c = span.center().unwrap();
        assert_eq!(c.rank(), 1);
        assert!(c.contains(&p("ZZ")));
        assert_eq!(span.commutator_rank(), 2);
    }
}
