//! Weighted sums of Pauli strings and their sparse matrices.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{GhError, Result};
use crate::gf2::BitVec;
use crate::pauli::{Phase, PauliOperator};

use super::MAX_STATE_QUBITS;

/// `Σ_k c_k P_k` with complex coefficients and phase-free Pauli strings.
#[derive(Clone, Debug)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(Complex64, PauliOperator)>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Complex64, PauliOperator)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `coef · op`; the operator's phase is folded into the coefficient.
    pub fn push(&mut self, coef: impl Into<Complex64>, op: PauliOperator) -> Result<()> {
        if op.n_qubits() != self.n {
            return Err(GhError::DimensionMismatch {
                expected: self.n,
                found: op.n_qubits(),
            });
        }
        let c = coef.into() * op.phase().to_complex();
        self.terms.push((c, op.with_phase(Phase::PlusOne)));
        Ok(())
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliOperator)>,
    {
        let mut s = Self::new(n);
        for (c, op) in terms {
            s.push(c, op)?;
        }
        Ok(s)
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        PauliSum {
            n: self.n,
            terms: self.terms.iter().map(|(c, p)| (c * factor, p.clone())).collect(),
        }
    }

    /// Merge equal strings (first-occurrence order) and drop zero terms.
    pub fn simplify(&self) -> PauliSum {
        let mut order: Vec<(BitVec, BitVec)> = Vec::new();
        let mut acc: HashMap<(BitVec, BitVec), (Complex64, PauliOperator)> = HashMap::new();
        for (c, p) in &self.terms {
            let key = (p.x_bits().clone(), p.z_bits().clone());
            match acc.get_mut(&key) {
                Some(entry) => entry.0 += c,
                None => {
                    order.push(key.clone());
                    acc.insert(key, (*c, p.clone()));
                }
            }
        }
        let terms = order
            .into_iter()
            .filter_map(|k| acc.remove(&k))
            .filter(|(c, _)| c.norm() > 1e-14)
            .collect();
        PauliSum { n: self.n, terms }
    }

    /// Operator product `self · other`, simplified.
    pub fn product(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(GhError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut out = PauliSum::new(self.n);
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                out.push(a * b, p.multiply(q)?)?;
            }
        }
        Ok(out.simplify())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(GhError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    /// Hermitian after merging equal strings.
    pub fn is_hermitian(&self) -> bool {
        self.simplify().terms.iter().all(|(c, _)| c.im.abs() <= 1e-12 * c.norm().max(1.0))
    }

    pub fn mutually_commuting(&self) -> bool {
        let ops: Vec<PauliOperator> = self.terms.iter().map(|(_, p)| p.clone()).collect();
        crate::pauli::mutually_commuting(&ops).unwrap_or(false)
    }

    /// Sum of `|c_k|`, an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }

    pub fn to_sparse(&self) -> Result<SparseMatrix> {
        SparseMatrix::from_pauli_sum(self)
    }

    /// Conjugate every string by `f`, which returns the image with phase.
    pub fn map_terms<F>(&self, n_out: usize, mut f: F) -> Result<PauliSum>
    where
        F: FnMut(&PauliOperator) -> Result<PauliOperator>,
    {
        let mut out = PauliSum::new(n_out);
        for (c, p) in &self.terms {
            out.push(*c, f(p)?)?;
        }
        Ok(out)
    }

    /// Whether `self - other` simplifies to zero.
    pub fn approx_eq(&self, other: &PauliSum, tol: f64) -> bool {
        if self.n != other.n {
            return false;
        }
        let diff = self.add(&other.scaled(-1.0)).expect("same size").simplify();
        diff.terms.iter().all(|(c, _)| c.norm() <= tol)
    }
}

/// Compressed sparse rows, complex entries.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn from_pauli_sum(sum: &PauliSum) -> Result<Self> {
        let n = sum.n_qubits();
        if n > MAX_STATE_QUBITS {
            return Err(GhError::StateTooLarge {
                n,
                limit: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << n;
        let terms: Vec<(Complex64, u64, u64, u32)> = sum
            .terms()
            .iter()
            .filter(|(c, _)| c.norm() > 0.0)
            .map(|(c, p)| {
                let (x, z) = (p.x_bits().to_mask(), p.z_bits().to_mask());
                (*c, x, z, (x & z).count_ones())
            })
            .collect();
        let rows: Vec<Vec<(u32, Complex64)>> = (0..dim)
            .into_par_iter()
            .map(|r| {
                let mut entries: Vec<(u32, Complex64)> = Vec::with_capacity(terms.len());
                for &(c, x, z, ny) in &terms {
                    // <r| P |r^x> = i^{ny} (-1)^{z.(r^x)}
                    let col = r as u64 ^ x;
                    let k = ny + 2 * (z & col).count_ones();
                    let amp = c * Phase::from_exponent((k % 4) as u8).to_complex();
                    match entries.iter_mut().find(|(cc, _)| *cc == col as u32) {
                        Some(e) => e.1 += amp,
                        None => entries.push((col as u32, amp)),
                    }
                }
                entries.retain(|(_, v)| v.norm() > 1e-15);
                entries.sort_unstable_by_key(|e| e.0);
                entries
            })
            .collect();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let nnz: usize = rows.iter().map(|r| r.len()).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for r in rows {
            for (c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            dim,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `out = A v`. Rows are independent, so the result does not depend on
    /// the thread count.
    pub fn matvec(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        out.par_chunks_mut(256).enumerate().for_each(|(chunk, o)| {
            let base = chunk * 256;
            for (k, slot) in o.iter_mut().enumerate() {
                let r = base + k;
                let mut acc = Complex64::new(0.0, 0.0);
                for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                    acc += self.vals[idx] * v[self.cols[idx] as usize];
                }
                *slot = acc;
            }
        });
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec(v, &mut out);
        out
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.vals[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[idx] as usize)] = self.vals[idx];
            }
        }
        m
    }
}
