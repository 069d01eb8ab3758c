//! Dense bit vectors and linear algebra over GF(2).

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// Number of positions set in both vectors.
    pub fn and_count(&self, other: &BitVec) -> u32 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    /// Low 64 bits as an integer mask. Panics for vectors longer than 64.
    pub fn to_mask(&self) -> u64 {
        assert!(self.len <= 64, "bit vector of length {} does not fit a u64", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        if len > 0 {
            let keep = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = mask & keep;
        }
        v
    }

    /// Concatenate `self` followed by `other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in self.iter_ones() {
            if i >= start && i < start + len {
                out.set(i - start, true);
            }
        }
        out
    }
}

/// Incrementally maintained row-echelon basis of a subspace of GF(2)^n.
///
/// Rows are kept fully reduced: every pivot column is set in exactly one
/// stored row, so `reduce` is a single pass and yields a canonical residue
/// modulo the span.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Add `v` to the basis. Returns `false` if it was already in the span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.ncols);
        let r = self.reduce(v);
        let Some(p) = r.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }
}

pub fn rank(rows: &[BitVec], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Indices of a maximal independent subset, chosen greedily in order.
pub fn independent_subset(rows: &[BitVec], ncols: usize) -> Vec<usize> {
    let mut e = Echelon::new(ncols);
    rows.iter()
        .enumerate()
        .filter_map(|(i, r)| e.insert(r).then_some(i))
        .collect()
}

/// Reduced row echelon form in place. Pivots are taken at the lowest
/// available column, and the returned vector lists the pivot column of
/// each of the leading `pivots.len()` rows.
pub fn rref(rows: &mut Vec<BitVec>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        let Some(found) = (next..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot_row = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    pivots
}

/// Basis of `{x : A x = 0}` for the matrix whose rows are `rows`.
///
/// One basis vector per free column, in increasing column order; the free
/// column is set and pivot columns are filled in from the reduced rows.
pub fn nullspace(rows: &[BitVec], ncols: usize) -> Vec<BitVec> {
    let mut a: Vec<BitVec> = rows.to_vec();
    let pivots = rref(&mut a, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = BitVec::zeros(ncols);
            x.set(f, true);
            for (i, &p) in pivots.iter().enumerate() {
                if a[i].get(f) {
                    x.set(p, true);
                }
            }
            x
        })
        .collect()
}
