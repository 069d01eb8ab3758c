//! Random-bond Ising model attached to the dephased toric code.
//!
//! Matrix elements of the dephased ground state in the basis
//! `|Ω_s⟩ = ∏_ℓ (σ^x_ℓ)^{s_ℓ}|↑…↑⟩` reduce to an open-boundary RBIM partition
//! function whose couplings are the signs `s_ℓ` on the dephased links.
//! [`oracle`] checks that identity against the dense channel output and
//! [`mc`] runs Metropolis on the periodic square-lattice RBIM.

pub mod mc;
pub mod oracle;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, GhError, Result};
use crate::lattice::{LatticeGeometry, LinkKind};

pub use mc::{binder_crossing, mc_estimate, McConfig, McEstimate};
pub use oracle::{matrix_element_oracle, run_oracle, OracleContext, OracleReport, OracleSample};

/// Largest number of free spins summed by brute force.
pub const MAX_EXHAUSTIVE_SPINS: usize = 24;
/// Largest number of free spins in one row of the transfer matrix.
pub const MAX_TRANSFER_WIDTH: usize = 12;

/// Inverse temperature on the Nishimori line, `tanh β = 1 - 2p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NishimoriBeta {
    Finite(f64),
    /// `p = 0`.
    Infinite,
}

impl NishimoriBeta {
    pub fn tanh(self) -> f64 {
        match self {
            NishimoriBeta::Finite(b) => b.tanh(),
            NishimoriBeta::Infinite => 1.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            NishimoriBeta::Finite(b) => b,
            NishimoriBeta::Infinite => f64::INFINITY,
        }
    }
}

pub fn nishimori_beta(p: f64) -> Result<NishimoriBeta> {
    if !(0.0..=0.5).contains(&p) {
        return Err(invalid_param("p", p, "must lie in [0, 1/2]"));
    }
    if p == 0.0 {
        return Ok(NishimoriBeta::Infinite);
    }
    Ok(NishimoriBeta::Finite((1.0 - 2.0 * p).atanh()))
}

/// Basis label `s_ℓ = ±1` per link; `-1` marks a flipped link.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OmegaBasisLabel {
    s: Vec<i8>,
}

impl OmegaBasisLabel {
    pub fn all_up(n: usize) -> Self {
        Self { s: vec![1; n] }
    }

    pub fn from_signs(s: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = s.iter().find(|&&v| v != 1 && v != -1) {
            return Err(invalid_param("s", bad, "entries must be +1 or -1"));
        }
        Ok(Self { s })
    }

    /// Bit `ℓ` of `mask` set means `s_ℓ = -1`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self {
            s: (0..n).map(|l| if mask >> l & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        self.s.iter().enumerate().filter(|(_, &v)| v < 0).fold(0, |m, (l, _)| m | 1 << l)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn sign(&self, link: usize) -> i8 {
        self.s[link]
    }

    pub fn signs(&self) -> &[i8] {
        &self.s
    }

    pub fn product(&self, links: &[usize]) -> i8 {
        links.iter().map(|&l| self.s[l]).product()
    }

    fn check(&self, geom: &LatticeGeometry) -> Result<()> {
        if self.s.len() != geom.n_links() {
            return Err(GhError::DimensionMismatch {
                expected: geom.n_links(),
                found: self.s.len(),
            });
        }
        Ok(())
    }
}

/// Products `(a, b)` of `s` along the left and right smooth columns.
pub fn smooth_signs(s: &OmegaBasisLabel, geom: &LatticeGeometry) -> Result<(i8, i8)> {
    s.check(geom)?;
    Ok((s.product(&geom.smooth_column(0)), s.product(&geom.smooth_column(geom.lx - 1))))
}

/// `Λ(s) = 1 + a + b + ab = (1 + a)(1 + b)`.
pub fn boundary_factor(s: &OmegaBasisLabel, geom: &LatticeGeometry) -> Result<f64> {
    let (a, b) = smooth_signs(s, geom)?;
    Ok(((1 + a) * (1 + b)) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub s: i8,
}

/// Ising spins with fixed `±1` couplings. Some spins may be pinned.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RbimInstance {
    /// `None` for a free spin, `Some(±1)` for a pinned one.
    pub spins: Vec<Option<i8>>,
    /// Row of each spin. Bonds between free spins must join equal or
    /// adjacent rows for the transfer-matrix path.
    pub rows: Vec<usize>,
    pub bonds: Vec<Bond>,
    pub beta: f64,
}

impl RbimInstance {
    pub fn new(spins: Vec<Option<i8>>, rows: Vec<usize>, bonds: Vec<Bond>, beta: f64) -> Result<Self> {
        if rows.len() != spins.len() {
            return Err(GhError::DimensionMismatch {
                expected: spins.len(),
                found: rows.len(),
            });
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(invalid_param("beta", beta, "must be finite and >= 0"));
        }
        for sp in spins.iter().flatten() {
            if *sp != 1 && *sp != -1 {
                return Err(invalid_param("pinned spin", sp, "must be +1 or -1"));
            }
        }
        for b in &bonds {
            if b.a >= spins.len() || b.b >= spins.len() || b.a == b.b {
                return Err(invalid_param("bond", format!("({}, {})", b.a, b.b), "bad endpoints"));
            }
            if b.s != 1 && b.s != -1 {
                return Err(invalid_param("bond sign", b.s, "must be +1 or -1"));
            }
        }
        Ok(Self {
            spins,
            rows,
            bonds,
            beta,
        })
    }

    /// Instance attached to the basis label `s` on `geom`.
    ///
    /// Spins: one per vertex, then a top ghost `T` and a bottom ghost `B`
    /// standing for the open rough boundaries. `T = +1`; vertices on the
    /// two smooth columns and `B` are pinned by propagating `s` down the
    /// smooth paths (`B` from the left path). Every non-smooth link is a
    /// bond; dangling links attach to the ghosts.
    pub fn from_omega_label(geom: &LatticeGeometry, s: &OmegaBasisLabel, beta: f64) -> Result<Self> {
        s.check(geom)?;
        let (lx, ly) = (geom.lx, geom.ly);
        let nv = geom.n_vertices();
        let (top, bottom) = (nv, nv + 1);
        let mut spins: Vec<Option<i8>> = vec![None; nv + 2];
        let mut rows: Vec<usize> = (0..nv).map(|v| geom.vertices[v].row + 1).collect();
        rows.extend([0, ly + 1]);
        spins[top] = Some(1);
        for col in [0, lx - 1] {
            let mut cur = 1i8;
            for (r, &l) in geom.smooth_column(col).iter().enumerate() {
                cur *= s.sign(l);
                if r < ly {
                    spins[r * lx + col] = Some(cur);
                } else if col == 0 {
                    spins[bottom] = Some(cur);
                }
            }
        }
        let bonds = geom
            .non_smooth_links()
            .into_iter()
            .map(|l| {
                let link = &geom.links[l];
                let (a, b) = match link.kind {
                    LinkKind::TopDangling => (top, link.vertices[0]),
                    LinkKind::BottomDangling => (link.vertices[0], bottom),
                    _ => (link.vertices[0], link.vertices[1]),
                };
                Bond { a, b, s: s.sign(l) }
            })
            .collect();
        Self::new(spins, rows, bonds, beta)
    }

    pub fn n_free(&self) -> usize {
        self.spins.iter().filter(|s| s.is_none()).count()
    }

    /// `Z' = Σ_σ exp(β Σ s σ σ')`.
    pub fn exact_partition(&self) -> Result<f64> {
        let (wp, wm) = (self.beta.exp(), (-self.beta).exp());
        self.sum_weights(wp, wm)
    }

    /// The same sum with the opposite exponent sign, `Σ_σ exp(-β Σ s σ σ')`.
    pub fn partition_reversed_sign(&self) -> Result<f64> {
        let (wp, wm) = ((-self.beta).exp(), self.beta.exp());
        self.sum_weights(wp, wm)
    }

    /// `Σ_σ ∏_b w(s_b σ_a σ_b)` with `w(+1) = w_plus`, `w(-1) = w_minus`,
    /// by enumeration when the free spins fit, else by transfer matrix.
    pub fn sum_weights(&self, w_plus: f64, w_minus: f64) -> Result<f64> {
        if self.n_free() <= MAX_EXHAUSTIVE_SPINS {
            self.sum_exhaustive(w_plus, w_minus)
        } else {
            Ok(self.log_sum_transfer(w_plus, w_minus)?.exp())
        }
    }

    pub fn sum_exhaustive(&self, w_plus: f64, w_minus: f64) -> Result<f64> {
        let free: Vec<usize> = (0..self.spins.len()).filter(|&i| self.spins[i].is_none()).collect();
        if free.len() > MAX_EXHAUSTIVE_SPINS {
            return Err(GhError::InstanceTooLarge {
                method: "exhaustive".into(),
                size: free.len(),
                limit: MAX_EXHAUSTIVE_SPINS,
            });
        }
        let mut slot = vec![usize::MAX; self.spins.len()];
        for (k, &i) in free.iter().enumerate() {
            slot[i] = k;
        }
        let spin = |i: usize, conf: u64| -> i8 {
            match self.spins[i] {
                Some(v) => v,
                None => 1 - 2 * ((conf >> slot[i]) & 1) as i8,
            }
        };
        let term = |conf: u64| -> f64 {
            self.bonds
                .iter()
                .map(|b| if b.s * spin(b.a, conf) * spin(b.b, conf) > 0 { w_plus } else { w_minus })
                .product()
        };
        let total = 1u64 << free.len();
        const CHUNK: u64 = 1 << 12;
        let partial: Vec<f64> = (0..total.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(total)).map(term).sum::<f64>())
            .collect();
        Ok(partial.iter().sum())
    }

    /// Natural log of [`Self::sum_weights`] by row transfer matrix.
    pub fn log_sum_transfer(&self, w_plus: f64, w_minus: f64) -> Result<f64> {
        let n_rows = self.rows.iter().max().map_or(0, |m| m + 1);
        let mut row_free: Vec<Vec<usize>> = vec![Vec::new(); n_rows];
        let mut slot = vec![usize::MAX; self.spins.len()];
        for i in 0..self.spins.len() {
            if self.spins[i].is_none() {
                slot[i] = row_free[self.rows[i]].len();
                row_free[self.rows[i]].push(i);
            }
        }
        if let Some(w) = row_free.iter().map(Vec::len).max().filter(|&w| w > MAX_TRANSFER_WIDTH) {
            return Err(GhError::InstanceTooLarge {
                method: "transfer matrix".into(),
                size: w,
                limit: MAX_TRANSFER_WIDTH,
            });
        }
        let w = |x: i8| if x > 0 { w_plus } else { w_minus };
        let bit = |conf: usize, i: usize| -> i8 { 1 - 2 * ((conf >> slot[i]) & 1) as i8 };

        // Bonds grouped by the row that closes them.
        let mut constant = 1.0;
        let mut intra: Vec<Vec<Bond>> = vec![Vec::new(); n_rows];
        let mut inter: Vec<Vec<Bond>> = vec![Vec::new(); n_rows];
        for b in &self.bonds {
            match (self.spins[b.a], self.spins[b.b]) {
                (Some(x), Some(y)) => constant *= w(b.s * x * y),
                (None, Some(y)) => intra[self.rows[b.a]].push(Bond { a: b.a, b: b.a, s: b.s * y }),
                (Some(x), None) => intra[self.rows[b.b]].push(Bond { a: b.b, b: b.b, s: b.s * x }),
                (None, None) => {
                    let (ra, rb) = (self.rows[b.a], self.rows[b.b]);
                    if ra == rb {
                        intra[ra].push(*b);
                    } else if ra + 1 == rb {
                        inter[rb].push(*b);
                    } else if rb + 1 == ra {
                        inter[ra].push(Bond { a: b.b, b: b.a, s: b.s });
                    } else {
                        return Err(GhError::Unsupported(format!(
                            "bond ({}, {}) skips rows {ra} -> {rb}",
                            b.a, b.b
                        )));
                    }
                }
            }
        }
        // A bond with a == b is a field from a pinned neighbour.
        let row_weight = |r: usize, conf: usize| -> f64 {
            intra[r]
                .iter()
                .map(|b| {
                    let x = if b.a == b.b { b.s * bit(conf, b.a) } else { b.s * bit(conf, b.a) * bit(conf, b.b) };
                    w(x)
                })
                .product()
        };
        let mut log_scale = constant.ln();
        let mut phi: Vec<f64> = vec![1.0];
        for r in 0..n_rows {
            let dim = 1usize << row_free[r].len();
            let next: Vec<f64> = (0..dim)
                .into_par_iter()
                .map(|c| {
                    let mut acc = 0.0;
                    for (cp, &f) in phi.iter().enumerate() {
                        if f == 0.0 {
                            continue;
                        }
                        let link: f64 = inter[r]
                            .iter()
                            .map(|b| w(b.s * bit(cp, b.a) * bit(c, b.b)))
                            .product();
                        acc += f * link;
                    }
                    acc * row_weight(r, c)
                })
                .collect();
            let m = next.iter().cloned().fold(0.0, f64::max);
            if m == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            log_scale += m.ln();
            phi = next.into_iter().map(|x| x / m).collect();
        }
        Ok(log_scale + phi.iter().sum::<f64>().ln())
    }

    /// Flip every bond touching spin `v`; `Z'` is unchanged when `v` is free.
    pub fn gauge_flip(&mut self, v: usize) {
        for b in &mut self.bonds {
            if b.a == v || b.b == v {
                b.s = -b.s;
            }
        }
    }
}

/// `K₀ = Z' / (2^{N_BV} cosh^{N_BL} β)` through `e^{±β}/cosh β = 1 ± tanh β`,
/// so `p = 0` needs no limit.
pub fn k0(geom: &LatticeGeometry, s: &OmegaBasisLabel, beta: NishimoriBeta) -> Result<f64> {
    let inst = RbimInstance::from_omega_label(geom, s, 0.0)?;
    let t = beta.tanh();
    Ok(inst.sum_weights(1.0 + t, 1.0 - t)? / (inst.n_free() as f64).exp2())
}

/// `(K₀, K₁, K₂, K₃)` by direct summation over loop configurations:
/// products of plaquettes modulo `S̃_Z`, times nothing, the left smooth
/// string, the right one, or both. Each configuration contributes
/// `∏_{ℓ∈c} t_ℓ s_ℓ` with `t_ℓ = 1 - 2p` on dephased links and 1 on smooth ones.
pub fn loop_expansion(geom: &LatticeGeometry, s: &OmegaBasisLabel, p: f64) -> Result<[f64; 4]> {
    s.check(geom)?;
    if !(0.0..=0.5).contains(&p) {
        return Err(invalid_param("p", p, "must lie in [0, 1/2]"));
    }
    let n_gen = geom.n_plaquettes() - 1;
    if n_gen > 26 {
        return Err(GhError::InstanceTooLarge {
            method: "loop expansion".into(),
            size: n_gen,
            limit: 26,
        });
    }
    let mask_of = |ls: &[usize]| ls.iter().fold(0u64, |m, &l| m | 1 << l);
    let gens: Vec<u64> = (0..n_gen).map(|p| mask_of(&geom.plaquettes[p].boundary)).collect();
    let left = mask_of(&geom.smooth_column(0));
    let right = mask_of(&geom.smooth_column(geom.lx - 1));
    let factor: Vec<f64> = geom
        .links
        .iter()
        .map(|l| {
            let t = if l.is_smooth() { 1.0 } else { 1.0 - 2.0 * p };
            t * s.sign(l.id) as f64
        })
        .collect();
    let weight = |c: u64| -> f64 {
        let mut w = 1.0;
        let mut m = c;
        while m != 0 {
            w *= factor[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        w
    };
    let mut k = [0.0; 4];
    let mut c = 0u64;
    for g in 0u64..1 << n_gen {
        // Gray-code walk through the plaquette group.
        if g > 0 {
            c ^= gens[g.trailing_zeros() as usize];
        }
        k[0] += weight(c);
        k[1] += weight(c ^ left);
        k[2] += weight(c ^ right);
        k[3] += weight(c ^ left ^ right);
    }
    Ok(k)
}
