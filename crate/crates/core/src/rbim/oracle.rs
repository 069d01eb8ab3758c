//! Dense check of `⟨Ω_s|ρ_D|Ω_s'⟩ = δ · Λ(s) K₀(s) / 2^N`.
//!
//! The left side comes from the branch expansion of the channel applied to
//! the zero-coupling ground state; the right side from the partition
//! function of [`RbimInstance::from_omega_label`]. `δ` is membership of
//! `s ⊕ s'` in the span of the vertex stars.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::channel::{decohere, DecoheredState};
use crate::error::{GhError, Result};
use crate::exact::StateVector;
use crate::gf2::{BitVec, Echelon};
use crate::lattice::LatticeGeometry;
use crate::seed::stream_rng;

use super::{boundary_factor, k0, nishimori_beta, NishimoriBeta, OmegaBasisLabel, RbimInstance};

/// Largest link register handled by the oracle.
pub const MAX_ORACLE_LINKS: usize = 20;

/// Projection of `|0…0⟩` onto every star being `+1`: the zero-coupling
/// ground state with `L_z = +1`.
pub fn fixed_point_state(geom: &LatticeGeometry) -> Result<StateVector> {
    let n = geom.n_links();
    if n > MAX_ORACLE_LINKS {
        return Err(GhError::StateTooLarge {
            n,
            limit: MAX_ORACLE_LINKS,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = Complex64::new(1.0, 0.0);
    for v in &geom.vertices {
        let m = v.star.iter().fold(0usize, |m, &l| m | 1 << l);
        let old = amps.clone();
        for (b, a) in amps.iter_mut().enumerate() {
            *a = (old[b] + old[b ^ m]) * 0.5;
        }
    }
    let mut psi = StateVector::from_amplitudes(n, amps)?;
    psi.normalize();
    Ok(psi)
}

pub struct OracleContext {
    geom: LatticeGeometry,
    star_span: Echelon,
    stars: Vec<u64>,
    state: DecoheredState,
    p_x: f64,
    beta: NishimoriBeta,
}

impl OracleContext {
    pub fn new(geom: &LatticeGeometry, p_x: f64) -> Result<Self> {
        let beta = nishimori_beta(p_x)?;
        let psi = fixed_point_state(geom)?;
        let state = decohere(&psi, geom, p_x)?;
        let n = geom.n_links();
        let mut star_span = Echelon::new(n);
        let mut stars = Vec::new();
        for v in &geom.vertices {
            let row = BitVec::from_indices(n, v.star.iter().copied());
            if star_span.insert(&row) {
                stars.push(row.to_mask());
            }
        }
        Ok(Self {
            geom: geom.clone(),
            star_span,
            stars,
            state,
            p_x,
            beta,
        })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }

    /// `s ⊕ s'` lies in the star span.
    pub fn same_class(&self, s: &OmegaBasisLabel, s_prime: &OmegaBasisLabel) -> bool {
        let n = self.geom.n_links();
        self.star_span.contains(&BitVec::from_mask(n, s.to_mask() ^ s_prime.to_mask()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSample {
    pub s: u64,
    pub s_prime: u64,
    pub same_class: bool,
    pub lhs: f64,
    /// `δ Λ K₀ / 2^N`.
    pub rhs: f64,
    /// `δ Λ Z' / (2^{N + N_BV} cosh^{N_BL} β)`; `None` at `p = 0`.
    pub rhs_full_normalization: Option<f64>,
    /// The same expression with the exponent sign of `Z'` reversed.
    pub rhs_reversed_sign: Option<f64>,
    /// `|lhs - rhs| / max(|rhs|, 2^{-N})`.
    pub relative_residual: f64,
    /// `|lhs - rhs| ≤ 1e-10 · max(1, |rhs|)`.
    pub matched: bool,
}

pub fn matrix_element_oracle(
    ctx: &OracleContext,
    s: &OmegaBasisLabel,
    s_prime: &OmegaBasisLabel,
) -> Result<OracleSample> {
    let geom = &ctx.geom;
    let n = geom.n_links();
    if s.len() != n || s_prime.len() != n {
        return Err(GhError::DimensionMismatch {
            expected: n,
            found: if s.len() != n { s.len() } else { s_prime.len() },
        });
    }
    let lhs = ctx.state.matrix_element(s.to_mask(), s_prime.to_mask()).re;
    let same_class = ctx.same_class(s, s_prime);
    let scale = (n as f64).exp2();
    let (rhs, full, reversed) = if same_class {
        let lam = boundary_factor(s, geom)?;
        let rhs = lam * k0(geom, s, ctx.beta)? / scale;
        let (full, reversed) = match ctx.beta {
            NishimoriBeta::Finite(b) => {
                let inst = RbimInstance::from_omega_label(geom, s, b)?;
                let norm = scale * (inst.n_free() as f64).exp2() * b.cosh().powi(inst.bonds.len() as i32);
                (
                    Some(lam * inst.exact_partition()? / norm),
                    Some(lam * inst.partition_reversed_sign()? / norm),
                )
            }
            NishimoriBeta::Infinite => (None, None),
        };
        (rhs, full, reversed)
    } else {
        (0.0, Some(0.0), Some(0.0))
    };
    let diff = (lhs - rhs).abs();
    Ok(OracleSample {
        s: s.to_mask(),
        s_prime: s_prime.to_mask(),
        same_class,
        lhs,
        rhs,
        rhs_full_normalization: full,
        rhs_reversed_sign: reversed,
        relative_residual: diff / rhs.abs().max(1.0 / scale),
        matched: diff <= 1e-10 * rhs.abs().max(1.0),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub lx: usize,
    pub ly: usize,
    pub p_x: f64,
    pub beta: NishimoriBeta,
    pub n_links: usize,
    pub samples: usize,
    pub same_class_pairs: usize,
    pub nonzero_rhs: usize,
    pub worst_relative_residual: f64,
    /// Largest `|lhs - rhs_reversed_sign| / max(|lhs|, 2^{-N})`.
    pub worst_reversed_sign_residual: Option<f64>,
    pub tol: f64,
    pub passed: bool,
    pub pairs: Vec<OracleSample>,
}

/// Random pairs: `s` uniform; three in four `s'` differ from `s` by a
/// random product of stars, the rest are uniform.
pub fn run_oracle(geom: &LatticeGeometry, p_x: f64, samples: usize, seed: u64, tol: f64) -> Result<OracleReport> {
    let ctx = OracleContext::new(geom, p_x)?;
    let n = geom.n_links();
    let mut rng = stream_rng(seed, 0);
    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let s = rng.random_range(0..1u64 << n);
        let sp = if rng.random_range(0..4) < 3 {
            ctx.stars.iter().filter(|_| rng.random::<bool>()).fold(s, |m, &st| m ^ st)
        } else {
            rng.random_range(0..1u64 << n)
        };
        pairs.push((s, sp));
    }
    let out: Vec<OracleSample> = pairs
        .iter()
        .map(|&(s, sp)| {
            matrix_element_oracle(&ctx, &OmegaBasisLabel::from_mask(n, s), &OmegaBasisLabel::from_mask(n, sp))
        })
        .collect::<Result<_>>()?;
    let worst = out.iter().map(|o| o.relative_residual).fold(0.0, f64::max);
    let floor = 1.0 / (n as f64).exp2();
    let worst_rev = match ctx.beta {
        NishimoriBeta::Finite(_) => Some(
            out.iter()
                .filter_map(|o| o.rhs_reversed_sign.map(|r| (o.lhs - r).abs() / o.lhs.abs().max(floor)))
                .fold(0.0, f64::max),
        ),
        NishimoriBeta::Infinite => None,
    };
    Ok(OracleReport {
        lx: geom.lx,
        ly: geom.ly,
        p_x: ctx.p_x,
        beta: ctx.beta,
        n_links: n,
        samples,
        same_class_pairs: out.iter().filter(|o| o.same_class).count(),
        nonzero_rhs: out.iter().filter(|o| o.rhs != 0.0).count(),
        worst_relative_residual: worst,
        worst_reversed_sign_residual: worst_rev,
        tol,
        passed: worst <= tol,
        pairs: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbim::loop_expansion;

    #[test]
    fn all_up_pair_matches() {
        let g = LatticeGeometry::new(2, 2).unwrap();
        let ctx = OracleContext::new(&g, 0.1).unwrap();
        let up = OmegaBasisLabel::all_up(g.n_links());
        let o = matrix_element_oracle(&ctx, &up, &up).unwrap();
        assert!(o.matched && o.relative_residual < 1e-12, "{o:?}");
        assert!(o.lhs > 0.0);
    }

    #[test]
    fn star_shift_keeps_element() {
        let g = LatticeGeometry::new(3, 2).unwrap();
        let ctx = OracleContext::new(&g, 0.2).unwrap();
        let n = g.n_links();
        let s = OmegaBasisLabel::from_mask(n, 0b0_0100_1000_0010);
        let star = g.vertices[1].star.iter().fold(0u64, |m, &l| m | 1 << l);
        let shifted = OmegaBasisLabel::from_mask(n, s.to_mask() ^ star);
        let a = matrix_element_oracle(&ctx, &s, &s).unwrap();
        let b = matrix_element_oracle(&ctx, &s, &shifted).unwrap();
        assert!((a.lhs - b.lhs).abs() < 1e-15);
        assert!(b.matched);
    }

    #[test]
    fn loop_sum_matches_partition_function() {
        let g = LatticeGeometry::new(3, 2).unwrap();
        let n = g.n_links();
        for mask in [0u64, 0b1_0010_0100_1001, 0b0_1111_0000_1010] {
            let s = OmegaBasisLabel::from_mask(n, mask);
            let p = 0.15;
            let k = loop_expansion(&g, &s, p).unwrap();
            let z = k0(&g, &s, nishimori_beta(p).unwrap()).unwrap();
            let (a, b) = crate::rbim::smooth_signs(&s, &g).unwrap();
            assert!((k[0] - z).abs() < 1e-12);
            assert!((k[1] - a as f64 * k[0]).abs() < 1e-12);
            assert!((k[2] - b as f64 * k[0]).abs() < 1e-12);
            assert!((k[3] - (a * b) as f64 * k[0]).abs() < 1e-12);
        }
    }
}
