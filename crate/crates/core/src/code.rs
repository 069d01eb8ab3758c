//! Subsystem-code structure of the toric code and the gauge-Higgs model on
//! the open lattice, and the effect of dephasing ("gauging out").

use serde::Serialize;

use crate::error::{GhError, Result};
use crate::lattice::{LatticeGeometry, LghmLayout};
use crate::pauli::{centralizer_in_span, mutually_commuting, PauliOperator, PauliSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    ToricCode,
    GaugeHiggs,
}

#[derive(Clone, Debug)]
pub struct CodeStructure {
    pub model: Model,
    pub n_qubits: usize,
    /// Generators of the gauge group.
    pub gauge: PauliSpan,
    /// Local stabilizer generators.
    pub stabilizers: PauliSpan,
    /// Central elements fixed by the choice of symmetry sector rather than
    /// by a local constraint.
    pub sector_symmetries: PauliSpan,
    pub logical_x: PauliOperator,
    pub logical_z: PauliOperator,
    /// Labels of stabilizer generators removed by the last `gauge_out`.
    pub gauged_out: Vec<String>,
}

impl CodeStructure {
    /// Local stabilizers together with the sector symmetries.
    pub fn stabilizer_group(&self) -> Result<PauliSpan> {
        self.stabilizers.union(&self.sector_symmetries)
    }

    /// `n - (rank(gauge) + rank(center)) / 2`.
    pub fn logical_qubits(&self) -> Result<isize> {
        let r = self.gauge.rank();
        let s = self.gauge.center()?.rank();
        Ok(self.n_qubits as isize - ((r + s) / 2) as isize)
    }
}

/// Toric code on the link register: stabilizers `G̃_v` (stars) and `B̃_p`
/// (plaquettes); the gauge group equals the stabilizer group.
pub fn build_tc_code(geom: &LatticeGeometry) -> Result<CodeStructure> {
    let n = geom.n_links();
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for v in 0..geom.n_vertices() {
        gens.push(geom.star(v));
        labels.push(format!("G{v}"));
    }
    for p in 0..geom.n_plaquettes() {
        gens.push(geom.plaquette(p));
        labels.push(format!("B{p}"));
    }
    let stabilizers = PauliSpan::with_labels(n, gens, labels)?;
    Ok(CodeStructure {
        model: Model::ToricCode,
        n_qubits: n,
        gauge: stabilizers.clone(),
        stabilizers,
        sector_symmetries: PauliSpan::new(n, Vec::new())?,
        logical_x: geom.logical_x(),
        logical_z: geom.logical_z(),
        gauged_out: Vec::new(),
    })
}

/// Gauss-law operators of the gauge-Higgs model, `G_v = X_v ∏ σ^x` and
/// `B_p = Z_p ∏ σ^z`, in the layout of [`LghmLayout`].
pub fn lghm_gauss_law(geom: &LatticeGeometry) -> (Vec<PauliOperator>, Vec<PauliOperator>) {
    let lay = LghmLayout::new(geom);
    let n = lay.n_qubits();
    let gv = geom
        .vertices
        .iter()
        .map(|v| {
            let mut q: Vec<usize> = v.star.iter().map(|&l| lay.link(l)).collect();
            q.push(lay.vertex(v.id));
            PauliOperator::x_on(n, &q)
        })
        .collect();
    let bp = geom
        .plaquettes
        .iter()
        .map(|p| {
            let mut q: Vec<usize> = p.boundary.iter().map(|&l| lay.link(l)).collect();
            q.push(lay.plaquette(p.id));
            PauliOperator::z_on(n, &q)
        })
        .collect();
    (gv, bp)
}

/// Gauge-Higgs model. The gauge group is generated by the Hamiltonian terms
/// (`X_v`, `Z_p`, matter hoppings `Z_v σ^z Z_v'` on links with two vertices,
/// dual hoppings `σ^x X_p X_p'` on links with two plaquettes) together with
/// the Gauss-law operators, which act as identity on the physical subspace.
pub fn build_lghm_code(geom: &LatticeGeometry) -> Result<CodeStructure> {
    let lay = LghmLayout::new(geom);
    let n = lay.n_qubits();
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for v in 0..geom.n_vertices() {
        gens.push(PauliOperator::x_on(n, &[lay.vertex(v)]));
        labels.push(format!("X{v}"));
    }
    for p in 0..geom.n_plaquettes() {
        gens.push(PauliOperator::z_on(n, &[lay.plaquette(p)]));
        labels.push(format!("Zp{p}"));
    }
    for link in &geom.links {
        if let [p, q] = link.plaquettes[..] {
            gens.push(PauliOperator::x_on(n, &[lay.plaquette(p), lay.plaquette(q), lay.link(link.id)]));
            labels.push(format!("F{}", link.id));
        }
        if let [u, v] = link.vertices[..] {
            gens.push(PauliOperator::z_on(n, &[lay.vertex(u), lay.vertex(v), lay.link(link.id)]));
            labels.push(format!("M{}", link.id));
        }
    }
    let (gv, bp) = lghm_gauss_law(geom);
    let mut stab = Vec::new();
    let mut stab_labels = Vec::new();
    for (v, g) in gv.into_iter().enumerate() {
        stab.push(g);
        stab_labels.push(format!("G{v}"));
    }
    for (p, b) in bp.into_iter().enumerate() {
        stab.push(b);
        stab_labels.push(format!("B{p}"));
    }
    gens.extend(stab.iter().cloned());
    labels.extend(stab_labels.iter().cloned());

    let all_v: Vec<usize> = (0..geom.n_vertices()).map(|v| lay.vertex(v)).collect();
    let all_p: Vec<usize> = (0..geom.n_plaquettes()).map(|p| lay.plaquette(p)).collect();
    let sector = PauliSpan::with_labels(
        n,
        vec![PauliOperator::x_on(n, &all_v), PauliOperator::z_on(n, &all_p)],
        vec!["Pmatter".into(), "SZdual".into()],
    )?;
    Ok(CodeStructure {
        model: Model::GaugeHiggs,
        n_qubits: n,
        gauge: PauliSpan::with_labels(n, gens, labels)?,
        stabilizers: PauliSpan::with_labels(n, stab, stab_labels)?,
        sector_symmetries: sector,
        logical_x: lay.embed_links(&geom.logical_x()),
        logical_z: lay.embed_links(&geom.logical_z()),
        gauged_out: Vec::new(),
    })
}

/// Add `noise` to the gauge group.
///
/// The new stabilizer group is the subgroup of the old one (local
/// stabilizers plus sector symmetries) commuting with every noise operator.
/// Old generators that anticommute with some noise operator are listed in
/// `gauged_out`. Fails if a logical operator anticommutes with the noise.
pub fn gauge_out(code: &CodeStructure, noise: &[PauliOperator]) -> Result<CodeStructure> {
    for op in noise {
        if op.n_qubits() != code.n_qubits {
            return Err(GhError::DimensionMismatch {
                expected: code.n_qubits,
                found: op.n_qubits(),
            });
        }
        for (name, l) in [("L_x", &code.logical_x), ("L_z", &code.logical_z)] {
            if !l.commutes(op)? {
                return Err(GhError::LogicalDestroyed(format!("{name} (noise {op})")));
            }
        }
    }
    let old = code.stabilizer_group()?;
    let survivors = centralizer_in_span(&old, noise)?;
    let mut gauged_out = Vec::new();
    for (g, label) in code.stabilizers.generators().iter().zip(code.stabilizers.labels()) {
        let mut hit = false;
        for op in noise {
            hit |= !g.commutes(op)?;
        }
        if hit {
            gauged_out.push(label.clone());
        }
    }
    let noise_span = PauliSpan::with_labels(
        code.n_qubits,
        noise.to_vec(),
        (0..noise.len()).map(|i| format!("N{i}")).collect(),
    )?;
    let mut kept_sector = Vec::new();
    let mut kept_labels = Vec::new();
    for (s, label) in code
        .sector_symmetries
        .generators()
        .iter()
        .zip(code.sector_symmetries.labels())
    {
        let mut ok = true;
        for op in noise {
            ok &= s.commutes(op)?;
        }
        if ok {
            kept_sector.push(s.clone());
            kept_labels.push(label.clone());
        }
    }
    Ok(CodeStructure {
        model: code.model,
        n_qubits: code.n_qubits,
        gauge: code.gauge.union(&noise_span)?,
        stabilizers: survivors,
        sector_symmetries: PauliSpan::with_labels(code.n_qubits, kept_sector, kept_labels)?,
        logical_x: code.logical_x.clone(),
        logical_z: code.logical_z.clone(),
        gauged_out,
    })
}

/// `σ^x` on every non-smooth link, lifted into the code's register.
pub fn dephasing_noise(geom: &LatticeGeometry, model: Model) -> Vec<PauliOperator> {
    let links = geom.non_smooth_links();
    match model {
        Model::ToricCode => links.iter().map(|&l| PauliOperator::x_on(geom.n_links(), &[l])).collect(),
        Model::GaugeHiggs => {
            let lay = LghmLayout::new(geom);
            links
                .iter()
                .map(|&l| PauliOperator::x_on(lay.n_qubits(), &[lay.link(l)]))
                .collect()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CodeReport {
    pub model: Model,
    pub lx: usize,
    pub ly: usize,
    pub n_qubits: usize,
    pub gauge_generators: usize,
    pub gauge_rank: usize,
    pub center_rank: usize,
    pub stabilizer_generators: usize,
    pub logical_qubits: isize,
    pub stabilizers_commute: bool,
    pub center_matches_stabilizers: bool,
    pub logicals_commute_with_gauge: bool,
    pub logicals_anticommute: bool,
    pub logicals_outside_gauge: bool,
    pub three_link_stars: usize,
    pub three_link_plaquettes: usize,
    pub passed: bool,
}

/// Check the defining properties of a code and report the counts.
pub fn verify_code(geom: &LatticeGeometry, code: &CodeStructure) -> Result<CodeReport> {
    let center = code.gauge.center()?;
    let stab_group = code.stabilizer_group()?;
    let stabilizers_commute = mutually_commuting(stab_group.generators())?;
    let center_matches_stabilizers = center.same_span(&stab_group);
    let mut logicals_commute_with_gauge = true;
    for g in code.gauge.generators() {
        logicals_commute_with_gauge &= code.logical_x.commutes(g)? && code.logical_z.commutes(g)?;
    }
    let logicals_anticommute = !code.logical_x.commutes(&code.logical_z)?;
    let logicals_outside_gauge = !code.gauge.contains(&code.logical_x) && !code.gauge.contains(&code.logical_z);
    let logical_qubits = code.logical_qubits()?;
    let passed = stabilizers_commute
        && center_matches_stabilizers
        && logicals_commute_with_gauge
        && logicals_anticommute
        && logicals_outside_gauge
        && logical_qubits == 1;
    Ok(CodeReport {
        model: code.model,
        lx: geom.lx,
        ly: geom.ly,
        n_qubits: code.n_qubits,
        gauge_generators: code.gauge.len(),
        gauge_rank: code.gauge.rank(),
        center_rank: center.rank(),
        stabilizer_generators: code.stabilizers.len(),
        logical_qubits,
        stabilizers_commute,
        center_matches_stabilizers,
        logicals_commute_with_gauge,
        logicals_anticommute,
        logicals_outside_gauge,
        three_link_stars: geom.vertices.iter().filter(|v| v.star.len() == 3).count(),
        three_link_plaquettes: geom.plaquettes.iter().filter(|p| p.boundary.len() == 3).count(),
        passed,
    })
}
