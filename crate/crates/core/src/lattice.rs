//! Open square lattice with rough top/bottom and smooth left/right edges.
//!
//! `lx` counts vertex columns and `ly` vertex rows. Every vertex column has
//! a dangling link above its top vertex and below its bottom vertex, so the
//! top and bottom edges are rough. Plaquettes come in `ly + 1` rows of
//! `lx - 1`: the first and last rows are three-link plaquettes closed by the
//! dangling links, the rest are ordinary four-link squares.
//!
//! Link ids are assigned in raster order: the top dangling row, then for each
//! vertex row its horizontal links followed by the vertical links hanging
//! below it, then the bottom dangling row.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{GhError, Result};
use crate::pauli::PauliOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    TopDangling,
    Horizontal,
    Vertical,
    BottomDangling,
}

/// Boundary class of a link. A link is rough if it touches fewer than two
/// vertices and smooth if it borders fewer than two plaquettes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkClass {
    Bulk,
    Rough,
    Smooth,
    Corner,
}

#[derive(Clone, Debug, Serialize)]
pub struct Link {
    pub id: usize,
    pub kind: LinkKind,
    /// Vertex row the link hangs from (for verticals, the upper end).
    pub row: usize,
    /// Vertex column (for horizontals, the left end).
    pub col: usize,
    pub vertices: Vec<usize>,
    pub plaquettes: Vec<usize>,
    pub class: LinkClass,
}

impl Link {
    pub fn is_rough(&self) -> bool {
        self.vertices.len() < 2
    }

    pub fn is_smooth(&self) -> bool {
        self.plaquettes.len() < 2
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Vertex {
    pub id: usize,
    pub row: usize,
    pub col: usize,
    /// Incident links, ascending.
    pub star: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Plaquette {
    pub id: usize,
    /// Plaquette row in `0..=ly`; row `r` sits between vertex rows `r-1`
    /// and `r`.
    pub row: usize,
    pub col: usize,
    /// Boundary links, ascending.
    pub boundary: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeGeometry {
    pub lx: usize,
    pub ly: usize,
    pub links: Vec<Link>,
    pub vertices: Vec<Vertex>,
    pub plaquettes: Vec<Plaquette>,
}

/// Supports of the boundary logical strings and of the two boundary
/// products, as link ids.
#[derive(Clone, Debug, Serialize)]
pub struct LogicalSupports {
    /// `σ^x` on every top dangling link.
    pub logical_x: Vec<usize>,
    /// `σ^z` along the left smooth column, top to bottom.
    pub logical_z: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrySupports {
    /// All rough links: `∏ σ^x` over them is the product of every vertex star.
    pub rough_all: Vec<usize>,
    /// All smooth links: `∏ σ^z` over them is the product of every plaquette.
    pub smooth_all: Vec<usize>,
}

impl LatticeGeometry {
    pub fn new(lx: usize, ly: usize) -> Result<Self> {
        if lx < 2 || ly < 1 {
            return Err(GhError::InvalidGeometry {
                lx,
                ly,
                reason: "need lx >= 2 and ly >= 1".into(),
            });
        }
        if lx > 64 || ly > 64 {
            return Err(GhError::InvalidGeometry {
                lx,
                ly,
                reason: "dimensions above 64 are not supported".into(),
            });
        }
        let idx = LinkIndex { lx, ly };
        let n = idx.n_links();
        let mut links: Vec<Link> = (0..n)
            .map(|id| {
                let (kind, row, col) = idx.locate(id);
                Link {
                    id,
                    kind,
                    row,
                    col,
                    vertices: Vec::new(),
                    plaquettes: Vec::new(),
                    class: LinkClass::Bulk,
                }
            })
            .collect();

        let mut vertices = Vec::with_capacity(lx * ly);
        for r in 0..ly {
            for c in 0..lx {
                let mut star = Vec::with_capacity(4);
                star.push(if r == 0 { idx.top(c) } else { idx.vertical(r - 1, c) });
                if c > 0 {
                    star.push(idx.horizontal(r, c - 1));
                }
                if c + 1 < lx {
                    star.push(idx.horizontal(r, c));
                }
                star.push(if r + 1 == ly { idx.bottom(c) } else { idx.vertical(r, c) });
                star.sort_unstable();
                vertices.push(Vertex {
                    id: r * lx + c,
                    row: r,
                    col: c,
                    star,
                });
            }
        }

        let mut plaquettes = Vec::with_capacity((lx - 1) * (ly + 1));
        for pr in 0..=ly {
            for c in 0..lx - 1 {
                let mut boundary = if pr == 0 {
                    vec![idx.top(c), idx.top(c + 1), idx.horizontal(0, c)]
                } else if pr == ly {
                    vec![idx.horizontal(ly - 1, c), idx.bottom(c), idx.bottom(c + 1)]
                } else {
                    vec![
                        idx.horizontal(pr - 1, c),
                        idx.vertical(pr - 1, c),
                        idx.vertical(pr - 1, c + 1),
                        idx.horizontal(pr, c),
                    ]
                };
                boundary.sort_unstable();
                plaquettes.push(Plaquette {
                    id: pr * (lx - 1) + c,
                    row: pr,
                    col: c,
                    boundary,
                });
            }
        }

        for v in &vertices {
            for &l in &v.star {
                links[l].vertices.push(v.id);
            }
        }
        for p in &plaquettes {
            for &l in &p.boundary {
                links[l].plaquettes.push(p.id);
            }
        }
        for link in &mut links {
            link.class = match (link.is_rough(), link.is_smooth()) {
                (false, false) => LinkClass::Bulk,
                (true, false) => LinkClass::Rough,
                (false, true) => LinkClass::Smooth,
                (true, true) => LinkClass::Corner,
            };
        }

        Ok(Self {
            lx,
            ly,
            links,
            vertices,
            plaquettes,
        })
    }

    pub fn n_links(&self) -> usize {
        self.links.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_plaquettes(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn index(&self) -> LinkIndex {
        LinkIndex {
            lx: self.lx,
            ly: self.ly,
        }
    }

    pub fn rough_links(&self) -> Vec<usize> {
        self.links.iter().filter(|l| l.is_rough()).map(|l| l.id).collect()
    }

    pub fn smooth_links(&self) -> Vec<usize> {
        self.links.iter().filter(|l| l.is_smooth()).map(|l| l.id).collect()
    }

    /// Links that carry a `σ^x` field and are dephased by the channel.
    pub fn non_smooth_links(&self) -> Vec<usize> {
        self.links.iter().filter(|l| !l.is_smooth()).map(|l| l.id).collect()
    }

    /// Links that carry a `σ^z` field.
    pub fn non_rough_links(&self) -> Vec<usize> {
        self.links.iter().filter(|l| !l.is_rough()).map(|l| l.id).collect()
    }

    /// Smooth path along vertex column `col` (0 or `lx-1`), top to bottom.
    pub fn smooth_column(&self, col: usize) -> Vec<usize> {
        assert!(col == 0 || col + 1 == self.lx);
        let idx = self.index();
        let mut path = vec![idx.top(col)];
        for r in 0..self.ly - 1 {
            path.push(idx.vertical(r, col));
        }
        path.push(idx.bottom(col));
        path
    }

    pub fn logical_supports(&self) -> LogicalSupports {
        let idx = self.index();
        LogicalSupports {
            logical_x: (0..self.lx).map(|c| idx.top(c)).collect(),
            logical_z: self.smooth_column(0),
        }
    }

    pub fn symmetry_supports(&self) -> SymmetrySupports {
        SymmetrySupports {
            rough_all: self.rough_links(),
            smooth_all: self.smooth_links(),
        }
    }

    /// `L_x` on the link register.
    pub fn logical_x(&self) -> PauliOperator {
        PauliOperator::x_on(self.n_links(), &self.logical_supports().logical_x)
    }

    /// `L_z` on the link register.
    pub fn logical_z(&self) -> PauliOperator {
        PauliOperator::z_on(self.n_links(), &self.logical_supports().logical_z)
    }

    /// Star operator `∏_{ℓ∋v} σ^x_ℓ` on the link register.
    pub fn star(&self, v: usize) -> PauliOperator {
        PauliOperator::x_on(self.n_links(), &self.vertices[v].star)
    }

    /// Plaquette operator `∏_{ℓ∈∂p} σ^z_ℓ` on the link register.
    pub fn plaquette(&self, p: usize) -> PauliOperator {
        PauliOperator::z_on(self.n_links(), &self.plaquettes[p].boundary)
    }

    pub fn rough_product(&self) -> PauliOperator {
        PauliOperator::x_on(self.n_links(), &self.rough_links())
    }

    pub fn smooth_product(&self) -> PauliOperator {
        PauliOperator::z_on(self.n_links(), &self.smooth_links())
    }

    /// Plaquette at `(row, col)` if it exists.
    pub fn plaquette_at(&self, row: usize, col: usize) -> Option<usize> {
        (row <= self.ly && col + 1 < self.lx).then(|| row * (self.lx - 1) + col)
    }

    pub fn is_bulk_plaquette(&self, p: usize) -> bool {
        self.plaquettes[p].boundary.len() == 4
    }

    /// Two adjacent four-link plaquettes whose midpoint is closest to the
    /// lattice centre, ties broken by lowest ids.
    pub fn central_plaquette_pair(&self) -> Option<(usize, usize)> {
        let centre = ((self.lx as f64 - 1.0) / 2.0, (self.ly as f64 - 1.0) / 2.0);
        let pos = |p: &Plaquette| (p.col as f64 + 0.5, p.row as f64 - 0.5);
        let mut best: Option<((usize, usize), f64)> = None;
        for a in self.plaquettes.iter().filter(|p| self.is_bulk_plaquette(p.id)) {
            let neighbours = [
                self.plaquette_at(a.row, a.col + 1),
                self.plaquette_at(a.row + 1, a.col),
            ];
            for b in neighbours.into_iter().flatten() {
                if !self.is_bulk_plaquette(b) {
                    continue;
                }
                let (pa, pb) = (pos(a), pos(&self.plaquettes[b]));
                let mid = ((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0);
                let d = (mid.0 - centre.0).powi(2) + (mid.1 - centre.1).powi(2);
                let better = match best {
                    None => true,
                    Some((ids, bd)) => d < bd - 1e-12 || ((d - bd).abs() <= 1e-12 && (a.id, b) < ids),
                };
                if better {
                    best = Some(((a.id, b), d));
                }
            }
        }
        best.map(|(ids, _)| ids)
    }

    /// ASCII picture: `o` vertices, `---` horizontal links, `|` bulk or
    /// rough vertical links and `:` smooth ones.
    pub fn render_ascii(&self) -> String {
        let mut out = String::new();
        let idx = self.index();
        let vertical_row = |out: &mut String, ids: &[usize]| {
            for (c, &l) in ids.iter().enumerate() {
                let ch = if self.links[l].is_smooth() { ':' } else { '|' };
                if c > 0 {
                    out.push_str("   ");
                }
                out.push(ch);
            }
            out.push('\n');
        };
        let top: Vec<usize> = (0..self.lx).map(|c| idx.top(c)).collect();
        vertical_row(&mut out, &top);
        for r in 0..self.ly {
            for c in 0..self.lx {
                if c > 0 {
                    out.push_str("---");
                }
                out.push('o');
            }
            out.push('\n');
            let below: Vec<usize> = (0..self.lx)
                .map(|c| if r + 1 == self.ly { idx.bottom(c) } else { idx.vertical(r, c) })
                .collect();
            vertical_row(&mut out, &below);
        }
        let _ = writeln!(
            out,
            "{} links, {} vertices, {} plaquettes",
            self.n_links(),
            self.n_vertices(),
            self.n_plaquettes()
        );
        out
    }
}

/// Arithmetic link numbering for an `lx x ly` lattice.
#[derive(Clone, Copy, Debug)]
pub struct LinkIndex {
    pub lx: usize,
    pub ly: usize,
}

impl LinkIndex {
    pub fn n_links(&self) -> usize {
        (self.lx - 1) * self.ly + self.lx * (self.ly - 1) + 2 * self.lx
    }

    fn row_start(&self, r: usize) -> usize {
        self.lx + r * (2 * self.lx - 1)
    }

    pub fn top(&self, c: usize) -> usize {
        c
    }

    pub fn horizontal(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.ly && c + 1 < self.lx);
        self.row_start(r) + c
    }

    /// Vertical link between vertex rows `r` and `r + 1`.
    pub fn vertical(&self, r: usize, c: usize) -> usize {
        debug_assert!(r + 1 < self.ly && c < self.lx);
        self.row_start(r) + self.lx - 1 + c
    }

    pub fn bottom(&self, c: usize) -> usize {
        self.row_start(self.ly - 1) + self.lx - 1 + c
    }

    pub fn locate(&self, id: usize) -> (LinkKind, usize, usize) {
        let lx = self.lx;
        if id < lx {
            return (LinkKind::TopDangling, 0, id);
        }
        let bottom0 = self.bottom(0);
        if id >= bottom0 {
            return (LinkKind::BottomDangling, self.ly - 1, id - bottom0);
        }
        let off = id - lx;
        let (r, k) = (off / (2 * lx - 1), off % (2 * lx - 1));
        if k < lx - 1 {
            (LinkKind::Horizontal, r, k)
        } else {
            (LinkKind::Vertical, r, k - (lx - 1))
        }
    }
}

/// Qubit layout of the gauge-Higgs model: matter qubits on vertices, then
/// dual matter on plaquettes, then gauge qubits on links.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LghmLayout {
    pub n_vertices: usize,
    pub n_plaquettes: usize,
    pub n_links: usize,
}

impl LghmLayout {
    pub fn new(geom: &LatticeGeometry) -> Self {
        Self {
            n_vertices: geom.n_vertices(),
            n_plaquettes: geom.n_plaquettes(),
            n_links: geom.n_links(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_vertices + self.n_plaquettes + self.n_links
    }

    pub fn vertex(&self, v: usize) -> usize {
        v
    }

    pub fn plaquette(&self, p: usize) -> usize {
        self.n_vertices + p
    }

    pub fn link(&self, l: usize) -> usize {
        self.n_vertices + self.n_plaquettes + l
    }

    pub fn link_offset(&self) -> usize {
        self.n_vertices + self.n_plaquettes
    }

    /// Lift a link-register operator into the full register.
    pub fn embed_links(&self, op: &PauliOperator) -> PauliOperator {
        op.embed(self.n_qubits(), self.link_offset())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub lx: usize,
    pub ly: usize,
    pub n_links: usize,
    pub n_vertices: usize,
    pub n_plaquettes: usize,
    pub logical_qubits: isize,
    pub rough_links: Vec<usize>,
    pub smooth_links: Vec<usize>,
    pub corner_links: Vec<usize>,
    pub logical: LogicalSupports,
    pub symmetries: SymmetrySupports,
    pub geometry: LatticeGeometry,
}

impl GeometryReport {
    pub fn new(geom: &LatticeGeometry) -> Self {
        Self {
            lx: geom.lx,
            ly: geom.ly,
            n_links: geom.n_links(),
            n_vertices: geom.n_vertices(),
            n_plaquettes: geom.n_plaquettes(),
            logical_qubits: geom.n_links() as isize - (geom.n_vertices() + geom.n_plaquettes()) as isize,
            rough_links: geom.rough_links(),
            smooth_links: geom.smooth_links(),
            corner_links: geom
                .links
                .iter()
                .filter(|l| l.class == LinkClass::Corner)
                .map(|l| l.id)
                .collect(),
            logical: geom.logical_supports(),
            symmetries: geom.symmetry_supports(),
            geometry: geom.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_two_counts() {
        let g = LatticeGeometry::new(3, 2).unwrap();
        assert_eq!((g.n_links(), g.n_vertices(), g.n_plaquettes()), (13, 6, 6));
        assert_eq!(g.rough_links().len(), 6);
        assert_eq!(g.smooth_links().len(), 6);
        assert_eq!(g.non_smooth_links().len(), 7);
        assert_eq!(g.non_rough_links().len(), 7);
        assert_eq!(g.central_plaquette_pair(), Some((2, 3)));
        assert_eq!(g.plaquettes[2].boundary, vec![3, 5, 6, 8]);
        assert_eq!(g.plaquettes[3].boundary, vec![4, 6, 7, 9]);
    }

    #[test]
    fn locate_inverts_constructors() {
        for (lx, ly) in [(2, 1), (3, 2), (4, 3), (5, 4)] {
            let idx = LinkIndex { lx, ly };
            for id in 0..idx.n_links() {
                let (kind, r, c) = idx.locate(id);
                let back = match kind {
                    LinkKind::TopDangling => idx.top(c),
                    LinkKind::Horizontal => idx.horizontal(r, c),
                    LinkKind::Vertical => idx.vertical(r, c),
                    LinkKind::BottomDangling => idx.bottom(c),
                };
                assert_eq!(back, id);
            }
        }
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(LatticeGeometry::new(1, 3).is_err());
        assert!(LatticeGeometry::new(3, 0).is_err());
    }

    #[test]
    fn ascii_render_has_one_line_per_row() {
        let g = LatticeGeometry::new(3, 2).unwrap();
        let s = g.render_ascii();
        assert_eq!(s.lines().count(), 2 * 2 + 2);
        assert!(s.starts_with(":   |   :"));
    }
}
