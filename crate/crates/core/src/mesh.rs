//! Structured triangulations of the unit square with edge/cell adjacency.
//!
//! Cells are counter-clockwise vertex triples. Local edge `i` of a cell is the
//! edge opposite local vertex `i`, traversed in the counter-clockwise direction
//! (so the rotate-right normal of the traversal direction is the outward
//! normal). Every global edge stores its endpoints with the lower vertex index
//! first; its canonical normal is the lower-to-higher tangent rotated 90
//! degrees clockwise.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::io::Write;

/// Diagonal layout of the squares in the structured grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// Diagonal direction alternates in a checkerboard: square (i, j) uses the
    /// "/" diagonal when i + j is even, "\" otherwise.
    UnionJack,
    /// All squares split along the "/" diagonal.
    Right,
    /// All squares split along the "\" diagonal.
    Left,
}

impl Pattern {
    fn slash(self, i: usize, j: usize) -> bool {
        match self {
            Pattern::UnionJack => (i + j) % 2 == 0,
            Pattern::Right => true,
            Pattern::Left => false,
        }
    }
}

impl std::str::FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "union-jack" | "union_jack" | "uj" => Ok(Pattern::UnionJack),
            "right" => Ok(Pattern::Right),
            "left" => Ok(Pattern::Left),
            other => Err(Error::invalid(format!("unknown mesh pattern `{other}`"))),
        }
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Pattern::UnionJack => "union-jack",
            Pattern::Right => "right",
            Pattern::Left => "left",
        })
    }
}

/// Triangulation of the unit square.
#[derive(Clone, Debug)]
pub struct Mesh {
    /// Vertex coordinates.
    pub vertices: Vec<[f64; 2]>,
    /// Counter-clockwise vertex triples.
    pub cells: Vec<[usize; 3]>,
    /// Edge endpoints, lower vertex index first.
    pub edges: Vec<[usize; 2]>,
    /// Per cell: the three edge indices (local edge i opposite vertex i) with a
    /// sign that is +1 when the cell's outward normal on that edge equals the
    /// edge's canonical normal.
    pub cell_edges: Vec<[(usize, i8); 3]>,
    /// Adjacent cells per edge (one entry for boundary edges).
    pub edge_cells: Vec<Vec<usize>>,
    /// True for boundary edges.
    pub boundary: Vec<bool>,
    /// Maximum cell diameter.
    pub h_max: f64,
}

impl Mesh {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_interior_edges(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    /// Cell vertex coordinates.
    pub fn cell_vertices(&self, cell: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.cells[cell];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area (positive for counter-clockwise cells).
    pub fn cell_area(&self, cell: usize) -> f64 {
        let [p, q, r] = self.cell_vertices(cell);
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
    }

    /// Local index (0..3) of `edge` within `cell`.
    pub fn local_edge(&self, cell: usize, edge: usize) -> Option<usize> {
        self.cell_edges[cell].iter().position(|&(e, _)| e == edge)
    }

    /// Canonical unit normal, length and midpoint of an edge.
    pub fn edge_geometry(&self, edge: usize) -> Result<([f64; 2], f64, [f64; 2])> {
        if edge >= self.edges.len() {
            return Err(Error::invalid(format!(
                "edge index {edge} out of range ({} edges)",
                self.edges.len()
            )));
        }
        let [a, b] = self.edges[edge];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let tangent = [pb[0] - pa[0], pb[1] - pa[1]];
        let len = tangent[0].hypot(tangent[1]);
        let normal = [tangent[1] / len, -tangent[0] / len];
        let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        Ok((normal, len, mid))
    }

    /// Plain-text dump (`vertex x y`, `cell v0 v1 v2`, `edge v0 v1 b` lines).
    pub fn dump(&self, mut w: impl Write) -> Result<()> {
        for v in &self.vertices {
            writeln!(w, "vertex {:.17e} {:.17e}", v[0], v[1])?;
        }
        for c in &self.cells {
            writeln!(w, "cell {} {} {}", c[0], c[1], c[2])?;
        }
        for (e, b) in self.edges.iter().zip(&self.boundary) {
            writeln!(w, "edge {} {} {}", e[0], e[1], u8::from(*b))?;
        }
        Ok(())
    }
}

/// Build an N x N structured triangulation of the unit square.
pub fn build_unit_square_mesh(cells_per_side: usize, pattern: Pattern) -> Result<Mesh> {
    let n = cells_per_side;
    if n == 0 {
        return Err(Error::invalid("cells_per_side must be at least 1"));
    }
    n.checked_add(1)
        .and_then(|m| m.checked_mul(m))
        .and_then(|nv| nv.checked_mul(4))
        .ok_or_else(|| Error::invalid("cells_per_side overflows index arithmetic"))?;

    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }

    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (ll, lr) = (vid(i, j), vid(i + 1, j));
            let (ur, ul) = (vid(i + 1, j + 1), vid(i, j + 1));
            if pattern.slash(i, j) {
                cells.push([ll, lr, ur]);
                cells.push([ll, ur, ul]);
            } else {
                cells.push([ll, lr, ul]);
                cells.push([lr, ur, ul]);
            }
        }
    }

    let mut edge_ids: HashMap<[usize; 2], usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut cell_edges = Vec::with_capacity(cells.len());
    let mut edge_cells: Vec<Vec<usize>> = Vec::new();
    for (c, &[a, b, d]) in cells.iter().enumerate() {
        // CCW traversal of the edges opposite vertices 0, 1, 2.
        let traversal = [(b, d), (d, a), (a, b)];
        let mut ce = [(0usize, 0i8); 3];
        for (slot, &(p, q)) in traversal.iter().enumerate() {
            let key = [p.min(q), p.max(q)];
            let id = *edge_ids.entry(key).or_insert_with(|| {
                edges.push(key);
                edge_cells.push(Vec::with_capacity(2));
                edges.len() - 1
            });
            ce[slot] = (id, if p < q { 1 } else { -1 });
            edge_cells[id].push(c);
        }
        cell_edges.push(ce);
    }
    let boundary = edge_cells.iter().map(|cs| cs.len() == 1).collect();

    let mut h_max = 0.0f64;
    for &[a, b] in &edges {
        let (pa, pb) = (vertices[a], vertices[b]);
        h_max = h_max.max((pb[0] - pa[0]).hypot(pb[1] - pa[1]));
    }

    Ok(Mesh {
        vertices,
        cells,
        edges,
        cell_edges,
        edge_cells,
        boundary,
        h_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_cell_mesh_counts() {
        let m = build_unit_square_mesh(1, Pattern::Right).unwrap();
        assert_eq!(m.n_cells(), 2);
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.n_edges(), 5);
        assert_eq!(m.n_interior_edges(), 1);
    }

    #[test]
    fn union_jack_n2_counts_and_euler() {
        let m = build_unit_square_mesh(2, Pattern::UnionJack).unwrap();
        assert_eq!(m.n_cells(), 8);
        assert_eq!(m.vertices.len(), 9);
        assert_eq!(m.n_edges(), 16);
        let euler = m.vertices.len() as i64 - m.n_edges() as i64 + m.n_cells() as i64;
        assert_eq!(euler, 1);
    }

    #[test]
    fn area_partition_n40() {
        let m = build_unit_square_mesh(40, Pattern::UnionJack).unwrap();
        let total: f64 = (0..m.n_cells()).map(|c| m.cell_area(c)).sum();
        assert!((total - 1.0).abs() < 1e-12, "total area {total}");
    }

    #[test]
    fn zero_cells_rejected() {
        assert!(build_unit_square_mesh(0, Pattern::Right).is_err());
    }

    #[test]
    fn edge_geometry_conventions() {
        // Horizontal edge (0,0)-(0.5,0): normal (0,-1), length 0.5.
        let m = build_unit_square_mesh(2, Pattern::UnionJack).unwrap();
        let e = m.edges.iter().position(|&[a, b]| {
            m.vertices[a] == [0.0, 0.0] && m.vertices[b] == [0.5, 0.0]
        });
        let (n, len, mid) = m.edge_geometry(e.unwrap()).unwrap();
        assert!((n[0] - 0.0).abs() < 1e-15 && (n[1] + 1.0).abs() < 1e-15);
        assert!((len - 0.5).abs() < 1e-15);
        assert!((mid[0] - 0.25).abs() < 1e-15 && mid[1].abs() < 1e-15);

        // Diagonal edge (0,0)-(0.5,0.5): length sqrt(2)/2, normal (1,-1)/sqrt(2).
        let e = m.edges.iter().position(|&[a, b]| {
            m.vertices[a] == [0.0, 0.0] && m.vertices[b] == [0.5, 0.5]
        });
        let (n, len, _) = m.edge_geometry(e.unwrap()).unwrap();
        assert!((len - 0.5 * 2.0f64.sqrt()).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        assert!((n[0] - s).abs() < 1e-15 && (n[1] + s).abs() < 1e-15);
    }

    #[test]
    fn edge_geometry_out_of_range() {
        let m = build_unit_square_mesh(1, Pattern::Right).unwrap();
        assert!(m.edge_geometry(99).is_err());
    }

    #[test]
    fn h_max_is_sqrt2_over_n() {
        for n in [1usize, 2, 5, 40] {
            let m = build_unit_square_mesh(n, Pattern::UnionJack).unwrap();
            assert!((m.h_max - 2.0f64.sqrt() / n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn interior_edge_signs_are_opposite_and_match_geometry() {
        let m = build_unit_square_mesh(3, Pattern::UnionJack).unwrap();
        for e in 0..m.n_edges() {
            let cells = &m.edge_cells[e];
            if m.boundary[e] {
                assert_eq!(cells.len(), 1);
            } else {
                assert_eq!(cells.len(), 2);
                let s0 = m.cell_edges[cells[0]].iter().find(|x| x.0 == e).unwrap().1;
                let s1 = m.cell_edges[cells[1]].iter().find(|x| x.0 == e).unwrap().1;
                assert_eq!(s0 + s1, 0, "edge {e} signs must be opposite");
            }
            // Sign agrees with geometry: outward normal of the cell on this
            // edge equals sign * canonical normal.
            let (n_canon, _, mid) = m.edge_geometry(e).unwrap();
            for &c in cells {
                let sign = m.cell_edges[c].iter().find(|x| x.0 == e).unwrap().1 as f64;
                let centroid = {
                    let vs = m.cell_vertices(c);
                    [
                        (vs[0][0] + vs[1][0] + vs[2][0]) / 3.0,
                        (vs[0][1] + vs[1][1] + vs[2][1]) / 3.0,
                    ]
                };
                // Outward means pointing away from the centroid.
                let to_mid = [mid[0] - centroid[0], mid[1] - centroid[1]];
                let dot = to_mid[0] * sign * n_canon[0] + to_mid[1] * sign * n_canon[1];
                assert!(dot > 0.0, "edge {e} cell {c}: sign does not point outward");
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_unit_square_mesh(7, Pattern::UnionJack).unwrap();
        let b = build_unit_square_mesh(7, Pattern::UnionJack).unwrap();
        assert_eq!(a.vertices, b.vertices);
        assert_eq!(a.cells, b.cells);
        assert_eq!(a.edges, b.edges);
        assert_eq!(a.cell_edges, b.cell_edges);
    }

    #[test]
    fn shape_regularity_constant_across_cells() {
        let m = build_unit_square_mesh(5, Pattern::UnionJack).unwrap();
        let ratio = |c: usize| {
            let vs = m.cell_vertices(c);
            let d = |p: [f64; 2], q: [f64; 2]| (q[0] - p[0]).hypot(q[1] - p[1]);
            let (a, b, cc) = (d(vs[0], vs[1]), d(vs[1], vs[2]), d(vs[2], vs[0]));
            let s = 0.5 * (a + b + cc);
            let inradius = m.cell_area(c) / s;
            a.max(b).max(cc) / inradius
        };
        let r0 = ratio(0);
        for c in 1..m.n_cells() {
            assert!((ratio(c) - r0).abs() < 1e-12);
        }
    }

    #[test]
    fn dump_format() {
        let m = build_unit_square_mesh(1, Pattern::Right).unwrap();
        let mut buf = Vec::new();
        m.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4 + 2 + 5);
        assert!(text.lines().next().unwrap().starts_with("vertex "));
        assert!(text.lines().any(|l| l == "cell 0 1 3" || l == "cell 0 1 2"));
        assert!(text.lines().any(|l| l.starts_with("edge ") && l.ends_with(" 1")));
    }

    proptest! {
        #[test]
        fn invariants_hold_for_all_small_meshes(n in 1usize..9, p in 0usize..3) {
            let pattern = [Pattern::UnionJack, Pattern::Right, Pattern::Left][p];
            let m = build_unit_square_mesh(n, pattern).unwrap();
            // Euler formula.
            prop_assert_eq!(
                m.vertices.len() as i64 - m.n_edges() as i64 + m.n_cells() as i64,
                1
            );
            // Positive areas summing to 1.
            let mut total = 0.0;
            for c in 0..m.n_cells() {
                let a = m.cell_area(c);
                prop_assert!(a > 0.0);
                total += a;
            }
            prop_assert!((total - 1.0).abs() < 1e-12);
            // Unit normals.
            for e in 0..m.n_edges() {
                let (nrm, len, _) = m.edge_geometry(e).unwrap();
                prop_assert!((nrm[0].hypot(nrm[1]) - 1.0).abs() < 1e-14);
                prop_assert!(len > 0.0);
            }
            // Boundary edge count for the unit square.
            let nb = m.boundary.iter().filter(|b| **b).count();
            prop_assert_eq!(nb, 4 * n);
        }
    }
}
