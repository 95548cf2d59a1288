//! Global degree-of-freedom maps with orientation signs.
//!
//! Edge DOFs are moments of the normal trace against shifted Legendre
//! polynomials in the edge's canonical (lower-to-higher vertex) direction,
//! weighted by the canonical normal. A cell whose outward normal disagrees
//! with the canonical normal traverses the edge backwards, which flips the
//! sign of the even-degree moments; odd moments pick up two sign flips and
//! keep theirs. Zero normal trace on the boundary is imposed strongly by
//! excluding boundary-edge DOFs from the numbering.

use super::{Family, SpaceSpec};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use std::sync::Arc;

/// Treatment of the domain boundary for velocity spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Zero normal trace on the whole boundary.
    ZeroNormal,
    /// Zero normal trace on y = 0 and y = 1; DOFs on x = 0 identified with the
    /// matching DOFs on x = 1 (periodic strip).
    PeriodicX,
    /// All edge DOFs retained, boundary included. Used by the interpolation
    /// operator, which is defined on fields with arbitrary normal traces.
    Free,
}

/// A pair of boundary edges identified by x-periodicity.
#[derive(Clone, Copy, Debug)]
pub struct GluedPair {
    /// Edge on x = 0.
    pub left_edge: usize,
    /// Edge on x = 1 (owns the global DOFs; canonical normal (1, 0) on both).
    pub right_edge: usize,
}

/// Cell-to-global DOF indexing for one space on one mesh.
#[derive(Debug)]
pub struct DofMap {
    pub spec: SpaceSpec,
    pub bc: BoundaryCondition,
    pub n_global: usize,
    pub n_cells: usize,
    pub dofs_per_cell: usize,
    /// Flattened per-cell global indices (stride `dofs_per_cell`); `None` for
    /// eliminated boundary DOFs.
    cell_dofs: Vec<Option<usize>>,
    /// Flattened per-cell orientation signs (same layout).
    signs: Vec<f64>,
    /// x-periodic edge identifications (empty for `ZeroNormal`).
    pub glued_pairs: Vec<GluedPair>,
}

impl DofMap {
    pub fn cell_dofs(&self, cell: usize) -> &[Option<usize>] {
        let s = self.dofs_per_cell;
        &self.cell_dofs[cell * s..(cell + 1) * s]
    }

    pub fn cell_signs(&self, cell: usize) -> &[f64] {
        let s = self.dofs_per_cell;
        &self.signs[cell * s..(cell + 1) * s]
    }

    /// Local DOF slot of moment `m` on local edge `le`.
    pub fn edge_slot(&self, le: usize, m: usize) -> usize {
        le * self.spec.dofs_per_edge() + m
    }
}

/// Build the DOF map for `spec` on `mesh`.
pub fn build_dof_map(mesh: &Mesh, spec: SpaceSpec, bc: BoundaryCondition) -> Result<Arc<DofMap>> {
    match spec.family {
        Family::DiscontinuousPoly => build_pressure_map(mesh, spec),
        _ => build_velocity_map(mesh, spec, bc),
    }
}

fn build_pressure_map(mesh: &Mesh, spec: SpaceSpec) -> Result<Arc<DofMap>> {
    let per_cell = spec.dim_per_cell();
    let n_cells = mesh.n_cells();
    let cell_dofs = (0..n_cells * per_cell).map(Some).collect();
    Ok(Arc::new(DofMap {
        spec,
        bc: BoundaryCondition::ZeroNormal,
        n_global: n_cells * per_cell,
        n_cells,
        dofs_per_cell: per_cell,
        cell_dofs,
        signs: vec![1.0; n_cells * per_cell],
        glued_pairs: Vec::new(),
    }))
}

fn build_velocity_map(
    mesh: &Mesh,
    spec: SpaceSpec,
    bc: BoundaryCondition,
) -> Result<Arc<DofMap>> {
    super::reference::reference_basis(spec)?; // validates the space
    let per_edge = spec.dofs_per_edge();
    let interior = spec.interior_dofs();
    let per_cell = spec.dim_per_cell();
    let n_cells = mesh.n_cells();

    let glued_pairs = match bc {
        BoundaryCondition::ZeroNormal | BoundaryCondition::Free => Vec::new(),
        BoundaryCondition::PeriodicX => match_periodic_edges(mesh)?,
    };

    // Edge DOFs: owning edges get consecutive blocks of `per_edge` indices, in
    // edge order. Interior edges always own; boundary edges own when free or
    // when they are the x = 1 representative of a glued pair.
    let mut edge_base = vec![None; mesh.n_edges()];
    let mut next = 0usize;
    for e in 0..mesh.n_edges() {
        let owns = !mesh.boundary[e]
            || bc == BoundaryCondition::Free
            || glued_pairs.iter().any(|p| p.right_edge == e);
        if owns {
            edge_base[e] = Some(next);
            next += per_edge;
        }
    }
    for p in &glued_pairs {
        edge_base[p.left_edge] = edge_base[p.right_edge];
    }
    let n_edge_dofs = next;
    let n_global = n_edge_dofs + n_cells * interior;

    let mut cell_dofs = vec![None; n_cells * per_cell];
    let mut signs = vec![1.0; n_cells * per_cell];
    for c in 0..n_cells {
        for le in 0..3 {
            let (edge, s_n) = mesh.cell_edges[c][le];
            let base = edge_base[edge];
            for m in 0..per_edge {
                let slot = c * per_cell + le * per_edge + m;
                cell_dofs[slot] = base.map(|b| b + m);
                // Backwards traversal flips even moments only.
                signs[slot] = if s_n == 1 || m % 2 == 1 { 1.0 } else { -1.0 };
            }
        }
        for i in 0..interior {
            let slot = c * per_cell + 3 * per_edge + i;
            cell_dofs[slot] = Some(n_edge_dofs + c * interior + i);
        }
    }
    Ok(Arc::new(DofMap {
        spec,
        bc,
        n_global,
        n_cells,
        dofs_per_cell: per_cell,
        cell_dofs,
        signs,
        glued_pairs,
    }))
}

/// Pair up boundary edges on x = 0 with their x = 1 counterparts (matched by
/// the y-interval, which is bitwise identical for the structured meshes).
fn match_periodic_edges(mesh: &Mesh) -> Result<Vec<GluedPair>> {
    let mut left: Vec<(u64, u64, usize)> = Vec::new();
    let mut right: Vec<(u64, u64, usize)> = Vec::new();
    for e in 0..mesh.n_edges() {
        if !mesh.boundary[e] {
            continue;
        }
        let [a, b] = mesh.edges[e];
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let key = (pa[1].to_bits(), pb[1].to_bits());
        if pa[0] == 0.0 && pb[0] == 0.0 {
            left.push((key.0, key.1, e));
        } else if pa[0] == 1.0 && pb[0] == 1.0 {
            right.push((key.0, key.1, e));
        }
    }
    if left.len() != right.len() {
        return Err(Error::ProblemSetup(
            "periodic gluing requires matching vertical boundary edges".into(),
        ));
    }
    left.sort_unstable();
    right.sort_unstable();
    let pairs: Vec<GluedPair> = left
        .iter()
        .zip(&right)
        .map(|(l, r)| {
            if (l.0, l.1) != (r.0, r.1) {
                return Err(Error::ProblemSetup(
                    "x = 0 and x = 1 edges do not align for periodic gluing".into(),
                ));
            }
            Ok(GluedPair {
                left_edge: l.2,
                right_edge: r.2,
            })
        })
        .collect::<Result<_>>()?;
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_unit_square_mesh, Pattern};

    #[test]
    fn rt0_two_cells_single_global_dof() {
        let mesh = build_unit_square_mesh(1, Pattern::Right).unwrap();
        let spec = SpaceSpec::raviart_thomas(0).unwrap();
        let map = build_dof_map(&mesh, spec, BoundaryCondition::ZeroNormal).unwrap();
        assert_eq!(map.n_global, 1);
        // Both cells see the same global DOF with opposite signs (moment 0).
        let d0 = map.cell_dofs(0).iter().flatten().copied().collect::<Vec<_>>();
        let d1 = map.cell_dofs(1).iter().flatten().copied().collect::<Vec<_>>();
        assert_eq!(d0, vec![0]);
        assert_eq!(d1, vec![0]);
        let s0: f64 = map
            .cell_dofs(0)
            .iter()
            .zip(map.cell_signs(0))
            .filter(|(d, _)| d.is_some())
            .map(|(_, s)| *s)
            .product();
        let s1: f64 = map
            .cell_dofs(1)
            .iter()
            .zip(map.cell_signs(1))
            .filter(|(d, _)| d.is_some())
            .map(|(_, s)| *s)
            .product();
        assert_eq!(s0 * s1, -1.0);
    }

    #[test]
    fn bdm1_n2_has_sixteen_velocity_dofs() {
        let mesh = build_unit_square_mesh(2, Pattern::UnionJack).unwrap();
        let map = build_dof_map(
            &mesh,
            SpaceSpec::bdm(1).unwrap(),
            BoundaryCondition::ZeroNormal,
        )
        .unwrap();
        assert_eq!(map.n_global, 16);
    }

    #[test]
    fn pressure_one_dof_per_cell() {
        let mesh = build_unit_square_mesh(2, Pattern::UnionJack).unwrap();
        let map = build_dof_map(
            &mesh,
            SpaceSpec::pressure(0).unwrap(),
            BoundaryCondition::ZeroNormal,
        )
        .unwrap();
        assert_eq!(map.n_global, 8);
        let map = build_dof_map(
            &mesh,
            SpaceSpec::pressure(1).unwrap(),
            BoundaryCondition::ZeroNormal,
        )
        .unwrap();
        assert_eq!(map.n_global, 24);
    }

    #[test]
    fn rt1_counts() {
        let mesh = build_unit_square_mesh(2, Pattern::UnionJack).unwrap();
        let map = build_dof_map(
            &mesh,
            SpaceSpec::raviart_thomas(1).unwrap(),
            BoundaryCondition::ZeroNormal,
        )
        .unwrap();
        // 8 interior edges x 2 moments + 8 cells x 2 interior DOFs.
        assert_eq!(map.n_global, 32);
    }

    #[test]
    fn shared_edge_signs_opposite_exactly_for_even_moments() {
        let mesh = build_unit_square_mesh(3, Pattern::UnionJack).unwrap();
        let spec = SpaceSpec::bdm(1).unwrap();
        let map = build_dof_map(&mesh, spec, BoundaryCondition::ZeroNormal).unwrap();
        for e in 0..mesh.n_edges() {
            if mesh.boundary[e] {
                continue;
            }
            let cells = &mesh.edge_cells[e];
            let le0 = mesh.local_edge(cells[0], e).unwrap();
            let le1 = mesh.local_edge(cells[1], e).unwrap();
            for m in 0..2 {
                let s0 = map.cell_signs(cells[0])[map.edge_slot(le0, m)];
                let s1 = map.cell_signs(cells[1])[map.edge_slot(le1, m)];
                if m % 2 == 0 {
                    assert_eq!(s0 * s1, -1.0, "even moment must flip");
                } else {
                    assert_eq!(s0 * s1, 1.0, "odd moment must not flip");
                }
            }
        }
    }

    #[test]
    fn periodic_x_glues_vertical_edges() {
        let mesh = build_unit_square_mesh(2, Pattern::UnionJack).unwrap();
        let spec = SpaceSpec::raviart_thomas(0).unwrap();
        let map = build_dof_map(&mesh, spec, BoundaryCondition::PeriodicX).unwrap();
        assert_eq!(map.glued_pairs.len(), 2);
        // 8 interior edges + 2 glued pairs.
        assert_eq!(map.n_global, 10);
        for p in &map.glued_pairs {
            let [a, _] = mesh.edges[p.left_edge];
            assert_eq!(mesh.vertices[a][0], 0.0);
            let [b, _] = mesh.edges[p.right_edge];
            assert_eq!(mesh.vertices[b][0], 1.0);
            // Identified edges share the same global DOFs.
            let cl = mesh.edge_cells[p.left_edge][0];
            let cr = mesh.edge_cells[p.right_edge][0];
            let ll = mesh.local_edge(cl, p.left_edge).unwrap();
            let lr = mesh.local_edge(cr, p.right_edge).unwrap();
            assert_eq!(
                map.cell_dofs(cl)[map.edge_slot(ll, 0)],
                map.cell_dofs(cr)[map.edge_slot(lr, 0)]
            );
        }
    }
}
