//! Raviart-Thomas interpolation and cellwise L2 projection.

use super::field::DiscreteField;
use super::reference::reference_basis;
use super::{CellGeometry, DofMap, Family};
use crate::error::{Error, Result};
use crate::fe::polynomial::legendre01;
use crate::mesh::Mesh;
use crate::quadrature::{edge_rule, triangle_rule, QuadConfig};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Interpolate a smooth vector field into a Raviart-Thomas space: edge moments
/// of the normal trace against Legendre polynomials and (for degree 1)
/// interior moments against constant vectors, all by quadrature of the
/// configured degree.
pub fn rt_interpolate(
    mesh: &Mesh,
    map: &Arc<DofMap>,
    field: &dyn Fn([f64; 2]) -> [f64; 2],
    quad: QuadConfig,
) -> Result<DiscreteField> {
    if map.spec.family != Family::RaviartThomas {
        return Err(Error::invalid(
            "interpolation operator is defined for the Raviart-Thomas family",
        ));
    }
    let per_edge = map.spec.dofs_per_edge();
    let interior = map.spec.interior_dofs();
    let erule = edge_rule(quad.edge_degree)?;
    let trule = triangle_rule(quad.volume_degree)?;
    let mut coeffs = vec![0.0; map.n_global];

    // Edge moments, computed once per owning edge in canonical orientation.
    for cell in 0..mesh.n_cells() {
        let dofs = map.cell_dofs(cell);
        let signs = map.cell_signs(cell);
        for le in 0..3 {
            let (edge, s_n) = mesh.cell_edges[cell][le];
            // Compute from the cell whose traversal matches the canonical
            // direction, so each owning edge is written exactly once (glued
            // pairs get the value from their x = 1 representative).
            if s_n != 1 {
                continue;
            }
            let is_glued_left = map
                .glued_pairs
                .iter()
                .any(|p| p.left_edge == edge && p.left_edge != p.right_edge);
            if is_glued_left {
                continue;
            }
            let [a, b] = mesh.edges[edge];
            let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
            let tangent = [pb[0] - pa[0], pb[1] - pa[1]];
            let scaled_normal = [tangent[1], -tangent[0]];
            for m in 0..per_edge {
                let slot = map.edge_slot(le, m);
                let Some(g) = dofs[slot] else { continue };
                let moment: f64 = erule
                    .points
                    .iter()
                    .zip(&erule.weights)
                    .map(|(&t, &w)| {
                        let x = [pa[0] + t * tangent[0], pa[1] + t * tangent[1]];
                        let v = field(x);
                        w * (v[0] * scaled_normal[0] + v[1] * scaled_normal[1]) * legendre01(m, t)
                    })
                    .sum();
                coeffs[g] = signs[slot] * moment;
            }
        }
    }

    // Interior moments of the Piola pullback against constant vectors.
    if interior > 0 {
        let cart = trule.cartesian();
        for cell in 0..mesh.n_cells() {
            let geo = CellGeometry::for_cell(mesh, cell)?;
            let mut acc = [0.0; 2];
            for (p, &w) in cart.iter().zip(&trule.weights) {
                let x = geo.map_point(*p);
                let pulled = geo.piola_pullback(field(x));
                acc[0] += 0.5 * w * pulled[0];
                acc[1] += 0.5 * w * pulled[1];
            }
            let dofs = map.cell_dofs(cell);
            for c in 0..interior {
                let slot = 3 * per_edge + c;
                if let Some(g) = dofs[slot] {
                    coeffs[g] = acc[c];
                }
            }
        }
    }

    Ok(DiscreteField {
        map: map.clone(),
        coefficients: coeffs,
    })
}

/// Cellwise L2 projection of a scalar field onto the discontinuous pressure
/// space (mass-matrix solve per cell).
pub fn l2_project(
    mesh: &Mesh,
    map: &Arc<DofMap>,
    field: &dyn Fn([f64; 2]) -> f64,
    quad: QuadConfig,
) -> Result<DiscreteField> {
    if map.spec.family != Family::DiscontinuousPoly {
        return Err(Error::invalid("l2_project target must be a pressure space"));
    }
    let basis = reference_basis(map.spec)?;
    let dim = map.spec.dim_per_cell();
    let mass_rule = triangle_rule(2 * map.spec.degree.max(1))?;
    let rhs_rule = triangle_rule(quad.volume_degree)?;
    let mass_tab = basis.tabulate_scalar(&mass_rule.cartesian());
    let rhs_tab = basis.tabulate_scalar(&rhs_rule.cartesian());

    // The reference mass matrix is shared by all cells: both sides of the
    // cellwise system scale by det J, which cancels.
    let mut mass = DMatrix::zeros(dim, dim);
    for (p, &w) in mass_rule.weights.iter().enumerate() {
        for a in 0..dim {
            for b in 0..dim {
                mass[(a, b)] +=
                    0.5 * w * mass_tab.values[p * dim + a] * mass_tab.values[p * dim + b];
            }
        }
    }
    let mass_lu = mass.lu();

    let cart = rhs_rule.cartesian();
    let mut coeffs = vec![0.0; map.n_global];
    for cell in 0..mesh.n_cells() {
        let geo = CellGeometry::for_cell(mesh, cell)?;
        let mut rhs = DVector::zeros(dim);
        for (p, (&w, rp)) in rhs_rule.weights.iter().zip(&cart).enumerate() {
            let q = field(geo.map_point(*rp));
            for a in 0..dim {
                rhs[a] += 0.5 * w * q * rhs_tab.values[p * dim + a];
            }
        }
        let sol = mass_lu
            .solve(&rhs)
            .ok_or_else(|| Error::Geometry("pressure mass matrix is singular".into()))?;
        let dofs = map.cell_dofs(cell);
        for a in 0..dim {
            coeffs[dofs[a].expect("pressure DOFs are never eliminated")] = sol[a];
        }
    }
    Ok(DiscreteField {
        map: map.clone(),
        coefficients: coeffs,
    })
}
