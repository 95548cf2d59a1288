//! Discrete fields and the contravariant (Piola) cell mapping.

use super::reference::{reference_basis, ScalarTab, VectorTab};
use super::{DofMap, Family};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use std::sync::Arc;

/// Affine geometry of one cell: x = B x_ref + origin.
#[derive(Clone, Copy, Debug)]
pub struct CellGeometry {
    pub b: [[f64; 2]; 2],
    pub inv: [[f64; 2]; 2],
    pub det: f64,
    pub origin: [f64; 2],
}

impl CellGeometry {
    pub fn new(vertices: [[f64; 2]; 3]) -> Result<Self> {
        let b = [
            [
                vertices[1][0] - vertices[0][0],
                vertices[2][0] - vertices[0][0],
            ],
            [
                vertices[1][1] - vertices[0][1],
                vertices[2][1] - vertices[0][1],
            ],
        ];
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        if det.abs() < 1e-14 {
            return Err(Error::Geometry(format!(
                "degenerate cell, |det J| = {:.3e}",
                det.abs()
            )));
        }
        let inv = [
            [b[1][1] / det, -b[0][1] / det],
            [-b[1][0] / det, b[0][0] / det],
        ];
        Ok(CellGeometry {
            b,
            inv,
            det,
            origin: vertices[0],
        })
    }

    pub fn for_cell(mesh: &Mesh, cell: usize) -> Result<Self> {
        CellGeometry::new(mesh.cell_vertices(cell))
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }

    pub fn map_point(&self, r: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.b[0][0] * r[0] + self.b[0][1] * r[1],
            self.origin[1] + self.b[1][0] * r[0] + self.b[1][1] * r[1],
        ]
    }

    /// Contravariant Piola map of a vector value: v = J v_ref / det J.
    pub fn piola_value(&self, v: [f64; 2]) -> [f64; 2] {
        [
            (self.b[0][0] * v[0] + self.b[0][1] * v[1]) / self.det,
            (self.b[1][0] * v[0] + self.b[1][1] * v[1]) / self.det,
        ]
    }

    /// Divergence under the Piola map: div v = div_ref / det J.
    pub fn piola_div(&self, d: f64) -> f64 {
        d / self.det
    }

    /// Jacobian of a Piola-mapped field: grad v = J G_ref J^{-1} / det J.
    pub fn piola_grad(&self, g: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let mut bg = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                bg[i][j] = self.b[i][0] * g[0][j] + self.b[i][1] * g[1][j];
            }
        }
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = (bg[i][0] * self.inv[0][j] + bg[i][1] * self.inv[1][j]) / self.det;
            }
        }
        out
    }

    /// Pull a physical vector value back to the reference cell
    /// (inverse Piola): v_ref = det J * J^{-1} v.
    pub fn piola_pullback(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.det * (self.inv[0][0] * v[0] + self.inv[0][1] * v[1]),
            self.det * (self.inv[1][0] * v[0] + self.inv[1][1] * v[1]),
        ]
    }
}

/// Coefficient vector over a DOF map; evaluable per cell.
#[derive(Clone, Debug)]
pub struct DiscreteField {
    pub map: Arc<DofMap>,
    pub coefficients: Vec<f64>,
}

impl DiscreteField {
    pub fn zeros(map: Arc<DofMap>) -> Self {
        let n = map.n_global;
        DiscreteField {
            map,
            coefficients: vec![0.0; n],
        }
    }

    pub fn from_coefficients(map: Arc<DofMap>, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != map.n_global {
            return Err(Error::invalid(format!(
                "coefficient vector length {} does not match {} global DOFs",
                coefficients.len(),
                map.n_global
            )));
        }
        Ok(DiscreteField { map, coefficients })
    }

    /// Local coefficients of one cell with orientation signs applied
    /// (eliminated boundary DOFs contribute zero).
    pub fn local_coefficients(&self, cell: usize) -> Vec<f64> {
        self.map
            .cell_dofs(cell)
            .iter()
            .zip(self.map.cell_signs(cell))
            .map(|(dof, sign)| dof.map_or(0.0, |d| sign * self.coefficients[d]))
            .collect()
    }

    /// Evaluate a velocity field at reference points of one cell.
    pub fn evaluate_vector(
        &self,
        mesh: &Mesh,
        cell: usize,
        ref_points: &[[f64; 2]],
    ) -> Result<Vec<[f64; 2]>> {
        Ok(self
            .evaluate_vector_with_div(mesh, cell, ref_points)?
            .into_iter()
            .map(|(v, _)| v)
            .collect())
    }

    /// Evaluate a velocity field and its divergence at reference points.
    pub fn evaluate_vector_with_div(
        &self,
        mesh: &Mesh,
        cell: usize,
        ref_points: &[[f64; 2]],
    ) -> Result<Vec<([f64; 2], f64)>> {
        if matches!(self.map.spec.family, Family::DiscontinuousPoly) {
            return Err(Error::invalid("evaluate_vector on a scalar field"));
        }
        if cell >= mesh.n_cells() {
            return Err(Error::invalid(format!("cell index {cell} out of range")));
        }
        let basis = reference_basis(self.map.spec)?;
        let tab = basis.tabulate_vector(ref_points);
        let geo = CellGeometry::for_cell(mesh, cell)?;
        let local = self.local_coefficients(cell);
        Ok(combine_vector(&tab, &geo, &local))
    }

    /// Evaluate a pressure field at reference points of one cell.
    pub fn evaluate_scalar(
        &self,
        mesh: &Mesh,
        cell: usize,
        ref_points: &[[f64; 2]],
    ) -> Result<Vec<f64>> {
        if !matches!(self.map.spec.family, Family::DiscontinuousPoly) {
            return Err(Error::invalid("evaluate_scalar on a vector field"));
        }
        if cell >= mesh.n_cells() {
            return Err(Error::invalid(format!("cell index {cell} out of range")));
        }
        let basis = reference_basis(self.map.spec)?;
        let tab = basis.tabulate_scalar(ref_points);
        let local = self.local_coefficients(cell);
        Ok(combine_scalar(&tab, &local))
    }
}

/// Piola-map a tabulated basis and contract with local coefficients.
pub(crate) fn combine_vector(
    tab: &VectorTab,
    geo: &CellGeometry,
    local: &[f64],
) -> Vec<([f64; 2], f64)> {
    let n = tab.n_funcs;
    (0..tab.n_points)
        .map(|p| {
            let mut v = [0.0; 2];
            let mut d = 0.0;
            for f in 0..n {
                let c = local[f];
                if c == 0.0 {
                    continue;
                }
                let val = tab.values[p * n + f];
                v[0] += c * val[0];
                v[1] += c * val[1];
                d += c * tab.divs[p * n + f];
            }
            (geo.piola_value(v), geo.piola_div(d))
        })
        .collect()
}

pub(crate) fn combine_scalar(tab: &ScalarTab, local: &[f64]) -> Vec<f64> {
    let n = tab.n_funcs;
    (0..tab.n_points)
        .map(|p| (0..n).map(|f| local[f] * tab.values[p * n + f]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fe::reference::{ref_edge_point, REF_EDGE_NORMALS};
    use crate::fe::{build_dof_map, BoundaryCondition, SpaceSpec};
    use crate::mesh::{build_unit_square_mesh, Pattern};
    use crate::quadrature::edge_rule;

    #[test]
    fn identity_geometry_is_identity_map() {
        let geo = CellGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(geo.det, 1.0);
        assert_eq!(geo.piola_value([0.3, 0.4]), [0.3, 0.4]);
        assert_eq!(geo.piola_div(2.5), 2.5);
    }

    #[test]
    fn degenerate_cell_rejected() {
        let r = CellGeometry::new([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        assert!(r.is_err());
    }

    #[test]
    fn scaled_cell_divergence_chain_rule() {
        // Uniform scaling by s: divergence scales by 1/s^2. Cross-check the
        // Piola divergence against central differences of the mapped values.
        let s = 0.5;
        let geo = CellGeometry::new([[0.0, 0.0], [s, 0.0], [0.0, s]]).unwrap();
        let basis = reference_basis(SpaceSpec::raviart_thomas(1).unwrap()).unwrap();
        let r = [0.3, 0.25];
        let h = 1e-6;
        let pts = [
            r,
            [r[0] + h, r[1]],
            [r[0] - h, r[1]],
            [r[0], r[1] + h],
            [r[0], r[1] - h],
        ];
        let tab = basis.tabulate_vector(&pts);
        let nf = tab.n_funcs;
        for f in 0..nf {
            let at = |p: usize| geo.piola_value(tab.values[p * nf + f]);
            // Physical step is s*h because the map scales coordinates.
            let fd = (at(1)[0] - at(2)[0]) / (2.0 * h * s) + (at(3)[1] - at(4)[1]) / (2.0 * h * s);
            let analytic = geo.piola_div(tab.divs[f]);
            assert!(
                (fd - analytic).abs() < 1e-4 * (1.0 + analytic.abs()),
                "func {f}: fd {fd} vs {analytic}"
            );
            // And the scaling law itself: det = s^2.
            assert!((analytic - tab.divs[f] / (s * s)).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_flux_moments_reproduce_assigned_dofs() {
        // On an arbitrary affine cell, integrating the normal trace of the
        // Piola-mapped basis against Legendre polynomials along each edge
        // must reproduce the reference DOF values (duality survives the map).
        let geo = CellGeometry::new([[0.2, 0.1], [0.9, 0.3], [0.4, 0.8]]).unwrap();
        let spec = SpaceSpec::bdm(1).unwrap();
        let basis = reference_basis(spec).unwrap();
        let rule = edge_rule(9).unwrap();
        for le in 0..3usize {
            let ref_pts: Vec<[f64; 2]> =
                rule.points.iter().map(|&t| ref_edge_point(le, t)).collect();
            let tab = basis.tabulate_vector(&ref_pts);
            // Physical scaled normal: rot(B tau_ref) = det * B^{-T} N_ref.
            let nr = REF_EDGE_NORMALS[le];
            let n_phys = [
                geo.det * (geo.inv[0][0] * nr[0] + geo.inv[1][0] * nr[1]),
                geo.det * (geo.inv[0][1] * nr[0] + geo.inv[1][1] * nr[1]),
            ];
            for f in 0..tab.n_funcs {
                for m in 0..2usize {
                    let got: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .enumerate()
                        .map(|(q, (&t, &w))| {
                            let v = geo.piola_value(tab.values[q * tab.n_funcs + f]);
                            w * (v[0] * n_phys[0] + v[1] * n_phys[1])
                                * crate::fe::polynomial::legendre01(m, t)
                        })
                        .sum();
                    let want = if f == le * 2 + m { 1.0 } else { 0.0 };
                    assert!(
                        (got - want).abs() < 1e-12,
                        "edge {le} moment {m} func {f}: {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_coefficients_evaluate_to_zero() {
        let mesh = build_unit_square_mesh(2, Pattern::UnionJack).unwrap();
        let map = build_dof_map(
            &mesh,
            SpaceSpec::raviart_thomas(0).unwrap(),
            BoundaryCondition::ZeroNormal,
        )
        .unwrap();
        let field = DiscreteField::zeros(map);
        let vals = field
            .evaluate_vector(&mesh, 3, &[[0.25, 0.25], [0.1, 0.6]])
            .unwrap();
        assert!(vals.iter().all(|v| v == &[0.0, 0.0]));
    }

    #[test]
    fn out_of_range_cell_rejected() {
        let mesh = build_unit_square_mesh(1, Pattern::Right).unwrap();
        let map = build_dof_map(
            &mesh,
            SpaceSpec::raviart_thomas(0).unwrap(),
            BoundaryCondition::ZeroNormal,
        )
        .unwrap();
        let field = DiscreteField::zeros(map);
        assert!(field.evaluate_vector(&mesh, 5, &[[0.2, 0.2]]).is_err());
    }
}
