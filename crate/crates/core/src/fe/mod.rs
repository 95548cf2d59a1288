//! Finite element spaces: reference bases, DOF maps, fields, interpolation.

pub mod dofmap;
pub mod field;
pub mod interpolate;
pub(crate) mod polynomial;
pub mod reference;

pub use dofmap::{build_dof_map, BoundaryCondition, DofMap, GluedPair};
pub use field::{CellGeometry, DiscreteField};
pub use interpolate::{l2_project, rt_interpolate};
pub use reference::{reference_basis, EdgeTrace, ReferenceBasis, ScalarTab, VectorTab};

use crate::error::{Error, Result};

/// Finite element family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Raviart-Thomas H(div) element.
    RaviartThomas,
    /// Brezzi-Douglas-Marini H(div) element (full vector polynomials).
    BrezziDouglasMarini,
    /// Discontinuous piecewise polynomials (pressure).
    DiscontinuousPoly,
}

/// Descriptor of a finite element space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceSpec {
    pub family: Family,
    pub degree: usize,
}

impl SpaceSpec {
    pub fn raviart_thomas(degree: usize) -> Result<Self> {
        if degree > 1 {
            return Err(Error::invalid("Raviart-Thomas supported for degrees 0 and 1"));
        }
        Ok(SpaceSpec {
            family: Family::RaviartThomas,
            degree,
        })
    }

    pub fn bdm(degree: usize) -> Result<Self> {
        if degree != 1 {
            return Err(Error::invalid("BDM requires degree 1 (degree 0 does not exist)"));
        }
        Ok(SpaceSpec {
            family: Family::BrezziDouglasMarini,
            degree,
        })
    }

    pub fn pressure(degree: usize) -> Result<Self> {
        if degree > 1 {
            return Err(Error::invalid("pressure space supported for degrees 0 and 1"));
        }
        Ok(SpaceSpec {
            family: Family::DiscontinuousPoly,
            degree,
        })
    }

    pub fn is_velocity(&self) -> bool {
        !matches!(self.family, Family::DiscontinuousPoly)
    }

    /// DOFs per edge of the reference cell.
    pub fn dofs_per_edge(&self) -> usize {
        match self.family {
            Family::RaviartThomas | Family::BrezziDouglasMarini => self.degree + 1,
            Family::DiscontinuousPoly => 0,
        }
    }

    /// Interior (cell-private) DOFs.
    pub fn interior_dofs(&self) -> usize {
        let k = self.degree;
        match self.family {
            Family::RaviartThomas => k * (k + 1),
            Family::BrezziDouglasMarini => (k + 1) * (k + 2) - 3 * (k + 1),
            Family::DiscontinuousPoly => (k + 1) * (k + 2) / 2,
        }
    }

    /// Local dimension on one cell.
    pub fn dim_per_cell(&self) -> usize {
        3 * self.dofs_per_edge() + self.interior_dofs()
    }
}

/// Velocity/pressure pairings with exact discrete incompressibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementPair {
    Rt0P0,
    Rt1P1dc,
    Bdm1P0,
}

impl ElementPair {
    pub fn velocity(self) -> SpaceSpec {
        match self {
            ElementPair::Rt0P0 => SpaceSpec {
                family: Family::RaviartThomas,
                degree: 0,
            },
            ElementPair::Rt1P1dc => SpaceSpec {
                family: Family::RaviartThomas,
                degree: 1,
            },
            ElementPair::Bdm1P0 => SpaceSpec {
                family: Family::BrezziDouglasMarini,
                degree: 1,
            },
        }
    }

    pub fn pressure(self) -> SpaceSpec {
        match self {
            ElementPair::Rt0P0 => SpaceSpec {
                family: Family::DiscontinuousPoly,
                degree: 0,
            },
            ElementPair::Rt1P1dc => SpaceSpec {
                family: Family::DiscontinuousPoly,
                degree: 1,
            },
            ElementPair::Bdm1P0 => SpaceSpec {
                family: Family::DiscontinuousPoly,
                degree: 0,
            },
        }
    }

    /// Velocity polynomial degree k.
    pub fn degree(self) -> usize {
        self.velocity().degree
    }

    pub fn all() -> [ElementPair; 3] {
        [ElementPair::Rt0P0, ElementPair::Rt1P1dc, ElementPair::Bdm1P0]
    }
}

impl std::str::FromStr for ElementPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rt0p0" => Ok(ElementPair::Rt0P0),
            "rt1p1dc" => Ok(ElementPair::Rt1P1dc),
            "bdm1p0" => Ok(ElementPair::Bdm1P0),
            other => Err(Error::invalid(format!(
                "unknown element `{other}` (expected rt0p0, rt1p1dc or bdm1p0)"
            ))),
        }
    }
}

impl std::fmt::Display for ElementPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ElementPair::Rt0P0 => "rt0p0",
            ElementPair::Rt1P1dc => "rt1p1dc",
            ElementPair::Bdm1P0 => "bdm1p0",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_cell_dimensions() {
        assert_eq!(SpaceSpec::raviart_thomas(0).unwrap().dim_per_cell(), 3);
        assert_eq!(SpaceSpec::raviart_thomas(1).unwrap().dim_per_cell(), 8);
        assert_eq!(SpaceSpec::bdm(1).unwrap().dim_per_cell(), 6);
        assert_eq!(SpaceSpec::pressure(0).unwrap().dim_per_cell(), 1);
        assert_eq!(SpaceSpec::pressure(1).unwrap().dim_per_cell(), 3);
    }

    #[test]
    fn bdm_degree_zero_rejected() {
        assert!(SpaceSpec::bdm(0).is_err());
    }

    #[test]
    fn edge_dof_counts_match_degree() {
        for pair in ElementPair::all() {
            let v = pair.velocity();
            assert_eq!(v.dofs_per_edge(), v.degree + 1);
        }
    }
}
