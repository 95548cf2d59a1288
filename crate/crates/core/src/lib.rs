//! A 2D mixed finite element solver for the stationary linearised inviscid
//! flow problem
//!
//!   div(u x beta) + sigma u + grad p = f,   div u = 0,   u . n = 0,
//!
//! using H(div)-conforming Raviart-Thomas / BDM velocity spaces with upwind
//! facet fluxes and discontinuous pressures, plus a convergence-study harness
//! around it.

pub mod assembly;
pub mod error;
pub mod fe;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use fe::{BoundaryCondition, DiscreteField, ElementPair, Family, SpaceSpec};
pub use mesh::{build_unit_square_mesh, Mesh, Pattern};
pub use problems::{shear_problem, vortex_problem, ProblemSpec};
pub use quadrature::QuadConfig;
