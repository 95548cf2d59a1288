//! Reference-element bases on the unit triangle (0,0), (1,0), (0,1).
//!
//! Velocity DOFs are moments of the normal trace against shifted Legendre
//! polynomials on each edge (plus interior moments against constant vectors
//! for RT1). Local edge `i` is opposite vertex `i` and is traversed
//! counter-clockwise, so the rotate-right normal of the traversal direction is
//! outward. Bases are obtained by inverting the DOF-functional matrix on a
//! monomial spanning set and cached per space descriptor.

use super::polynomial::{legendre01, Poly2, VecPoly2};
use super::{Family, SpaceSpec};
use crate::error::{Error, Result};
use crate::quadrature::{edge_rule, triangle_rule};
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Start point of each reference edge (CCW traversal).
pub const REF_EDGE_STARTS: [[f64; 2]; 3] = [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
/// Traversal direction of each reference edge (not normalised).
pub const REF_EDGE_DIRS: [[f64; 2]; 3] = [[-1.0, 1.0], [0.0, -1.0], [1.0, 0.0]];
/// Rotate-right of the traversal direction: outward, scaled by edge length.
pub const REF_EDGE_NORMALS: [[f64; 2]; 3] = [[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];

/// Point on reference edge `local_edge` at traversal parameter `t` in [0, 1].
pub fn ref_edge_point(local_edge: usize, t: f64) -> [f64; 2] {
    let s = REF_EDGE_STARTS[local_edge];
    let d = REF_EDGE_DIRS[local_edge];
    [s[0] + t * d[0], s[1] + t * d[1]]
}

/// Basis functions dual to the DOF functionals of one space.
#[derive(Debug)]
pub struct ReferenceBasis {
    pub spec: SpaceSpec,
    vector_funcs: Vec<VecPoly2>,
    scalar_funcs: Vec<Poly2>,
}

/// Tabulated vector basis: `values[p * n_funcs + f]` etc.
#[derive(Clone, Debug)]
pub struct VectorTab {
    pub n_funcs: usize,
    pub n_points: usize,
    pub values: Vec<[f64; 2]>,
    pub divs: Vec<f64>,
    pub grads: Vec<[[f64; 2]; 2]>,
}

/// Tabulated scalar basis.
#[derive(Clone, Debug)]
pub struct ScalarTab {
    pub n_funcs: usize,
    pub n_points: usize,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

/// Vector basis values on one reference edge at the traversal parameters of an
/// edge quadrature rule, for both traversal orientations.
#[derive(Clone, Debug)]
pub struct EdgeTrace {
    /// `[local_edge][flip]` -> tabulation at gamma_i(t_q) (flip = 0) or
    /// gamma_i(1 - t_q) (flip = 1).
    pub tabs: [[VectorTab; 2]; 3],
}

impl ReferenceBasis {
    pub fn n_funcs(&self) -> usize {
        match self.spec.family {
            Family::DiscontinuousPoly => self.scalar_funcs.len(),
            _ => self.vector_funcs.len(),
        }
    }

    pub fn tabulate_vector(&self, points: &[[f64; 2]]) -> VectorTab {
        let n_funcs = self.vector_funcs.len();
        let mut values = Vec::with_capacity(points.len() * n_funcs);
        let mut divs = Vec::with_capacity(points.len() * n_funcs);
        let mut grads = Vec::with_capacity(points.len() * n_funcs);
        for &p in points {
            for f in &self.vector_funcs {
                values.push(f.eval(p));
                divs.push(f.div().eval(p[0], p[1]));
                grads.push(f.grad(p));
            }
        }
        VectorTab {
            n_funcs,
            n_points: points.len(),
            values,
            divs,
            grads,
        }
    }

    pub fn tabulate_scalar(&self, points: &[[f64; 2]]) -> ScalarTab {
        let n_funcs = self.scalar_funcs.len();
        let mut values = Vec::with_capacity(points.len() * n_funcs);
        let mut grads = Vec::with_capacity(points.len() * n_funcs);
        for &p in points {
            for f in &self.scalar_funcs {
                values.push(f.eval(p[0], p[1]));
                grads.push([f.dx().eval(p[0], p[1]), f.dy().eval(p[0], p[1])]);
            }
        }
        ScalarTab {
            n_funcs,
            n_points: points.len(),
            values,
            grads,
        }
    }

    /// Vector basis traces on all edges at the parameters of `rule`, in both
    /// orientations.
    pub fn edge_traces(&self, rule: &crate::quadrature::QuadRule1D) -> EdgeTrace {
        let tab_for = |edge: usize, flip: bool| {
            let pts: Vec<[f64; 2]> = rule
                .points
                .iter()
                .map(|&t| ref_edge_point(edge, if flip { 1.0 - t } else { t }))
                .collect();
            self.tabulate_vector(&pts)
        };
        EdgeTrace {
            tabs: [
                [tab_for(0, false), tab_for(0, true)],
                [tab_for(1, false), tab_for(1, true)],
                [tab_for(2, false), tab_for(2, true)],
            ],
        }
    }

    /// Apply every DOF functional to every basis function (identity matrix for
    /// a unisolvent, correctly inverted basis).
    pub fn dof_matrix(&self) -> DMatrix<f64> {
        match self.spec.family {
            Family::DiscontinuousPoly => {
                DMatrix::identity(self.scalar_funcs.len(), self.scalar_funcs.len())
            }
            _ => {
                let n = self.vector_funcs.len();
                DMatrix::from_fn(n, n, |a, b| {
                    apply_velocity_functional(self.spec, a, &self.vector_funcs[b])
                })
            }
        }
    }
}

/// Apply velocity DOF functional `index` (edge moments first, then interior
/// moments) to a vector polynomial.
fn apply_velocity_functional(spec: SpaceSpec, index: usize, f: &VecPoly2) -> f64 {
    let per_edge = spec.dofs_per_edge();
    let edge_quad = edge_rule(7).expect("static rule degree");
    if index < 3 * per_edge {
        let edge = index / per_edge;
        let moment = index % per_edge;
        let normal = REF_EDGE_NORMALS[edge];
        edge_quad
            .points
            .iter()
            .zip(&edge_quad.weights)
            .map(|(&t, &w)| {
                let v = f.eval(ref_edge_point(edge, t));
                w * (v[0] * normal[0] + v[1] * normal[1]) * legendre01(moment, t)
            })
            .sum()
    } else {
        let comp = index - 3 * per_edge;
        let tri = triangle_rule(4).expect("static rule degree");
        tri.points
            .iter()
            .zip(&tri.weights)
            .map(|(b, &w)| 0.5 * w * f.eval([b[1], b[2]])[comp])
            .sum()
    }
}

fn generators(spec: SpaceSpec) -> Vec<VecPoly2> {
    let e = |c: f64, a: u32, b: u32| Poly2::term(c, a, b);
    let vx = |p: Poly2| VecPoly2 {
        x: p,
        y: Poly2::zero(),
    };
    let vy = |p: Poly2| VecPoly2 {
        x: Poly2::zero(),
        y: p,
    };
    match (spec.family, spec.degree) {
        (Family::RaviartThomas, 0) => vec![
            vx(e(1.0, 0, 0)),
            vy(e(1.0, 0, 0)),
            VecPoly2 {
                x: e(1.0, 1, 0),
                y: e(1.0, 0, 1),
            },
        ],
        (Family::BrezziDouglasMarini, 1) => vec![
            vx(e(1.0, 0, 0)),
            vx(e(1.0, 1, 0)),
            vx(e(1.0, 0, 1)),
            vy(e(1.0, 0, 0)),
            vy(e(1.0, 1, 0)),
            vy(e(1.0, 0, 1)),
        ],
        (Family::RaviartThomas, 1) => {
            let mut g = generators(SpaceSpec {
                family: Family::BrezziDouglasMarini,
                degree: 1,
            });
            // x * homogeneous degree-1 scalars: (x^2, xy) and (xy, y^2).
            g.push(VecPoly2 {
                x: e(1.0, 2, 0),
                y: e(1.0, 1, 1),
            });
            g.push(VecPoly2 {
                x: e(1.0, 1, 1),
                y: e(1.0, 0, 2),
            });
            g
        }
        _ => unreachable!("validated before basis construction"),
    }
}

fn build(spec: SpaceSpec) -> Result<ReferenceBasis> {
    match spec.family {
        Family::DiscontinuousPoly => {
            if spec.degree > 1 {
                return Err(Error::invalid("pressure degree must be 0 or 1"));
            }
            let mut scalar_funcs = vec![Poly2::term(1.0, 0, 0)];
            if spec.degree == 1 {
                scalar_funcs.push(Poly2::term(1.0, 1, 0));
                scalar_funcs.push(Poly2::term(1.0, 0, 1));
            }
            Ok(ReferenceBasis {
                spec,
                vector_funcs: Vec::new(),
                scalar_funcs,
            })
        }
        Family::BrezziDouglasMarini if spec.degree != 1 => {
            Err(Error::invalid("BDM degree must be 1"))
        }
        Family::RaviartThomas if spec.degree > 1 => {
            Err(Error::invalid("Raviart-Thomas degree must be 0 or 1"))
        }
        _ => {
            let gens = generators(spec);
            let n = gens.len();
            debug_assert_eq!(n, spec.dim_per_cell());
            let moments = DMatrix::from_fn(n, n, |a, b| {
                apply_velocity_functional(spec, a, &gens[b])
            });
            let inv = moments.try_inverse().ok_or_else(|| {
                Error::Geometry("reference DOF matrix is singular".into())
            })?;
            let vector_funcs = (0..n)
                .map(|j| {
                    let mut f = VecPoly2::zero();
                    for (b, gen) in gens.iter().enumerate() {
                        f.add_scaled(gen, inv[(b, j)]);
                    }
                    f
                })
                .collect();
            Ok(ReferenceBasis {
                spec,
                vector_funcs,
                scalar_funcs: Vec::new(),
            })
        }
    }
}

/// Reference basis for a space, built once and cached.
pub fn reference_basis(spec: SpaceSpec) -> Result<Arc<ReferenceBasis>> {
    static CACHE: OnceLock<Mutex<HashMap<SpaceSpec, Arc<ReferenceBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&spec) {
        return Ok(b.clone());
    }
    let built = Arc::new(build(spec)?);
    cache
        .lock()
        .unwrap()
        .entry(spec)
        .or_insert_with(|| built.clone());
    Ok(built)
}
