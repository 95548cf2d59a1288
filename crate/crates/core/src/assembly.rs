//! Assembly of the upwind H(div) saddle-point system
//!
//!   -(u, beta . grad v)_h + <(beta . n) u_hat, v>_h + (sigma u, v)
//!        - (p, div v) = (f, v)      for all velocity test functions v,
//!   (div u, q) + lambda * int q = 0 for all pressure test functions q,
//!   sum_j (int phi_j) p_j = 0       (mean-zero pressure).
//!
//! The convective volume term is kept in integrated-by-parts form and the
//! upwind trace is chosen pointwise at every facet quadrature point, so the
//! same kernels serve both the solver and the flux-identity checks.

use crate::error::{Error, Result};
use crate::fe::reference::reference_basis;
use crate::fe::{CellGeometry, DiscreteField, DofMap, Family, SpaceSpec};
use crate::mesh::Mesh;
use crate::problems::ProblemSpec;
use crate::quadrature::{edge_rule, triangle_rule, QuadConfig};
use std::io::Write;
use std::sync::Arc;

/// One facet of the broken formulation: `plus` is the cell whose outward
/// normal equals the canonical edge normal; `minus` is absent on the boundary.
/// For x-periodic gluing the two sides carry their own edge indices.
#[derive(Clone, Copy, Debug)]
pub struct Facet {
    pub plus_cell: usize,
    pub plus_edge: usize,
    pub minus: Option<(usize, usize)>,
}

/// Interior facets: interior mesh edges plus periodic gluings.
pub fn interior_facets(mesh: &Mesh, map: &DofMap) -> Vec<Facet> {
    let glued: std::collections::HashSet<usize> = map
        .glued_pairs
        .iter()
        .flat_map(|p| [p.left_edge, p.right_edge])
        .collect();
    let mut out = Vec::new();
    for e in 0..mesh.n_edges() {
        if mesh.boundary[e] || glued.contains(&e) {
            continue;
        }
        let cells = &mesh.edge_cells[e];
        let sign_of = |c: usize| {
            mesh.cell_edges[c]
                .iter()
                .find(|(ee, _)| *ee == e)
                .map(|(_, s)| *s)
                .unwrap()
        };
        let (plus, minus) = if sign_of(cells[0]) == 1 {
            (cells[0], cells[1])
        } else {
            (cells[1], cells[0])
        };
        out.push(Facet {
            plus_cell: plus,
            plus_edge: e,
            minus: Some((minus, e)),
        });
    }
    for p in &map.glued_pairs {
        // The x = 1 cell's outward normal is the canonical (1, 0) normal.
        out.push(Facet {
            plus_cell: mesh.edge_cells[p.right_edge][0],
            plus_edge: p.right_edge,
            minus: Some((mesh.edge_cells[p.left_edge][0], p.left_edge)),
        });
    }
    out
}

/// Boundary facets that are not periodically glued.
pub fn boundary_facets(mesh: &Mesh, map: &DofMap) -> Vec<Facet> {
    let glued: std::collections::HashSet<usize> = map
        .glued_pairs
        .iter()
        .flat_map(|p| [p.left_edge, p.right_edge])
        .collect();
    (0..mesh.n_edges())
        .filter(|&e| mesh.boundary[e] && !glued.contains(&e))
        .map(|e| Facet {
            plus_cell: mesh.edge_cells[e][0],
            plus_edge: e,
            minus: None,
        })
        .collect()
}

/// Which facets the convection kernel integrates over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FacetScope {
    /// Interior facets only (the assembled system, where beta . n = 0 on the
    /// boundary makes the boundary terms vanish identically).
    Interior,
    /// Interior and boundary facets, with zero exterior trace on inflow.
    All,
}

/// Assembled saddle-point system in deduplicated triplet form, ordered as
/// (velocity DOFs, pressure DOFs, multiplier).
#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub n_u: usize,
    pub n_p: usize,
    /// Entries sorted by (column, row), one per structural nonzero.
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
}

impl SaddleSystem {
    pub fn dim(&self) -> usize {
        self.n_u + self.n_p + 1
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        for &(r, c, v) in &self.triplets {
            y[r] += v * x[c];
        }
        y
    }

    /// Residual b - A x, computed from the triplets.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.matvec(x);
        self.rhs.iter().zip(ax).map(|(b, a)| b - a).collect()
    }

    /// Entry lookup (zero when structurally absent).
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let idx = self
            .triplets
            .binary_search_by(|&(r, c, _)| (c, r).cmp(&(col, row)));
        match idx {
            Ok(i) => self.triplets[i].2,
            Err(_) => 0.0,
        }
    }

    /// Coordinate-format text dump: `row col value` per line.
    pub fn dump_coo(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "% {} {} {}", self.dim(), self.dim(), self.triplets.len())?;
        for &(r, c, v) in &self.triplets {
            writeln!(w, "{r} {c} {v:.17e}")?;
        }
        Ok(())
    }
}

/// Merge raw triplets into one entry per (row, col). Groups are summed in a
/// canonical value order, so the result is bit-identical no matter how the
/// contributions were produced.
pub(crate) fn canonical_triplets(
    raw: &mut Vec<(usize, usize, f64)>,
) -> Vec<(usize, usize, f64)> {
    raw.sort_unstable_by(|a, b| {
        (a.1, a.0, a.2.to_bits()).cmp(&(b.1, b.0, b.2.to_bits()))
    });
    let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(raw.len() / 2);
    for &(r, c, v) in raw.iter() {
        match out.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += v,
            _ => out.push((r, c, v)),
        }
    }
    out
}

struct CellKernel {
    n: usize,
    /// Physical basis values at the current point.
    values: Vec<[f64; 2]>,
    /// (beta . grad) of each physical basis function.
    conv: Vec<[f64; 2]>,
    divs: Vec<f64>,
}

impl CellKernel {
    fn new(n: usize) -> Self {
        CellKernel {
            n,
            values: vec![[0.0; 2]; n],
            conv: vec![[0.0; 2]; n],
            divs: vec![0.0; n],
        }
    }

    /// Fill physical values at tabulation row `p` for a cell geometry.
    fn fill(
        &mut self,
        tab: &crate::fe::VectorTab,
        geo: &CellGeometry,
        p: usize,
        beta: [f64; 2],
        with_conv: bool,
    ) {
        let n = self.n;
        let beta_ref = [
            geo.inv[0][0] * beta[0] + geo.inv[0][1] * beta[1],
            geo.inv[1][0] * beta[0] + geo.inv[1][1] * beta[1],
        ];
        for f in 0..n {
            self.values[f] = geo.piola_value(tab.values[p * n + f]);
            self.divs[f] = geo.piola_div(tab.divs[p * n + f]);
            if with_conv {
                let g = tab.grads[p * n + f];
                let gb = [
                    g[0][0] * beta_ref[0] + g[0][1] * beta_ref[1],
                    g[1][0] * beta_ref[0] + g[1][1] * beta_ref[1],
                ];
                self.conv[f] = [
                    (geo.b[0][0] * gb[0] + geo.b[0][1] * gb[1]) / geo.det,
                    (geo.b[1][0] * gb[0] + geo.b[1][1] * gb[1]) / geo.det,
                ];
            }
        }
    }
}

/// Push the triplets of the convective form
/// c(u, v) = -(u, beta . grad v)_h + <(beta . n) u_hat, v>_h
/// over the velocity block.
fn push_convection(
    mesh: &Mesh,
    map: &DofMap,
    beta: &dyn Fn([f64; 2]) -> [f64; 2],
    quad: QuadConfig,
    scope: FacetScope,
    cell_geos: &[CellGeometry],
    out: &mut Vec<(usize, usize, f64)>,
) -> Result<()> {
    let basis = reference_basis(map.spec)?;
    let n = basis.n_funcs();
    let vrule = triangle_rule(quad.volume_degree)?;
    let cart = vrule.cartesian();
    let tab = basis.tabulate_vector(&cart);
    let mut kern = CellKernel::new(n);
    let mut local = vec![0.0; n * n];

    // Volume part: -(u, beta . grad v); row = test, col = trial.
    for cell in 0..mesh.n_cells() {
        let geo = &cell_geos[cell];
        local.iter_mut().for_each(|x| *x = 0.0);
        for (p, &wq) in vrule.weights.iter().enumerate() {
            let x = geo.map_point(cart[p]);
            let w = geo.area() * wq;
            kern.fill(&tab, geo, p, beta(x), true);
            for i in 0..n {
                let ci = kern.conv[i];
                for j in 0..n {
                    let vj = kern.values[j];
                    local[i * n + j] -= w * (vj[0] * ci[0] + vj[1] * ci[1]);
                }
            }
        }
        scatter_velocity_block(map, cell, cell, &local, out);
    }

    // Facet part.
    let erule = edge_rule(quad.edge_degree)?;
    let traces = basis.edge_traces(&erule);
    let mut vals_plus = vec![[0.0; 2]; n];
    let mut vals_minus = vec![[0.0; 2]; n];

    let mut handle_facet = |facet: &Facet, out: &mut Vec<(usize, usize, f64)>| -> Result<()> {
        let (normal, len, _) = mesh.edge_geometry(facet.plus_edge)?;
        let [a, b] = mesh.edges[facet.plus_edge];
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let le_plus = mesh
            .local_edge(facet.plus_cell, facet.plus_edge)
            .expect("facet edge belongs to plus cell");
        let tab_plus = &traces.tabs[le_plus][0];
        let geo_plus = &cell_geos[facet.plus_cell];
        let minus = facet.minus.map(|(cell, edge)| {
            let le = mesh.local_edge(cell, edge).expect("facet edge in minus cell");
            (cell, &traces.tabs[le][1])
        });

        let mut block_pp = vec![0.0; n * n];
        let mut block_pm = vec![0.0; n * n];
        let mut block_mp = vec![0.0; n * n];
        let mut block_mm = vec![0.0; n * n];

        for (q, (&t, &wq)) in erule.points.iter().zip(&erule.weights).enumerate() {
            let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let bx = beta(x);
            let bn = bx[0] * normal[0] + bx[1] * normal[1];
            let w = len * wq;
            for f in 0..n {
                vals_plus[f] = geo_plus.piola_value(tab_plus.values[q * n + f]);
            }
            match minus {
                Some((minus_cell, tab_minus)) => {
                    let geo_minus = &cell_geos[minus_cell];
                    for f in 0..n {
                        vals_minus[f] = geo_minus.piola_value(tab_minus.values[q * n + f]);
                    }
                    // Upwind side: the cell beta flows out of; ties take the
                    // lower-indexed cell (the integrand vanishes there).
                    let upwind_plus = if bn > 0.0 {
                        true
                    } else if bn < 0.0 {
                        false
                    } else {
                        facet.plus_cell < minus_cell
                    };
                    let up: &[[f64; 2]] = if upwind_plus { &vals_plus } else { &vals_minus };
                    let (into_up, other) = if upwind_plus {
                        (&mut block_pp, &mut block_mp)
                    } else {
                        (&mut block_pm, &mut block_mm)
                    };
                    for i in 0..n {
                        let (vp, vm) = (vals_plus[i], vals_minus[i]);
                        for j in 0..n {
                            let uj = up[j];
                            into_up[i * n + j] += w * bn * (uj[0] * vp[0] + uj[1] * vp[1]);
                            other[i * n + j] -= w * bn * (uj[0] * vm[0] + uj[1] * vm[1]);
                        }
                    }
                }
                None => {
                    // Boundary facet: outward normal is sign * canonical; the
                    // exterior trace is zero, so only outflow contributes.
                    let sign = mesh.cell_edges[facet.plus_cell]
                        .iter()
                        .find(|(e, _)| *e == facet.plus_edge)
                        .unwrap()
                        .1 as f64;
                    let bn_out = sign * bn;
                    if bn_out > 0.0 {
                        for i in 0..n {
                            let vi = vals_plus[i];
                            for j in 0..n {
                                let uj = vals_plus[j];
                                block_pp[i * n + j] +=
                                    w * bn_out * (uj[0] * vi[0] + uj[1] * vi[1]);
                            }
                        }
                    }
                }
            }
        }

        scatter_velocity_block(map, facet.plus_cell, facet.plus_cell, &block_pp, out);
        if let Some((minus_cell, _)) = facet.minus {
            scatter_velocity_block(map, facet.plus_cell, minus_cell, &block_pm, out);
            scatter_velocity_block(map, minus_cell, facet.plus_cell, &block_mp, out);
            scatter_velocity_block(map, minus_cell, minus_cell, &block_mm, out);
        }
        Ok(())
    };

    for facet in interior_facets(mesh, map) {
        handle_facet(&facet, out)?;
    }
    if scope == FacetScope::All {
        for facet in boundary_facets(mesh, map) {
            handle_facet(&facet, out)?;
        }
    }
    Ok(())
}

/// Scatter a (test_cell x trial_cell) local block with orientation signs.
fn scatter_velocity_block(
    map: &DofMap,
    test_cell: usize,
    trial_cell: usize,
    local: &[f64],
    out: &mut Vec<(usize, usize, f64)>,
) {
    let n = map.dofs_per_cell;
    let (td, ts) = (map.cell_dofs(test_cell), map.cell_signs(test_cell));
    let (jd, js) = (map.cell_dofs(trial_cell), map.cell_signs(trial_cell));
    for i in 0..n {
        let Some(gi) = td[i] else { continue };
        for j in 0..n {
            let Some(gj) = jd[j] else { continue };
            let v = ts[i] * js[j] * local[i * n + j];
            if v != 0.0 {
                out.push((gi, gj, v));
            }
        }
    }
}

/// The convective part of the bilinear form as an operator on velocity
/// coefficient vectors.
pub struct ConvectionOperator {
    pub n: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl ConvectionOperator {
    /// Assemble c(u, v) = -(u, beta . grad v)_h + <(beta . n) u_hat, v>_h.
    pub fn assemble(
        mesh: &Mesh,
        map: &DofMap,
        problem: &ProblemSpec,
        quad: QuadConfig,
        scope: FacetScope,
    ) -> Result<Self> {
        let cell_geos = cell_geometries(mesh)?;
        let mut raw = Vec::new();
        push_convection(
            mesh,
            map,
            problem.beta.as_ref(),
            quad,
            scope,
            &cell_geos,
            &mut raw,
        )?;
        Ok(ConvectionOperator {
            n: map.n_global,
            triplets: canonical_triplets(&mut raw),
        })
    }

    /// v^T C u.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        self.triplets
            .iter()
            .map(|&(r, c, a)| v[r] * a * u[c])
            .sum()
    }
}

/// Value of the broken convective form
/// (u x beta, grad v)_h - <(beta . n) u_hat, v>_h
/// for two velocity fields (boundary facets included, zero exterior trace on
/// inflow). With u = v this is minus one half of the squared jump seminorm.
pub fn apply_form(op: &ConvectionOperator, u: &DiscreteField, v: &DiscreteField) -> f64 {
    -op.bilinear(&u.coefficients, &v.coefficients)
}

pub(crate) fn cell_geometries(mesh: &Mesh) -> Result<Vec<CellGeometry>> {
    (0..mesh.n_cells())
        .map(|c| CellGeometry::for_cell(mesh, c))
        .collect()
}

/// Check that the velocity/pressure pair is one of the stable pairings.
fn validate_pair(vspec: SpaceSpec, pspec: SpaceSpec) -> Result<()> {
    let ok = match vspec.family {
        Family::RaviartThomas => {
            pspec.family == Family::DiscontinuousPoly && pspec.degree == vspec.degree
        }
        Family::BrezziDouglasMarini => {
            pspec.family == Family::DiscontinuousPoly && pspec.degree + 1 == vspec.degree
        }
        Family::DiscontinuousPoly => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "incompatible velocity/pressure pair {vspec:?} / {pspec:?}"
        )))
    }
}

/// Check beta . n = 0 at boundary quadrature points (and periodicity of beta
/// across glued pairs).
fn validate_boundary_flux(
    mesh: &Mesh,
    map: &DofMap,
    problem: &ProblemSpec,
    quad: QuadConfig,
) -> Result<()> {
    let erule = edge_rule(quad.edge_degree)?;
    for facet in boundary_facets(mesh, map) {
        let (normal, _, _) = mesh.edge_geometry(facet.plus_edge)?;
        let [a, b] = mesh.edges[facet.plus_edge];
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        for &t in &erule.points {
            let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let bx = (problem.beta)(x);
            let bn = bx[0] * normal[0] + bx[1] * normal[1];
            if bn.abs() > 1e-10 {
                return Err(Error::ProblemSetup(format!(
                    "beta . n = {bn:.3e} at boundary point ({:.4}, {:.4}); \
                     the method requires a tangential advection field",
                    x[0], x[1]
                )));
            }
        }
    }
    for pair in &map.glued_pairs {
        let [a, b] = mesh.edges[pair.left_edge];
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        for &t in &erule.points {
            let xl = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let xr = [xl[0] + 1.0, xl[1]];
            let (bl, br) = ((problem.beta)(xl), (problem.beta)(xr));
            if (bl[0] - br[0]).abs() > 1e-10 || (bl[1] - br[1]).abs() > 1e-10 {
                return Err(Error::ProblemSetup(
                    "advection field is not x-periodic but the problem is posed periodically"
                        .into(),
                ));
            }
        }
    }
    Ok(())
}

/// Assemble the full saddle-point system.
pub fn assemble(
    mesh: &Mesh,
    vmap: &Arc<DofMap>,
    pmap: &Arc<DofMap>,
    problem: &ProblemSpec,
    quad: QuadConfig,
) -> Result<SaddleSystem> {
    validate_pair(vmap.spec, pmap.spec)?;
    if vmap.bc != problem.boundary_condition {
        return Err(Error::invalid(
            "velocity DOF map boundary condition does not match the problem",
        ));
    }
    validate_boundary_flux(mesh, vmap, problem, quad)?;

    let n_u = vmap.n_global;
    let n_p = pmap.n_global;
    let dim = n_u + n_p + 1;
    let cell_geos = cell_geometries(mesh)?;

    let vbasis = reference_basis(vmap.spec)?;
    let pbasis = reference_basis(pmap.spec)?;
    let nv = vbasis.n_funcs();
    let np = pbasis.n_funcs();
    let vrule = triangle_rule(quad.volume_degree)?;
    let cart = vrule.cartesian();
    let vtab = vbasis.tabulate_vector(&cart);
    let ptab = pbasis.tabulate_scalar(&cart);

    let mut raw: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs = vec![0.0; dim];
    let mut kern = CellKernel::new(nv);
    let mut mass = vec![0.0; nv * nv];
    let mut coupling = vec![0.0; nv * np];
    let mut load = vec![0.0; nv];
    let mut pressure_integral = vec![0.0; np];

    for cell in 0..mesh.n_cells() {
        let geo = &cell_geos[cell];
        mass.iter_mut().for_each(|x| *x = 0.0);
        coupling.iter_mut().for_each(|x| *x = 0.0);
        load.iter_mut().for_each(|x| *x = 0.0);
        pressure_integral.iter_mut().for_each(|x| *x = 0.0);

        for (p, &wq) in vrule.weights.iter().enumerate() {
            let x = geo.map_point(cart[p]);
            let w = geo.area() * wq;
            let sig = (problem.sigma)(x);
            let fx = (problem.f)(x);
            kern.fill(&vtab, geo, p, [0.0, 0.0], false);
            for i in 0..nv {
                let vi = kern.values[i];
                load[i] += w * (fx[0] * vi[0] + fx[1] * vi[1]);
                for j in 0..nv {
                    let vj = kern.values[j];
                    mass[i * nv + j] += w * sig * (vj[0] * vi[0] + vj[1] * vi[1]);
                }
                for m in 0..np {
                    coupling[i * np + m] += w * ptab.values[p * np + m] * kern.divs[i];
                }
            }
            for m in 0..np {
                pressure_integral[m] += w * ptab.values[p * np + m];
            }
        }

        scatter_velocity_block(vmap, cell, cell, &mass, &mut raw);
        let (vd, vs) = (vmap.cell_dofs(cell), vmap.cell_signs(cell));
        let pd = pmap.cell_dofs(cell);
        for i in 0..nv {
            let Some(gi) = vd[i] else { continue };
            rhs[gi] += vs[i] * load[i];
            for m in 0..np {
                let gp = n_u + pd[m].expect("pressure DOFs never eliminated");
                let d = coupling[i * np + m];
                if d != 0.0 {
                    // -(p, div v) in the velocity rows, +(div u, q) transposed.
                    raw.push((gi, gp, -vs[i] * d));
                    raw.push((gp, gi, vs[i] * d));
                }
            }
        }
        for m in 0..np {
            let gp = n_u + pd[m].unwrap();
            let c = pressure_integral[m];
            raw.push((gp, dim - 1, c));
            raw.push((dim - 1, gp, c));
        }
    }

    push_convection(
        mesh,
        vmap,
        problem.beta.as_ref(),
        quad,
        FacetScope::Interior,
        &cell_geos,
        &mut raw,
    )?;

    Ok(SaddleSystem {
        n_u,
        n_p,
        triplets: canonical_triplets(&mut raw),
        rhs,
    })
}

/// Squared jump seminorm |v|_beta^2 of a velocity field: faces weighted by
/// |beta . n|, with the full trace on boundary faces.
pub fn jump_seminorm_squared(
    mesh: &Mesh,
    problem: &ProblemSpec,
    quad: QuadConfig,
    field: &DiscreteField,
) -> Result<f64> {
    let map = &field.map;
    let basis = reference_basis(map.spec)?;
    let n = basis.n_funcs();
    let erule = edge_rule(quad.edge_degree)?;
    let traces = basis.edge_traces(&erule);
    let cell_geos = cell_geometries(mesh)?;
    let mut total = 0.0;

    let trace_values = |cell: usize, edge: usize, flip: usize| -> Vec<[f64; 2]> {
        let le = mesh.local_edge(cell, edge).unwrap();
        let tab = &traces.tabs[le][flip];
        let geo = &cell_geos[cell];
        let local = field.local_coefficients(cell);
        (0..erule.points.len())
            .map(|q| {
                let mut v = [0.0; 2];
                for f in 0..n {
                    let b = tab.values[q * n + f];
                    v[0] += local[f] * b[0];
                    v[1] += local[f] * b[1];
                }
                geo.piola_value(v)
            })
            .collect()
    };

    for facet in interior_facets(mesh, map) {
        let (normal, len, _) = mesh.edge_geometry(facet.plus_edge)?;
        let [a, b] = mesh.edges[facet.plus_edge];
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let plus_vals = trace_values(facet.plus_cell, facet.plus_edge, 0);
        let (minus_cell, minus_edge) = facet.minus.unwrap();
        let minus_vals = trace_values(minus_cell, minus_edge, 1);
        for (q, (&t, &wq)) in erule.points.iter().zip(&erule.weights).enumerate() {
            let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let bx = (problem.beta)(x);
            let bn = (bx[0] * normal[0] + bx[1] * normal[1]).abs();
            let jump = [
                plus_vals[q][0] - minus_vals[q][0],
                plus_vals[q][1] - minus_vals[q][1],
            ];
            total += len * wq * bn * (jump[0] * jump[0] + jump[1] * jump[1]);
        }
    }
    for facet in boundary_facets(mesh, map) {
        let (normal, len, _) = mesh.edge_geometry(facet.plus_edge)?;
        let [a, b] = mesh.edges[facet.plus_edge];
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let vals = trace_values(facet.plus_cell, facet.plus_edge, 0);
        for (q, (&t, &wq)) in erule.points.iter().zip(&erule.weights).enumerate() {
            let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let bx = (problem.beta)(x);
            let bn = (bx[0] * normal[0] + bx[1] * normal[1]).abs();
            total += len * wq * bn * (vals[q][0] * vals[q][0] + vals[q][1] * vals[q][1]);
        }
    }
    Ok(total)
}

/// Jump seminorm |u_exact - u_h|_beta of the velocity error: the exact field
/// is single-valued, so interior jumps reduce to the discrete jump, while
/// boundary faces see the full error trace.
pub fn error_jump_seminorm_squared(
    mesh: &Mesh,
    problem: &ProblemSpec,
    quad: QuadConfig,
    exact: &dyn Fn([f64; 2]) -> [f64; 2],
    field: &DiscreteField,
) -> Result<f64> {
    let map = &field.map;
    let basis = reference_basis(map.spec)?;
    let n = basis.n_funcs();
    let erule = edge_rule(quad.edge_degree)?;
    let traces = basis.edge_traces(&erule);
    let cell_geos = cell_geometries(mesh)?;
    let mut total = 0.0;

    let trace_values = |cell: usize, edge: usize, flip: usize| -> Vec<[f64; 2]> {
        let le = mesh.local_edge(cell, edge).unwrap();
        let tab = &traces.tabs[le][flip];
        let geo = &cell_geos[cell];
        let local = field.local_coefficients(cell);
        (0..erule.points.len())
            .map(|q| {
                let mut v = [0.0; 2];
                for f in 0..n {
                    let b = tab.values[q * n + f];
                    v[0] += local[f] * b[0];
                    v[1] += local[f] * b[1];
                }
                geo.piola_value(v)
            })
            .collect()
    };

    let edge_points = |edge: usize| -> Vec<[f64; 2]> {
        let [a, b] = mesh.edges[edge];
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        erule
            .points
            .iter()
            .map(|&t| [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])])
            .collect()
    };

    for facet in interior_facets(mesh, map) {
        let (normal, len, _) = mesh.edge_geometry(facet.plus_edge)?;
        let plus_pts = edge_points(facet.plus_edge);
        let plus_vals = trace_values(facet.plus_cell, facet.plus_edge, 0);
        let (minus_cell, minus_edge) = facet.minus.unwrap();
        let minus_pts = edge_points(minus_edge);
        let minus_vals = trace_values(minus_cell, minus_edge, 1);
        for (q, &wq) in erule.weights.iter().enumerate() {
            let bx = (problem.beta)(plus_pts[q]);
            let bn = (bx[0] * normal[0] + bx[1] * normal[1]).abs();
            let e_plus = [
                exact(plus_pts[q])[0] - plus_vals[q][0],
                exact(plus_pts[q])[1] - plus_vals[q][1],
            ];
            let e_minus = [
                exact(minus_pts[q])[0] - minus_vals[q][0],
                exact(minus_pts[q])[1] - minus_vals[q][1],
            ];
            let jump = [e_plus[0] - e_minus[0], e_plus[1] - e_minus[1]];
            total += len * wq * bn * (jump[0] * jump[0] + jump[1] * jump[1]);
        }
    }
    for facet in boundary_facets(mesh, map) {
        let (normal, len, _) = mesh.edge_geometry(facet.plus_edge)?;
        let pts = edge_points(facet.plus_edge);
        let vals = trace_values(facet.plus_cell, facet.plus_edge, 0);
        for (q, &wq) in erule.weights.iter().enumerate() {
            let bx = (problem.beta)(pts[q]);
            let bn = (bx[0] * normal[0] + bx[1] * normal[1]).abs();
            let e = [
                exact(pts[q])[0] - vals[q][0],
                exact(pts[q])[1] - vals[q][1],
            ];
            total += len * wq * bn * (e[0] * e[0] + e[1] * e[1]);
        }
    }
    Ok(total)
}
