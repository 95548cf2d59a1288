//! Analytic problem definitions: advection field, reaction coefficient,
//! source and exact solutions for the manufactured examples.

use crate::error::{Error, Result};
use crate::fe::BoundaryCondition;
use std::sync::Arc;

pub type VectorField = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;
pub type ScalarField = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficients and exact solutions of one model problem on the unit square.
#[derive(Clone)]
pub struct ProblemSpec {
    pub label: String,
    /// Solenoidal advection field with zero normal trace on the boundary
    /// (the non-periodic part of it, for periodic problems).
    pub beta: VectorField,
    /// Reaction coefficient, bounded below by `sigma_min` > 0.
    pub sigma: ScalarField,
    pub sigma_min: f64,
    /// Momentum source.
    pub f: VectorField,
    pub exact_u: Option<VectorField>,
    /// Mean-zero exact pressure (`None` when the exact pressure is zero).
    pub exact_p: Option<ScalarField>,
    pub vortex_index: Option<u32>,
    /// Boundary treatment the problem is posed with.
    pub boundary_condition: BoundaryCondition,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("label", &self.label)
            .field("sigma_min", &self.sigma_min)
            .field("vortex_index", &self.vortex_index)
            .field("boundary_condition", &self.boundary_condition)
            .finish()
    }
}

/// Stationary vortex problem: streamfunction sin(n pi x) sin(n pi y), advection
/// field equal to its curl, source sigma * beta, exact velocity beta and the
/// matching mean-zero pressure.
pub fn vortex_problem(n: u32, sigma: f64) -> Result<ProblemSpec> {
    if n == 0 {
        return Err(Error::invalid("vortex index n must be positive"));
    }
    if sigma <= 0.0 {
        return Err(Error::invalid("sigma must be positive"));
    }
    let np = n as f64 * std::f64::consts::PI;
    let beta: VectorField = Arc::new(move |x: [f64; 2]| {
        [
            np * (np * x[0]).sin() * (np * x[1]).cos(),
            -np * (np * x[0]).cos() * (np * x[1]).sin(),
        ]
    });
    let f: VectorField = {
        let beta = beta.clone();
        Arc::new(move |x| {
            let b = beta(x);
            [sigma * b[0], sigma * b[1]]
        })
    };
    let exact_p: ScalarField = Arc::new(move |x: [f64; 2]| {
        let c = (np * x[0]).cos();
        let s = (np * x[1]).sin();
        np * np * (c * c - s * s) / 2.0
    });
    Ok(ProblemSpec {
        label: format!("vortex(n={n}, sigma={sigma})"),
        beta: beta.clone(),
        sigma: Arc::new(move |_| sigma),
        sigma_min: sigma,
        f,
        exact_u: Some(beta),
        exact_p: Some(exact_p),
        vortex_index: Some(n),
        boundary_condition: BoundaryCondition::ZeroNormal,
    })
}

/// x-independent shear flow: beta = (profile(y), 0) on the x-periodic strip
/// with zero normal trace on y = 0 and y = 1; source sigma * beta, exact
/// velocity beta and zero pressure.
pub fn shear_problem(
    profile: ProfileFn,
    label: &str,
    sigma: f64,
) -> Result<ProblemSpec> {
    if sigma <= 0.0 {
        return Err(Error::invalid("sigma must be positive"));
    }
    let beta: VectorField = {
        let profile = profile.clone();
        Arc::new(move |x: [f64; 2]| [profile(x[1]), 0.0])
    };
    let f: VectorField = {
        let beta = beta.clone();
        Arc::new(move |x| {
            let b = beta(x);
            [sigma * b[0], sigma * b[1]]
        })
    };
    Ok(ProblemSpec {
        label: format!("shear({label}, sigma={sigma})"),
        beta: beta.clone(),
        sigma: Arc::new(move |_| sigma),
        sigma_min: sigma,
        f,
        exact_u: Some(beta),
        exact_p: None,
        vortex_index: None,
        boundary_condition: BoundaryCondition::PeriodicX,
    })
}

/// Named shear profiles selectable from the command line.
pub fn shear_profile(name: &str) -> Result<(ProfileFn, &'static str)> {
    match name {
        "constant" => Ok((Arc::new(|_| 1.0), "constant")),
        "linear" => Ok((Arc::new(|y| y), "linear")),
        "sine" => Ok((
            Arc::new(|y: f64| (std::f64::consts::PI * y).sin()),
            "sine",
        )),
        other => Err(Error::invalid(format!(
            "unknown shear profile `{other}` (expected constant, linear or sine)"
        ))),
    }
}
