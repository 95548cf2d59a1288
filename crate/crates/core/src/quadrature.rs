//! Quadrature rules: symmetric positive rules on the reference triangle and
//! Gauss-Legendre rules on [0, 1].
//!
//! Triangle rules of degree >= 3 are built by mapping a tensor Gauss grid
//! through the collapsed-coordinate (Duffy) transform and symmetrising the
//! result over the six affine symmetries of the triangle. The construction
//! keeps every weight strictly positive at any exactness degree, which the
//! jump seminorm relies on.

use crate::error::{Error, Result};

pub const MAX_TRIANGLE_DEGREE: usize = 14;
pub const MAX_EDGE_DEGREE: usize = 19;

/// Quadrature rule on the reference triangle (0,0), (1,0), (0,1).
///
/// Points are barycentric triples; weights sum to 1 and are scaled by the
/// element area on use.
#[derive(Clone, Debug)]
pub struct QuadRuleTri {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadRuleTri {
    /// Cartesian reference coordinates (x, y) of the rule points.
    pub fn cartesian(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|b| [b[1], b[2]]).collect()
    }
}

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
#[derive(Clone, Debug)]
pub struct QuadRule1D {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

/// Quadrature degrees used for assembly and evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadConfig {
    pub volume_degree: usize,
    pub edge_degree: usize,
}

impl QuadConfig {
    /// Default degrees for velocity degree `k`: coefficient fields are
    /// trigonometric, so a fixed margin over polynomial exactness is applied.
    pub fn for_element_degree(k: usize) -> Self {
        QuadConfig {
            volume_degree: 2 * k + 6,
            edge_degree: 2 * k + 5,
        }
    }

    pub fn elevated(self, by: usize) -> Self {
        QuadConfig {
            volume_degree: (self.volume_degree + by).min(MAX_TRIANGLE_DEGREE),
            edge_degree: (self.edge_degree + by).min(MAX_EDGE_DEGREE),
        }
    }

    /// Degrees used when computing error norms (elevated to avoid favourable
    /// cancellation against the assembly quadrature).
    pub fn error_config(self) -> Self {
        self.elevated(2)
    }
}

/// Symmetric positive-weight rule on the reference triangle, exact for all
/// polynomials of total degree `exact_degree` (or higher).
pub fn triangle_rule(exact_degree: usize) -> Result<QuadRuleTri> {
    if exact_degree == 0 || exact_degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::invalid(format!(
            "triangle rule degree {exact_degree} unsupported (1..={MAX_TRIANGLE_DEGREE})"
        )));
    }
    let rule = match exact_degree {
        1 => QuadRuleTri {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
            exact_degree: 1,
        },
        2 => {
            let a = 2.0 / 3.0;
            let b = 1.0 / 6.0;
            QuadRuleTri {
                points: vec![[a, b, b], [b, a, b], [b, b, a]],
                weights: vec![1.0 / 3.0; 3],
                exact_degree: 2,
            }
        }
        d => symmetrized_duffy_rule(d),
    };
    debug_assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    Ok(rule)
}

fn symmetrized_duffy_rule(degree: usize) -> QuadRuleTri {
    // The Duffy map x = u, y = v (1 - u) carries a Jacobian (1 - u), so the
    // u-direction must integrate degree + 1 exactly: m = ceil((degree + 2) / 2)
    // Gauss points per direction.
    let m = (degree + 3) / 2;
    let gauss = gauss_legendre_unit(m);
    let mut points = Vec::with_capacity(6 * m * m);
    let mut weights = Vec::with_capacity(6 * m * m);
    for (&u, &wu) in gauss.0.iter().zip(&gauss.1) {
        for (&v, &wv) in gauss.0.iter().zip(&gauss.1) {
            let x = u;
            let y = v * (1.0 - u);
            // Raw weights sum to the reference area 1/2; stored weights are
            // normalised to sum to 1.
            let w = 2.0 * wu * wv * (1.0 - u) / 6.0;
            let bary = [1.0 - x - y, x, y];
            for perm in PERMUTATIONS {
                points.push([bary[perm[0]], bary[perm[1]], bary[perm[2]]]);
                weights.push(w);
            }
        }
    }
    QuadRuleTri {
        points,
        weights,
        exact_degree: degree,
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Gauss-Legendre rule on [0, 1], exact for polynomials of degree
/// `exact_degree` (or higher).
pub fn edge_rule(exact_degree: usize) -> Result<QuadRule1D> {
    if exact_degree == 0 || exact_degree > MAX_EDGE_DEGREE {
        return Err(Error::invalid(format!(
            "edge rule degree {exact_degree} unsupported (1..={MAX_EDGE_DEGREE})"
        )));
    }
    let n = exact_degree / 2 + 1;
    let (points, weights) = gauss_legendre_unit(n);
    Ok(QuadRule1D {
        points,
        weights,
        exact_degree: 2 * n - 1,
    })
}

/// Gauss-Legendre nodes and weights on [0, 1] (weights sum to 1), computed by
/// Newton iteration on the Legendre recurrence.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess for the i-th root of P_n on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] -> [0, 1]; roots come out in descending order.
        points[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 0.5 * w;
    }
    (points, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed-form \int_T x^a y^b dx over the reference triangle: a! b! / (a+b+2)!.
    fn monomial_integral(a: u32, b: u32) -> f64 {
        let fact = |m: u32| (1..=m as u128).product::<u128>().max(1) as f64;
        fact(a) * fact(b) / fact(a + b + 2)
    }

    fn integrate_tri(rule: &QuadRuleTri, f: impl Fn(f64, f64) -> f64) -> f64 {
        // Weights sum to 1; reference area is 1/2.
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| 0.5 * w * f(p[1], p[2]))
            .sum()
    }

    #[test]
    fn degree_one_integrates_constants_exactly() {
        let r = triangle_rule(1).unwrap();
        assert_eq!(integrate_tri(&r, |_, _| 1.0), 0.5);
    }

    #[test]
    fn degree_two_matches_closed_form_x_squared() {
        let r = triangle_rule(2).unwrap();
        let got = integrate_tri(&r, |x, _| x * x);
        assert!((got - 1.0 / 12.0).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn degree_eight_x4y4_matches_beta_integral() {
        let r = triangle_rule(8).unwrap();
        let got = integrate_tri(&r, |x, y| x.powi(4) * y.powi(4));
        let want = monomial_integral(4, 4);
        assert!((got - want).abs() < 1e-13, "got {got} want {want}");
    }

    #[test]
    fn exactness_sweep_all_triangle_rules() {
        for deg in 1..=MAX_TRIANGLE_DEGREE {
            let r = triangle_rule(deg).unwrap();
            assert!(r.exact_degree >= deg);
            for a in 0..=deg as u32 {
                for b in 0..=(deg as u32 - a) {
                    let got = integrate_tri(&r, |x, y| x.powi(a as i32) * y.powi(b as i32));
                    let want = monomial_integral(a, b);
                    assert!(
                        (got - want).abs() < 1e-13,
                        "degree {deg} monomial x^{a} y^{b}: got {got} want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn all_weights_positive_and_barycentric_valid() {
        for deg in 1..=MAX_TRIANGLE_DEGREE {
            let r = triangle_rule(deg).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for w in &r.weights {
                assert!(*w > 0.0);
            }
            for p in &r.points {
                for l in p {
                    assert!((-1e-15..=1.0 + 1e-15).contains(l));
                }
                assert!((p[0] + p[1] + p[2] - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn triangle_rule_points_are_symmetric_sets() {
        // The point multiset must be invariant under barycentric permutation.
        for deg in [3usize, 8, 11] {
            let r = triangle_rule(deg).unwrap();
            let key = |p: &[f64; 3]| {
                let mut s = [p[0], p[1], p[2]];
                s.sort_by(f64::total_cmp);
                [s[0].to_bits(), s[1].to_bits(), s[2].to_bits()]
            };
            use std::collections::HashMap;
            let mut orbits: HashMap<_, usize> = HashMap::new();
            for p in &r.points {
                *orbits.entry(key(p)).or_default() += 1;
            }
            for (_, count) in orbits {
                assert_eq!(count % 6, 0);
            }
        }
    }

    #[test]
    fn unsupported_degrees_rejected() {
        assert!(triangle_rule(0).is_err());
        assert!(triangle_rule(MAX_TRIANGLE_DEGREE + 1).is_err());
        assert!(edge_rule(0).is_err());
        assert!(edge_rule(MAX_EDGE_DEGREE + 1).is_err());
    }

    #[test]
    fn edge_rule_closed_forms() {
        let one_point = edge_rule(1).unwrap();
        assert_eq!(one_point.points.len(), 1);
        let got: f64 = one_point
            .points
            .iter()
            .zip(&one_point.weights)
            .map(|(x, w)| w * x)
            .sum();
        assert_eq!(got, 0.5);

        let two_point = edge_rule(3).unwrap();
        assert_eq!(two_point.points.len(), 2);
        let got: f64 = two_point
            .points
            .iter()
            .zip(&two_point.weights)
            .map(|(x, w)| w * x.powi(3))
            .sum();
        assert!((got - 0.25).abs() < 1e-15);

        let five_point = edge_rule(9).unwrap();
        assert_eq!(five_point.points.len(), 5);
        let got: f64 = five_point
            .points
            .iter()
            .zip(&five_point.weights)
            .map(|(x, w)| w * x.powi(9))
            .sum();
        assert!((got - 0.1).abs() < 1e-14);
    }

    #[test]
    fn edge_rule_exactness_sweep() {
        for deg in 1..=MAX_EDGE_DEGREE {
            let r = edge_rule(deg).unwrap();
            for p in 0..=deg as u32 {
                let got: f64 = r
                    .points
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| w * x.powi(p as i32))
                    .sum();
                let want = 1.0 / (p as f64 + 1.0);
                assert!(
                    (got - want).abs() < 1e-13,
                    "degree {deg} x^{p}: got {got} want {want}"
                );
            }
            for w in &r.weights {
                assert!(*w > 0.0);
            }
        }
    }

    #[test]
    fn default_config_degrees() {
        let c = QuadConfig::for_element_degree(1);
        assert_eq!(c.volume_degree, 8);
        assert_eq!(c.edge_degree, 7);
        assert_eq!(c.error_config().volume_degree, 10);
    }
}
