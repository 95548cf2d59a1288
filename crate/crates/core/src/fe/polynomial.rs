//! Minimal bivariate polynomials used to express reference basis functions.

/// Sum of terms c * x^a * y^b.
#[derive(Clone, Debug, Default)]
pub struct Poly2 {
    terms: Vec<(f64, u32, u32)>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { terms: Vec::new() }
    }

    pub fn term(c: f64, a: u32, b: u32) -> Self {
        Poly2 {
            terms: vec![(c, a, b)],
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, a, b)| c * x.powi(a as i32) * y.powi(b as i32))
            .sum()
    }

    pub fn dx(&self) -> Poly2 {
        Poly2 {
            terms: self
                .terms
                .iter()
                .filter(|t| t.1 > 0)
                .map(|&(c, a, b)| (c * a as f64, a - 1, b))
                .collect(),
        }
    }

    pub fn dy(&self) -> Poly2 {
        Poly2 {
            terms: self
                .terms
                .iter()
                .filter(|t| t.2 > 0)
                .map(|&(c, a, b)| (c * b as f64, a, b - 1))
                .collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Poly2, s: f64) {
        for &(c, a, b) in &other.terms {
            self.terms.push((s * c, a, b));
        }
    }
}

/// Vector-valued polynomial (two scalar components).
#[derive(Clone, Debug)]
pub struct VecPoly2 {
    pub x: Poly2,
    pub y: Poly2,
}

impl VecPoly2 {
    pub fn zero() -> Self {
        VecPoly2 {
            x: Poly2::zero(),
            y: Poly2::zero(),
        }
    }

    pub fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        [self.x.eval(p[0], p[1]), self.y.eval(p[0], p[1])]
    }

    pub fn div(&self) -> Poly2 {
        let mut d = self.x.dx();
        d.add_scaled(&self.y.dy(), 1.0);
        d
    }

    /// Jacobian [[dvx/dx, dvx/dy], [dvy/dx, dvy/dy]] at a point.
    pub fn grad(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        [
            [self.x.dx().eval(p[0], p[1]), self.x.dy().eval(p[0], p[1])],
            [self.y.dx().eval(p[0], p[1]), self.y.dy().eval(p[0], p[1])],
        ]
    }

    pub fn add_scaled(&mut self, other: &VecPoly2, s: f64) {
        self.x.add_scaled(&other.x, s);
        self.y.add_scaled(&other.y, s);
    }
}

/// Shifted Legendre polynomial L_m on [0, 1], orthogonal family with L_0 = 1.
pub fn legendre01(m: usize, t: f64) -> f64 {
    let x = 2.0 * t - 1.0;
    let mut p0 = 1.0;
    let mut p1 = x;
    match m {
        0 => 1.0,
        1 => x,
        _ => {
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}
