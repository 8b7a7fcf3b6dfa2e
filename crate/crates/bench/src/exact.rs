//! The manufactured solutions of the numerical examples, with every
//! derivative the error norms need and the right-hand sides derived
//! symbolically from the PDEs.

use std::f64::consts::PI;

use cubefem::field::Field;

use crate::expr::{c, grad, x, y, z, Expr, Sop, SopVec};

/// A vector solution `u`, optionally a pressure `p`, and the load `f`.
#[derive(Clone, Debug)]
pub struct ExactSolution {
    pub u: SopVec,
    pub curl: SopVec,
    /// `∂ᵢ(curl u)_k` at `3i + k`.
    pub grad_curl: Vec<Sop>,
    /// `∂ᵢu_k` at `3i + k`.
    pub grad: Vec<Sop>,
    pub div: Sop,
    pub p: Sop,
    pub f: SopVec,
}

impl ExactSolution {
    fn new(u: SopVec, p: Sop, f: SopVec) -> Self {
        let curl = u.curl();
        ExactSolution {
            grad_curl: curl.jacobian(),
            grad: u.jacobian(),
            div: u.div(),
            curl,
            u,
            p,
            f,
        }
    }

    pub fn eval_many(items: &[Sop], at: [f64; 3]) -> Vec<f64> {
        items.iter().map(|s| s.eval(at)).collect()
    }

    /// The solution as a [`Field`] with its curl and divergence.
    pub fn velocity(&self) -> SolutionField<'_> {
        SolutionField(self)
    }

    /// The load as a [`Field`].
    pub fn load(&self) -> VecField<'_> {
        VecField(&self.f)
    }
}

pub struct SolutionField<'a>(&'a ExactSolution);

impl Field for SolutionField<'_> {
    fn ncomp(&self) -> usize {
        3
    }

    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        self.0.u.eval(x)
    }

    fn curl(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        Some(self.0.curl.eval(x))
    }

    fn div(&self, x: [f64; 3]) -> Option<f64> {
        Some(self.0.div.eval(x))
    }
}

pub struct VecField<'a>(pub &'a SopVec);

impl Field for VecField<'_> {
    fn ncomp(&self) -> usize {
        3
    }

    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        self.0.eval(x)
    }
}

fn s(v: Expr) -> Expr {
    (PI * v).sin()
}

fn co(v: Expr) -> Expr {
    (PI * v).cos()
}

/// The velocity of the `−curl Δ curl` example on the unit cube.
pub fn example1_velocity() -> SopVec {
    SopVec::from_exprs([
        s(x()).pow(3) * s(y()).pow(2) * s(z()).pow(2) * co(y()) * co(z()),
        s(y()).pow(3) * s(z()).pow(2) * s(x()).pow(2) * co(z()) * co(x()),
        c(-2.0) * s(z()).pow(3) * s(x()).pow(2) * s(y()).pow(2) * co(x()) * co(y()),
    ])
    .expect("trigonometric arguments are linear")
}

/// `f = −μ curl Δ curl u + curl curl u + γ u` with `p = 0`.
pub fn example1(mu: f64, gamma: f64) -> ExactSolution {
    let u = example1_velocity();
    let cu = u.curl();
    let f = &(&cu.laplacian().curl().scale(-mu) + &cu.curl()) + &u.scale(gamma);
    ExactSolution::new(u, Sop::zero(), f)
}

/// `u = curl ψ` for the Brinkman example.
pub fn example2_velocity() -> SopVec {
    let one = || c(1.0);
    let psi = SopVec::from_exprs([
        y().pow(2) * (one() - y()).pow(2) * x() * (one() - x()) * z().pow(2) * (one() - z()).pow(3),
        x().pow(2) * (one() - x()).pow(2) * y() * (one() - y()) * z().pow(2) * (one() - z()).pow(3),
        c(0.0),
    ])
    .expect("polynomial stream function");
    psi.curl()
}

pub fn example2_pressure() -> Sop {
    ((x() - c(0.5)) * (y() - c(0.5)) * (c(1.0) - z()))
        .to_sop()
        .expect("polynomial pressure")
}

/// `f = −ν Δu + α u + ∇p`, `g = div u = 0`.
pub fn example2(nu: f64, alpha: f64) -> ExactSolution {
    let u = example2_velocity();
    let p = example2_pressure();
    let f = &(&u.laplacian().scale(-nu) + &u.scale(alpha)) + &grad(&p);
    ExactSolution::new(u, p, f)
}

/// Largest `|u|` over a tensor grid of boundary points of the unit cube.
pub fn max_boundary_value(u: &SopVec, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let t = |k: usize| k as f64 / n as f64;
    for axis in 0..3 {
        for side in [0.0, 1.0] {
            for a in 0..=n {
                for b in 0..=n {
                    let mut p = [0.0; 3];
                    let [i, j] = [(axis + 1) % 3, (axis + 2) % 3];
                    p[axis] = side;
                    p[i] = t(a);
                    p[j] = t(b);
                    worst = u.eval(p).iter().fold(worst, |w, v| w.max(v.abs()));
                }
            }
        }
    }
    worst
}
