//! Symbolic derivatives of the manufactured solutions against central
//! finite differences.

use cubefem_bench::exact::{example1, example2, ExactSolution};
use cubefem_bench::expr::{Sop, SopVec};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

const H: f64 = 1e-5;

fn fd(f: impl Fn([f64; 3]) -> [f64; 3], x: [f64; 3], i: usize) -> [f64; 3] {
    let (mut a, mut b) = (x, x);
    a[i] += H;
    b[i] -= H;
    let (fa, fb) = (f(a), f(b));
    [0, 1, 2].map(|k| (fa[k] - fb[k]) / (2.0 * H))
}

fn jac_fd(v: &SopVec, x: [f64; 3]) -> Vec<f64> {
    (0..3).flat_map(|i| fd(|y| v.eval(y), x, i)).collect()
}

fn rel(got: &[f64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(1e-8f64, |m, v| m.max(v.abs()));
    got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
}

fn eval(items: &[Sop], x: [f64; 3]) -> Vec<f64> {
    ExactSolution::eval_many(items, x)
}

fn check(e: &ExactSolution, seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..20 {
        let x = [0; 3].map(|_| rng.random_range(0.05..0.95));
        let j = jac_fd(&e.u, x);
        assert!(rel(&eval(&e.grad, x), &j) < 1e-6, "grad at {x:?}");
        let curl = [j[5] - j[7], j[6] - j[2], j[1] - j[3]];
        assert!(rel(&e.curl.eval(x), &curl) < 1e-6, "curl at {x:?}");
        assert!((e.div.eval(x) - (j[0] + j[4] + j[8])).abs() < 1e-6 * j.iter().fold(1.0f64, |m, v| m.max(v.abs())));
        assert!(rel(&eval(&e.grad_curl, x), &jac_fd(&e.curl, x)) < 1e-6, "grad curl at {x:?}");
    }
}

#[test]
fn example1_derivatives() {
    check(&example1(1.0, 1.0), 1);
}

#[test]
fn example2_derivatives() {
    check(&example2(1.0, 1.0), 2);
}

#[test]
fn example2_load_matches_momentum_equation() {
    // f = −νΔu + αu + ∇p with Δu from differences of the exact gradient.
    let (nu, alpha) = (0.3, 2.0);
    let e = example2(nu, alpha);
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..10 {
        let x = [0; 3].map(|_| rng.random_range(0.05..0.95));
        let mut lap = [0.0; 3];
        for i in 0..3 {
            let d = fd(|y| { let g = eval(&e.grad, y); [g[3 * i], g[3 * i + 1], g[3 * i + 2]] }, x, i);
            for k in 0..3 {
                lap[k] += d[k];
            }
        }
        let gp = fd(|y| [e.p.eval(y); 3], x, 0)[0];
        let gp = [gp, fd(|y| [e.p.eval(y); 3], x, 1)[0], fd(|y| [e.p.eval(y); 3], x, 2)[0]];
        let u = e.u.eval(x);
        let want: Vec<f64> = (0..3).map(|k| -nu * lap[k] + alpha * u[k] + gp[k]).collect();
        assert!(rel(&e.f.eval(x), &want) < 1e-6, "{x:?}");
    }
}
