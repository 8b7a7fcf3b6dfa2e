//! Preconditioned MINRES (Paige–Saunders) for symmetric, possibly
//! indefinite systems, with a diagonal preconditioner.

use crate::error::{Error, Result};
use crate::linsolve::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Target for `‖Ax − b‖ / ‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of times the iteration may be restarted from the current
    /// iterate when the true residual misses the target.
    pub restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 50_000,
            restarts: 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub x: Vec<f64>,
    /// True relative residual `‖Ax − b‖ / ‖b‖`, recomputed after the solve.
    pub rel_residual: f64,
    pub iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inverse of the diagonal preconditioner: `1/|aᵢᵢ|`, or `1/‖row i‖` when
/// the diagonal vanishes (saddle-point multiplier rows).
fn diagonal_scaling(a: &SparseMatrix) -> Vec<f64> {
    (0..a.nrows())
        .map(|i| {
            let d = a.get(i, i).abs();
            if d > 0.0 {
                1.0 / d
            } else {
                let r = a.row(i).map(|(_, v)| v * v).sum::<f64>().sqrt();
                if r > 0.0 {
                    1.0 / r
                } else {
                    1.0
                }
            }
        })
        .collect()
}

fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    b.iter().zip(&ax).map(|(b, ax)| b - ax).collect()
}

/// Solves `A x = b` for symmetric `A`. The returned residual is always the
/// re-verified unpreconditioned one.
pub fn solve_sym_indef(a: &SparseMatrix, b: &[f64], opts: &SolverOptions) -> Result<SolveReport> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Dimension(format!(
            "solve_sym_indef: {}x{} matrix with rhs of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    a.check_symmetric(1e-12)?;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(SolveReport {
            x: vec![0.0; n],
            rel_residual: 0.0,
            iterations: 0,
        });
    }
    let minv = diagonal_scaling(a);
    let mut x = vec![0.0; n];
    let mut iterations = 0;
    let mut inner_tol = opts.tol;
    let mut best = f64::INFINITY;
    for _ in 0..=opts.restarts {
        let r0 = residual(a, &x, b);
        let budget = opts.max_iter.saturating_sub(iterations);
        if budget == 0 {
            break;
        }
        let (dx, its) = minres_core(a, &r0, &minv, inner_tol * bnorm / norm(&r0).max(f64::MIN_POSITIVE), budget);
        iterations += its;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        let rel = norm(&residual(a, &x, b)) / bnorm;
        best = best.min(rel);
        if rel <= opts.tol {
            return Ok(SolveReport {
                x,
                rel_residual: rel,
                iterations,
            });
        }
        // The preconditioned estimate was optimistic; aim lower next time.
        inner_tol = (inner_tol * 0.1).max(1e-15);
    }
    Err(Error::IterationLimit {
        iterations,
        residual: best,
    })
}

/// Plain preconditioned MINRES from a zero initial guess. Stops when the
/// preconditioned residual estimate drops below `rtol` relative to its
/// initial value.
fn minres_core(a: &SparseMatrix, b: &[f64], minv: &[f64], rtol: f64, max_iter: usize) -> (Vec<f64>, usize) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r1 = b.to_vec();
    let mut y: Vec<f64> = r1.iter().zip(minv).map(|(r, m)| r * m).collect();
    let beta1 = dot(&r1, &y).sqrt();
    if beta1 == 0.0 {
        return (x, 0);
    }
    let mut r2 = r1.clone();
    let mut oldb = 0.0;
    let mut beta = beta1;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta1;
    let mut cs = -1.0;
    let mut sn = 0.0;
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut its = 0;
    while its < max_iter {
        its += 1;
        let s = 1.0 / beta;
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        a.mul_vec_into(&v, &mut y);
        if its >= 2 {
            let c = beta / oldb;
            for (yi, ri) in y.iter_mut().zip(&r1) {
                *yi -= c * ri;
            }
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        for (yi, ri) in y.iter_mut().zip(&r2) {
            *yi -= c * ri;
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        for ((yi, ri), m) in y.iter_mut().zip(&r2).zip(minv) {
            *yi = ri * m;
        }
        oldb = beta;
        beta = dot(&r2, &y).max(0.0).sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        let denom = 1.0 / gamma;
        for i in 0..n {
            let w1 = w2[i];
            w2[i] = w[i];
            w[i] = (v[i] - oldeps * w1 - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }
        if phibar <= rtol * beta1 || beta == 0.0 {
            break;
        }
    }
    (x, its)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsolve::sparse::TripletBuilder;

    #[test]
    fn identity_converges_immediately() {
        let a = SparseMatrix::identity(5);
        let b = vec![1.0, -2.0, 3.0, 0.5, 4.0];
        let rep = solve_sym_indef(&a, &b, &SolverOptions::default()).unwrap();
        assert!(rep.iterations <= 2);
        for (x, b) in rep.x.iter().zip(&b) {
            assert!((x - b).abs() < 1e-14);
        }
    }

    #[test]
    fn saddle_point_system() {
        // [[2, 0, 1], [0, 3, 1], [1, 1, 0]]
        let mut t = TripletBuilder::new(3, 3);
        for (i, j, v) in [(0, 0, 2.0), (1, 1, 3.0), (0, 2, 1.0), (2, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)] {
            t.add(i, j, v);
        }
        let a = t.build();
        let b = vec![1.0, 2.0, 3.0];
        let rep = solve_sym_indef(&a, &b, &SolverOptions::default()).unwrap();
        let r = residual(&a, &rep.x, &b);
        assert!(norm(&r) < 1e-10 * norm(&b));
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mut t = TripletBuilder::new(2, 2);
        t.add(0, 1, 1.0);
        t.add(0, 0, 1.0);
        t.add(1, 1, 1.0);
        assert!(matches!(
            solve_sym_indef(&t.build(), &[1.0, 1.0], &SolverOptions::default()),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn iteration_limit_is_reported() {
        let n = 40;
        let mut t = TripletBuilder::new(n, n);
        for i in 0..n {
            t.add(i, i, 2.0 + i as f64);
            if i + 1 < n {
                t.add(i, i + 1, -1.0);
                t.add(i + 1, i, -1.0);
            }
        }
        let opts = SolverOptions {
            tol: 1e-14,
            max_iter: 3,
            restarts: 0,
        };
        let b = vec![1.0; n];
        assert!(matches!(
            solve_sym_indef(&t.build(), &b, &opts),
            Err(Error::IterationLimit { .. })
        ));
    }
}
