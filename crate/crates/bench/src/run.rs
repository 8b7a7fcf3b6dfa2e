//! Convergence runs: assemble, solve, measure errors, compute orders.

use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};

use cubefem::assembly::{
    assemble_brinkman, assemble_quadcurl, broken_error, AssembledSystem, BrinkmanParams, QuadCurlParams,
};
use cubefem::linsolve::{solve_sym_indef, SolveReport, SolverOptions};
use cubefem::mesh::{unit_cube_mesh, Mesh};
use cubefem::poly::PolyVec;
use cubefem::quadrature::gauss_tensor;
use cubefem::refelem::{Deriv, ElementDef};
use cubefem::Family;

use crate::exact::{example1, example2, max_boundary_value, ExactSolution};
use crate::expr::{Sop, SopVec};

/// Extra quadrature degree of the error integrals.
pub const ERROR_OVERSAMPLING: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    QuadCurl,
    Brinkman,
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::QuadCurl => "quadcurl",
            Problem::Brinkman => "brinkman",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub problem: Problem,
    pub order: usize,
    /// Meshes `h = 1/2, …, 1/2^levels`.
    pub levels: usize,
    /// `μ` or `ν`.
    pub diffusion: f64,
    /// `γ` or `α`.
    pub reaction: f64,
    pub tol: f64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        anyhow::ensure!(self.diffusion > 0.0, "mu/nu must be positive, got {}", self.diffusion);
        anyhow::ensure!(self.reaction >= 0.0, "gamma/alpha must be non-negative, got {}", self.reaction);
        anyhow::ensure!(self.levels >= 1, "need at least one level");
        anyhow::ensure!(self.tol > 0.0, "solver tolerance must be positive");
        Family::SPlus1.check_order(self.order)?;
        Ok(())
    }
}

/// Errors of one mesh level. `err_curl` is the curl error of the
/// `−curl Δ curl` problem and is not measured for Brinkman. `err_p` is
/// `‖p_h‖` for `−curl Δ curl` (the exact multiplier vanishes) and
/// `‖p − p_h‖` for Brinkman.
#[derive(Clone, Debug)]
pub struct ErrorRecord {
    pub h: f64,
    pub dofs: usize,
    pub err_l2: f64,
    pub err_curl: Option<f64>,
    pub err_h1_broken: f64,
    pub err_triple: f64,
    pub err_p: f64,
    /// `‖p_h‖` (`−curl Δ curl`) or `‖div u_h‖` (Brinkman); zero in exact
    /// arithmetic.
    pub constraint: f64,
    /// `‖f‖` on the domain, the scale of the data.
    pub load_norm: f64,
    pub rel_residual: f64,
    pub iterations: usize,
    pub seconds: f64,
}

/// `log₂(e_k / e_{k+1})`; `None` when a level has zero error.
pub fn eoc(errors: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| (w[0] > 0.0 && w[1] > 0.0).then(|| (w[0] / w[1]).log2()))
        .collect()
}

fn solve(sys: &AssembledSystem, tol: f64) -> Result<SolveReport> {
    let opts = SolverOptions {
        tol,
        ..SolverOptions::default()
    };
    Ok(solve_sym_indef(&sys.matrix, &sys.rhs, &opts)?)
}

fn at(items: &[Sop]) -> impl Fn([f64; 3]) -> Vec<f64> + '_ {
    move |x| ExactSolution::eval_many(items, x)
}

fn zeros(n: usize) -> impl Fn([f64; 3]) -> Vec<f64> {
    move |_| vec![0.0; n]
}

/// Error norms of a discrete velocity (and multiplier) against `exact`.
pub fn compute_errors(
    cfg: &RunConfig,
    mesh: &Mesh,
    sys: &AssembledSystem,
    x: &[f64],
    exact: &ExactSolution,
) -> Result<ErrorRecord> {
    let (u, p) = sys.split(x);
    let cell = mesh.cell_box(0);
    let r = cfg.order;
    let k = ERROR_OVERSAMPLING;
    let rec = match cfg.problem {
        Problem::QuadCurl => {
            let ev = ElementDef::new(Family::SPlus1, r, cell)?;
            let eq = ElementDef::new(Family::S0, r, cell)?;
            let m = &sys.primary;
            let l2 = broken_error(mesh, &ev, m, u, Deriv::Value, &at(&exact.u.0), k)?;
            let curl = broken_error(mesh, &ev, m, u, Deriv::Curl, &at(&exact.curl.0), k)?;
            let h1 = broken_error(mesh, &ev, m, u, Deriv::GradCurl, &at(&exact.grad_curl), k)?;
            let ph = broken_error(mesh, &eq, &sys.multiplier, p, Deriv::Value, &zeros(1), k)?;
            ErrorRecord {
                h: mesh.h(),
                dofs: sys.size(),
                err_l2: l2,
                err_curl: Some(curl),
                err_h1_broken: h1,
                err_triple: (l2 * l2 + curl * curl + cfg.diffusion * h1 * h1).sqrt(),
                err_p: ph,
                constraint: ph,
                load_norm: 0.0,
                rel_residual: 0.0,
                iterations: 0,
                seconds: 0.0,
            }
        }
        Problem::Brinkman => {
            let ev = ElementDef::new(Family::SPlus2, r, cell)?;
            let ep = ElementDef::new(Family::S3, r, cell)?;
            let m = &sys.primary;
            let l2 = broken_error(mesh, &ev, m, u, Deriv::Value, &at(&exact.u.0), k)?;
            let h1 = broken_error(mesh, &ev, m, u, Deriv::Grad, &at(&exact.grad), k)?;
            let div = broken_error(mesh, &ev, m, u, Deriv::Div, &at(std::slice::from_ref(&exact.div)), k)?;
            let divh = broken_error(mesh, &ev, m, u, Deriv::Div, &zeros(1), k)?;
            let perr = broken_error(mesh, &ep, &sys.multiplier, p, Deriv::Value, &at(std::slice::from_ref(&exact.p)), k)?;
            let big_m = cfg.diffusion.max(cfg.reaction);
            ErrorRecord {
                h: mesh.h(),
                dofs: sys.size(),
                err_l2: l2,
                err_curl: None,
                err_h1_broken: h1,
                err_triple: (cfg.diffusion * h1 * h1 + cfg.reaction * l2 * l2 + big_m * div * div).sqrt(),
                err_p: perr,
                constraint: divh,
                load_norm: 0.0,
                rel_residual: 0.0,
                iterations: 0,
                seconds: 0.0,
            }
        }
    };
    Ok(rec)
}

/// `‖v‖_{L²(Ω)}` by tensor Gauss quadrature of degree `deg` on every cell.
pub fn l2_norm(mesh: &Mesh, v: &SopVec, deg: usize) -> f64 {
    mesh.cells()
        .map(|c| gauss_tensor(&mesh.cell_box(c), deg).integrate(|x| v.eval(x).iter().map(|a| a * a).sum()))
        .sum::<f64>()
        .sqrt()
}

fn run(cfg: &RunConfig, exact: &ExactSolution, mut log: impl FnMut(&ErrorRecord)) -> Result<Vec<ErrorRecord>> {
    cfg.validate()?;
    let bad = max_boundary_value(&exact.u, 16);
    anyhow::ensure!(bad < 1e-12, "exact velocity does not vanish on the boundary (max {bad:e})");
    let mut out = Vec::new();
    for level in 1..=cfg.levels {
        let start = Instant::now();
        let mesh = unit_cube_mesh(1 << level);
        let load = exact.load();
        let sys = match cfg.problem {
            Problem::QuadCurl => {
                let params = QuadCurlParams {
                    mu: cfg.diffusion,
                    gamma: cfg.reaction,
                };
                assemble_quadcurl(&mesh, cfg.order, params, &load)
            }
            Problem::Brinkman => {
                let params = BrinkmanParams {
                    nu: cfg.diffusion,
                    alpha: cfg.reaction,
                };
                assemble_brinkman(&mesh, cfg.order, params, &load, None)
            }
        }
        .with_context(|| format!("assembling level {level}"))?;
        let rep = solve(&sys, cfg.tol).with_context(|| format!("solving level {level} ({} unknowns)", sys.size()))?;
        let mut rec = compute_errors(cfg, &mesh, &sys, &rep.x, exact)?;
        rec.load_norm = l2_norm(&mesh, &exact.f, 2 * cfg.order + 12 + ERROR_OVERSAMPLING);
        rec.rel_residual = rep.rel_residual;
        rec.iterations = rep.iterations;
        rec.seconds = start.elapsed().as_secs_f64();
        log(&rec);
        out.push(rec);
    }
    Ok(out)
}

/// The `−curl Δ curl` example with `μ = cfg.diffusion`, `γ = cfg.reaction`.
pub fn run_quadcurl(cfg: &RunConfig, log: impl FnMut(&ErrorRecord)) -> Result<Vec<ErrorRecord>> {
    anyhow::ensure!(cfg.problem == Problem::QuadCurl, "configuration is for {}", cfg.problem.name());
    run(cfg, &example1(cfg.diffusion, cfg.reaction), log)
}

/// The Brinkman example with `ν = cfg.diffusion`, `α = cfg.reaction`.
pub fn run_brinkman(cfg: &RunConfig, log: impl FnMut(&ErrorRecord)) -> Result<Vec<ErrorRecord>> {
    anyhow::ensure!(cfg.problem == Problem::Brinkman, "configuration is for {}", cfg.problem.name());
    run(cfg, &example2(cfg.diffusion, cfg.reaction), log)
}

/// Which manufactured velocity to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    /// The `−curl Δ curl` field (trigonometric).
    One,
    /// The Brinkman field (polynomial).
    Two,
}

/// `L²` interpolation error of the canonical interpolant of `family` per
/// level, applied to the velocity of `example`.
pub fn run_interp(family: Family, r: usize, levels: usize, example: Example) -> Result<Vec<(f64, f64)>> {
    let exact = match example {
        Example::One => example1(1.0, 1.0),
        Example::Two => example2(1.0, 1.0),
    };
    let field = exact.velocity();
    let mut out = Vec::new();
    for level in 1..=levels {
        let mesh = unit_cube_mesh(1 << level);
        let el = ElementDef::new(family, r, mesh.cell_box(0))?;
        let deg = el.quad_degree + ERROR_OVERSAMPLING;
        let mut total = 0.0;
        for c in mesh.cells() {
            let cell = mesh.cell_box(c);
            let ih: PolyVec = el.combine_on(&el.interpolate(&field, &cell)?, &cell);
            total += gauss_tensor(&cell, deg).integrate(|x| {
                let a = exact.u.eval(x);
                let b = ih.eval(x);
                (0..3).map(|i| (a[i] - b[i]).powi(2)).sum()
            });
        }
        out.push((mesh.h(), total.sqrt()));
    }
    Ok(out)
}

pub const CSV_HEADER: [&str; 12] = [
    "h",
    "dofs",
    "err_l2",
    "err_curl",
    "err_h1_broken",
    "err_triple",
    "err_p",
    "eoc_l2",
    "eoc_curl",
    "eoc_h1_broken",
    "eoc_triple",
    "eoc_p",
];

fn column(records: &[ErrorRecord], f: impl Fn(&ErrorRecord) -> Option<f64>) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
    let vals: Vec<Option<f64>> = records.iter().map(f).collect();
    let orders = if vals.iter().all(Option::is_some) {
        let v: Vec<f64> = vals.iter().map(|v| v.unwrap()).collect();
        std::iter::once(None).chain(eoc(&v)).collect()
    } else {
        vec![None; vals.len()]
    };
    (vals, orders)
}

/// Error columns and their orders, in [`CSV_HEADER`] order.
pub fn table(records: &[ErrorRecord]) -> Vec<Vec<String>> {
    let cols = [
        column(records, |r| Some(r.err_l2)),
        column(records, |r| r.err_curl),
        column(records, |r| Some(r.err_h1_broken)),
        column(records, |r| Some(r.err_triple)),
        column(records, |r| Some(r.err_p)),
    ];
    let fmt = |v: Option<f64>, prec: usize| v.map(|v| format!("{v:.prec$e}")).unwrap_or_default();
    let fmt_eoc = |v: Option<f64>| v.map(|v| format!("{v:.3}")).unwrap_or_default();
    records
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut row = vec![format!("{}", r.h), r.dofs.to_string()];
            row.extend(cols.iter().map(|c| fmt(c.0[k], 6)));
            row.extend(cols.iter().map(|c| fmt_eoc(c.1[k])));
            row
        })
        .collect()
}

pub fn write_csv(path: &Path, records: &[ErrorRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(CSV_HEADER)?;
    for row in table(records) {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
