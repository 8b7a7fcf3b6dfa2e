//! Numerical audits of the discrete complexes: operator matrices, exactness
//! by rank computations, and commuting interpolation identities.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::{CurlOf, Field};
use crate::linsolve::dense::{null_space, numerical_rank, orthonormal_column_basis};
use crate::linsolve::{SparseMatrix, TripletBuilder};
use crate::mesh::{global_dofs, Bc, GlobalDofMap, Mesh};
use crate::poly::PolyVec;
use crate::quadrature::gauss_tensor;
use crate::refelem::ElementDef;
use crate::spaces::Family;

/// Relative tolerance of all rank decisions.
pub const RANK_TOL: f64 = 1e-8;
/// Largest admissible residual `‖dφ − Π dφ‖` when checking that a
/// derivative of a source basis function lies in the target space.
pub const INCLUSION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffOperator {
    Grad,
    Curl,
    Div,
}

impl DiffOperator {
    pub fn name(&self) -> &'static str {
        match self {
            DiffOperator::Grad => "grad",
            DiffOperator::Curl => "curl",
            DiffOperator::Div => "div",
        }
    }

    fn apply(&self, p: &PolyVec) -> PolyVec {
        match self {
            DiffOperator::Grad => p.grad(),
            DiffOperator::Curl => p.curl(),
            DiffOperator::Div => p.div(),
        }
    }
}

/// Matrix of `op` on one cell: column `j` holds the target DOFs of
/// `op φ_j`. Fails if some `op φ_j` leaves the target space.
pub fn local_operator_matrix(op: DiffOperator, src: &ElementDef, tgt: &ElementDef) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(tgt.dim(), src.dim());
    let mut worst: f64 = 0.0;
    for (j, phi) in src.nodal.iter().enumerate() {
        let d = op.apply(phi).with_cell(tgt.cell);
        if d.ncomp() != tgt.ncomp() {
            return Err(Error::Dimension(format!("{} of {} is not a {} field", op.name(), src.family, tgt.family)));
        }
        let c = tgt.dofs_of_poly(&d);
        let mut back = tgt.combine(&c);
        back.axpy(-1.0, &d);
        let scale = d.max_abs_coeff().max(1.0);
        worst = worst.max(back.max_abs_coeff() / scale);
        for (i, v) in c.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    if worst > INCLUSION_TOL {
        return Err(Error::ComplexStructure { residual: worst });
    }
    Ok(m)
}

/// Global matrix of `op` from the source space to the target space, all
/// DOFs included. Contributions of neighbouring cells to a shared entry
/// must agree; a disagreement means the operator does not map globally
/// conforming functions to globally conforming ones.
pub fn operator_matrix(
    op: DiffOperator,
    mesh: &Mesh,
    src: (&ElementDef, &GlobalDofMap),
    tgt: (&ElementDef, &GlobalDofMap),
) -> Result<SparseMatrix> {
    let local = local_operator_matrix(op, src.0, tgt.0)?;
    let cut = 1e-13 * local.amax().max(1.0);
    let mut t = TripletBuilder::new(tgt.1.ndofs, src.1.ndofs);
    let mut worst: f64 = 0.0;
    for c in mesh.cells() {
        for (i, (&gi, si)) in tgt.1.cell_dofs[c].iter().zip(&tgt.1.signs[c]).enumerate() {
            for (j, (&gj, sj)) in src.1.cell_dofs[c].iter().zip(&src.1.signs[c]).enumerate() {
                let v = si * sj * local[(i, j)];
                match t.get(gi, gj) {
                    Some(old) => worst = worst.max((old - v).abs()),
                    None if v.abs() > cut => t.set(gi, gj, v),
                    None => {}
                }
            }
        }
    }
    if worst > INCLUSION_TOL * local.amax().max(1.0) {
        return Err(Error::ComplexStructure { residual: worst });
    }
    Ok(t.build())
}

/// Which sequence of spaces to audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Complex {
    /// `S⁰ → S⁺¹ → S⁺² → S³`
    Nonconforming,
    /// `S⁰ → S¹ → S² → S³`
    Conforming,
}

impl Complex {
    pub fn families(&self) -> [Family; 4] {
        match self {
            Complex::Nonconforming => [Family::S0, Family::SPlus1, Family::SPlus2, Family::S3],
            Complex::Conforming => [Family::S0, Family::S1, Family::S2, Family::S3],
        }
    }
}

/// One space of the complex.
#[derive(Clone, Debug)]
pub struct SlotRecord {
    pub space: &'static str,
    pub dim: usize,
    /// Rank of the outgoing operator (0 for the last slot).
    pub rank: usize,
    /// Dimension of the kernel of the outgoing operator.
    pub kernel: usize,
    /// Rank of the incoming operator (0 for the first slot).
    pub image: usize,
    pub verdict: bool,
}

#[derive(Clone, Debug)]
pub struct ExactnessReport {
    pub complex: Complex,
    pub order: usize,
    pub divisions: [usize; 3],
    pub bc: Bc,
    pub slots: Vec<SlotRecord>,
    /// `max |D_{k+1} D_k|`, relative to `max|D_{k+1}| · max|D_k|`.
    pub composition: [f64; 2],
    /// `Σ (−1)^k dim_k`.
    pub alternating_sum: i64,
    pub euler: i64,
    /// Smallest spectral gap at the rank cutoffs, in units of the
    /// tolerance.
    pub min_gap: f64,
}

impl ExactnessReport {
    pub fn passed(&self) -> bool {
        let sum_ok = self.alternating_sum == if self.bc == Bc::None { 1 } else { 0 };
        self.slots.iter().all(|s| s.verdict)
            && self.composition.iter().all(|&c| c <= 1e-10)
            && sum_ok
            && self.euler == 1
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let [a, b, c] = self.divisions;
        let _ = writeln!(
            s,
            "{:?} complex, r = {}, {a}x{b}x{c} mesh, bc = {:?}",
            self.complex, self.order, self.bc
        );
        let _ = writeln!(s, "{:<6} {:>6} {:>6} {:>7} {:>6}  verdict", "slot", "dim", "rank", "kernel", "image");
        for r in &self.slots {
            let _ = writeln!(
                s,
                "{:<6} {:>6} {:>6} {:>7} {:>6}  {}",
                r.space,
                r.dim,
                r.rank,
                r.kernel,
                r.image,
                if r.verdict { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            s,
            "composition {:.1e} {:.1e}, alternating sum {}, V-E+F-C = {}, min gap {:.1e}",
            self.composition[0], self.composition[1], self.alternating_sum, self.euler, self.min_gap
        );
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("slot,dim,rank,kernel,image,verdict\n");
        for r in &self.slots {
            let _ = writeln!(s, "{},{},{},{},{},{}", r.space, r.dim, r.rank, r.kernel, r.image, r.verdict);
        }
        s
    }
}

fn dense_free(m: &SparseMatrix, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    m.select(rows, cols).to_dense()
}

fn rel_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let p = a * b;
    let s = a.amax() * b.amax();
    if s == 0.0 {
        0.0
    } else {
        p.amax() / s
    }
}

/// Audits exactness of a complex on `mesh`: `ker grad` is the constants
/// (trivial with boundary conditions), `ker curl = grad(·)`,
/// `ker div = curl(·)`, and `div` is onto `S³` (onto the mean-zero
/// subspace with boundary conditions).
pub fn check_exactness(mesh: &Mesh, r: usize, bc: Bc, complex: Complex) -> Result<ExactnessReport> {
    let cell = mesh.cell_box(0);
    let fams = complex.families();
    let els: Vec<ElementDef> = fams.iter().map(|&f| ElementDef::new(f, r, cell)).collect::<Result<_>>()?;
    let maps: Vec<GlobalDofMap> = fams.iter().map(|&f| global_dofs(mesh, f, r, bc)).collect::<Result<_>>()?;
    let free: Vec<Vec<usize>> = maps.iter().map(|m| m.free_dofs()).collect();
    let ops = [DiffOperator::Grad, DiffOperator::Curl, DiffOperator::Div];
    let mut d = Vec::new();
    for k in 0..3 {
        let g = operator_matrix(ops[k], mesh, (&els[k], &maps[k]), (&els[k + 1], &maps[k + 1]))?;
        d.push(dense_free(&g, &free[k + 1], &free[k]));
    }
    let mut min_gap = f64::INFINITY;
    let mut rank_of = |m: &DMatrix<f64>| {
        let info = numerical_rank(m, RANK_TOL);
        if info.rank > 0 && info.rank < m.nrows().min(m.ncols()) {
            min_gap = min_gap.min(info.margin(RANK_TOL));
        }
        info.rank
    };
    let ranks: Vec<usize> = d.iter().map(&mut rank_of).collect();
    let dims: Vec<usize> = maps.iter().map(|m| m.effective_dim()).collect();
    let mut slots = Vec::new();
    for k in 0..4 {
        let rank = if k < 3 { ranks[k] } else { 0 };
        let image = if k > 0 { ranks[k - 1] } else { 0 };
        let kernel = dims[k] - rank;
        let verdict = match k {
            0 => kernel == usize::from(bc == Bc::None),
            3 => image == dims[3],
            _ => {
                // ker D_k against im D_{k−1}, compared through orthonormal bases.
                let n = null_space(&d[k], RANK_TOL);
                let n = n.columns(0, kernel.min(n.ncols())).into_owned();
                let im = orthonormal_column_basis(&d[k - 1], RANK_TOL);
                let both = DMatrix::from_fn(n.nrows(), n.ncols() + im.ncols(), |i, j| {
                    if j < n.ncols() {
                        n[(i, j)]
                    } else {
                        im[(i, j - n.ncols())]
                    }
                });
                let joint = rank_of(&both);
                kernel == image && joint == kernel && im.ncols() == image
            }
        };
        slots.push(SlotRecord {
            space: fams[k].name(),
            dim: dims[k],
            rank,
            kernel,
            image,
            verdict,
        });
    }
    let alternating_sum = dims
        .iter()
        .enumerate()
        .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum();
    Ok(ExactnessReport {
        complex,
        order: r,
        divisions: mesh.n,
        bc,
        composition: [rel_product(&d[1], &d[0]), rel_product(&d[2], &d[1])],
        slots,
        alternating_sum,
        euler: mesh.euler_characteristic(),
        min_gap,
    })
}

/// Maximal relative residuals of the commuting identities over all
/// samples.
#[derive(Clone, Copy, Debug, Default)]
pub struct CommutingReport {
    /// `‖div Π²v − π³ div v‖ / ‖v‖_{H(div)}`
    pub div: f64,
    /// `‖Π²curl u − curl Π¹u‖ / ‖u‖_{H(curl)}`
    pub curl: f64,
    /// `‖Π¹u − π¹u − Π^V(u − π¹u)‖ / ‖u‖_{H(curl)}`
    pub pi1: f64,
    /// `‖Π² v − π² v − Π^U(v − π² v)‖ / ‖v‖`
    pub pi2: f64,
    /// `‖Π^U curl w − curl Π^V w‖ / ‖w‖_{H(curl)}`
    pub bubble: f64,
}

impl CommutingReport {
    pub fn max(&self) -> f64 {
        [self.div, self.curl, self.pi1, self.pi2, self.bubble].into_iter().fold(0.0, f64::max)
    }
}

/// `f − p` with the curl when both provide one.
struct Minus<'a> {
    f: &'a dyn Field,
    p: &'a PolyVec,
    curl: PolyVec,
}

impl<'a> Minus<'a> {
    fn new(f: &'a dyn Field, p: &'a PolyVec) -> Self {
        Minus { f, p, curl: p.curl() }
    }
}

impl Field for Minus<'_> {
    fn ncomp(&self) -> usize {
        3
    }

    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        let a = self.f.value(x);
        let b = self.p.eval(x);
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    fn curl(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        let a = self.f.curl(x)?;
        let b = self.curl.eval(x);
        Some([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
    }
}

struct DivOf<'a>(&'a dyn Field);

impl Field for DivOf<'_> {
    fn ncomp(&self) -> usize {
        1
    }

    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        [self.0.div(x).unwrap_or(f64::NAN), 0.0, 0.0]
    }
}

/// `∫_K |f|²` for a field given by a closure.
fn norm_sq(cell: &crate::poly::Box3, degree: usize, f: impl Fn([f64; 3]) -> [f64; 3]) -> f64 {
    gauss_tensor(cell, degree).integrate(|x| {
        let v = f(x);
        v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
    })
}

fn poly_norm_sq(p: &PolyVec) -> f64 {
    norm_sq(p.cell(), 2 * p.max_exponent() as usize + 1, |x| p.eval(x))
}

struct Elements {
    plus1: ElementDef,
    s1: ElementDef,
    v: ElementDef,
    plus2: ElementDef,
    s2: ElementDef,
    u: ElementDef,
    s3: ElementDef,
}

/// Checks the commuting identities cell by cell on every sample. Samples
/// must provide `curl` and `div`.
pub fn check_commuting(mesh: &Mesh, r: usize, samples: &[&dyn Field]) -> Result<CommutingReport> {
    let cell0 = mesh.cell_box(0);
    let e = Elements {
        plus1: ElementDef::new(Family::SPlus1, r, cell0)?,
        s1: ElementDef::new(Family::S1, r, cell0)?,
        v: ElementDef::new(Family::VBubble, r, cell0)?,
        plus2: ElementDef::new(Family::SPlus2, r, cell0)?,
        s2: ElementDef::new(Family::S2, r, cell0)?,
        u: ElementDef::new(Family::UBubble, r, cell0)?,
        s3: ElementDef::new(Family::S3, r, cell0)?,
    };
    let deg = e.plus1.quad_degree + 6;
    let mut rep = CommutingReport::default();
    for &f in samples {
        let mut acc = [0.0; 5];
        let (mut curl_norm, mut div_norm, mut val_norm) = (0.0, 0.0, 0.0);
        for c in mesh.cells() {
            let cell = mesh.cell_box(c);
            let curl = |x| f.curl(x).ok_or(Error::MissingDerivative("curl"));
            curl(cell.center)?;
            f.div(cell.center).ok_or(Error::MissingDerivative("div"))?;
            val_norm += norm_sq(&cell, deg, |x| f.value(x));
            curl_norm += norm_sq(&cell, deg, |x| f.curl(x).unwrap());
            div_norm += norm_sq(&cell, deg, |x| [f.div(x).unwrap(), 0.0, 0.0]);
            let interp = |el: &ElementDef, g: &dyn Field| -> Result<PolyVec> {
                Ok(el.combine_on(&el.interpolate(g, &cell)?, &cell))
            };

            // div Π² v = π³ div v
            let div_f = DivOf(f);
            let lhs = interp(&e.plus2, f)?.div();
            let mut d = interp(&e.s3, &div_f)?;
            d.axpy(-1.0, &lhs);
            acc[0] += poly_norm_sq(&d);

            // Π² curl u = curl Π¹ u
            let cf = CurlOf(f);
            let mut d = interp(&e.plus2, &cf)?;
            d.axpy(-1.0, &interp(&e.plus1, f)?.curl());
            acc[1] += poly_norm_sq(&d);

            // Π¹ = π¹ + Π^V (I − π¹)
            let p1 = interp(&e.s1, f)?;
            let rest = Minus::new(f, &p1);
            let mut d = interp(&e.plus1, f)?;
            d.axpy(-1.0, &p1);
            d.axpy(-1.0, &interp(&e.v, &rest)?);
            acc[2] += poly_norm_sq(&d);

            // Π² = π² + Π^U (I − π²)
            let p2 = interp(&e.s2, f)?;
            let rest = Minus::new(f, &p2);
            let mut d = interp(&e.plus2, f)?;
            d.axpy(-1.0, &p2);
            d.axpy(-1.0, &interp(&e.u, &rest)?);
            acc[3] += poly_norm_sq(&d);

            // Π^U curl w = curl Π^V w
            let mut d = interp(&e.u, &cf)?;
            d.axpy(-1.0, &interp(&e.v, f)?.curl());
            acc[4] += poly_norm_sq(&d);
        }
        let hcurl = (val_norm + curl_norm).sqrt().max(f64::MIN_POSITIVE);
        let hdiv = (val_norm + div_norm).sqrt().max(f64::MIN_POSITIVE);
        let l2 = val_norm.sqrt().max(f64::MIN_POSITIVE);
        rep.div = rep.div.max(acc[0].sqrt() / hdiv);
        rep.curl = rep.curl.max(acc[1].sqrt() / hcurl);
        rep.pi1 = rep.pi1.max(acc[2].sqrt() / hcurl);
        rep.pi2 = rep.pi2.max(acc[3].sqrt() / l2);
        rep.bubble = rep.bubble.max(acc[4].sqrt() / hcurl);
    }
    Ok(rep)
}
