//! Local and global assembly of the bilinear and linear forms of the
//! `−curl Δ curl` scheme and the Brinkman scheme.
//!
//! Meshes are uniform, so one [`ElementDef`] serves every cell and local
//! matrices are computed once and scattered. Polynomial integrands are
//! integrated exactly: the Gauss rule is chosen from the largest
//! per-variable exponent of the nodal functions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linsolve::{SparseMatrix, TripletBuilder};
use crate::mesh::{global_dofs, Bc, GlobalDofMap, Mesh};
use crate::quadrature::gauss_tensor;
use crate::refelem::{Deriv, ElementDef};
use crate::spaces::Family;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// `(u, v)`
    Mass,
    /// `(curl u, curl v)`
    CurlMass,
    /// `Σ_K (grad curl u, grad curl v)_K`
    GradCurlStiffness,
    /// `Σ_K (grad u, grad v)_K`
    GradStiffness,
    /// `(div u, div v)`
    DivDiv,
    /// `(v, grad q)`: test `v` vector valued, trial `q` scalar.
    B1VGradQ,
    /// `(div v, q)`: test `v` vector valued, trial `q` scalar.
    B2DivVQ,
}

impl FormKind {
    /// Derivatives applied to the (test, trial) functions.
    fn derivs(&self) -> (Deriv, Deriv) {
        match self {
            FormKind::Mass => (Deriv::Value, Deriv::Value),
            FormKind::CurlMass => (Deriv::Curl, Deriv::Curl),
            FormKind::GradCurlStiffness => (Deriv::GradCurl, Deriv::GradCurl),
            FormKind::GradStiffness => (Deriv::Grad, Deriv::Grad),
            FormKind::DivDiv => (Deriv::Div, Deriv::Div),
            FormKind::B1VGradQ => (Deriv::Value, Deriv::Grad),
            FormKind::B2DivVQ => (Deriv::Div, Deriv::Value),
        }
    }
}

/// A form with its scalar coefficient (`μ`, `γ`, `ν`, `α`, ...).
#[derive(Clone, Copy, Debug)]
pub struct FormSpec {
    pub kind: FormKind,
    pub coeff: f64,
}

impl FormSpec {
    pub fn new(kind: FormKind, coeff: f64) -> Self {
        FormSpec { kind, coeff }
    }
}

/// Entry `(i, j)` is `coeff · form(φ_j, ψ_i)` for trial functions `φ` and
/// test functions `ψ`, integrated exactly over `cell`.
pub fn local_matrix(form: &FormSpec, trial: &ElementDef, test: &ElementDef) -> Result<DMatrix<f64>> {
    let (dt, dr) = form.kind.derivs();
    let wt = dt.width(test.ncomp());
    let wr = dr.width(trial.ncomp());
    if wt != wr {
        return Err(Error::Dimension(format!(
            "{:?}: test {} and trial {} derivatives have widths {wt} and {wr}",
            form.kind, test.family, trial.family
        )));
    }
    let same = (0..3).all(|i| (trial.cell.half[i] - test.cell.half[i]).abs() <= 1e-12 * test.cell.half[i]);
    if !same {
        return Err(Error::Dimension("trial and test elements live on different cells".into()));
    }
    let degree = trial.max_exponent() + test.max_exponent();
    let cell = test.cell;
    let q = gauss_tensor(&cell, degree);
    let refpts: Vec<[f64; 3]> = q.points.iter().map(|x| cell.to_local(*x)).collect();
    let tt = test.tabulate(dt, &refpts);
    let mut tr = trial.tabulate(dr, &refpts);
    for (p, w) in q.weights.iter().enumerate() {
        for c in 0..wr {
            tr.row_mut(p * wr + c).scale_mut(w * form.coeff);
        }
    }
    Ok(tt.transpose() * tr)
}

/// Sum of several forms on one element pair.
pub fn local_sum(forms: &[FormSpec], trial: &ElementDef, test: &ElementDef) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(test.dim(), trial.dim());
    for f in forms {
        m += local_matrix(f, trial, test)?;
    }
    Ok(m)
}

fn check_map(el: &ElementDef, map: &GlobalDofMap, mesh: &Mesh) -> Result<()> {
    if map.family != el.family || map.order != el.order || map.cell_dofs.len() != mesh.num_cells() {
        return Err(Error::Dimension(format!(
            "DOF map for {} (r = {}) does not match element {} (r = {}) on this mesh",
            map.family, map.order, el.family, el.order
        )));
    }
    Ok(())
}

/// Scatter-adds a local matrix into a `test.ndofs × trial.ndofs` global
/// matrix, without boundary treatment.
pub fn assemble(
    forms: &[FormSpec],
    mesh: &Mesh,
    trial: (&ElementDef, &GlobalDofMap),
    test: (&ElementDef, &GlobalDofMap),
) -> Result<SparseMatrix> {
    check_map(trial.0, trial.1, mesh)?;
    check_map(test.0, test.1, mesh)?;
    let local = local_sum(forms, trial.0, test.0)?;
    let mut t = TripletBuilder::new(test.1.ndofs, trial.1.ndofs);
    for c in mesh.cells() {
        let (ri, rs) = (&test.1.cell_dofs[c], &test.1.signs[c]);
        let (ci, cs) = (&trial.1.cell_dofs[c], &trial.1.signs[c]);
        for (i, (&gi, si)) in ri.iter().zip(rs).enumerate() {
            for (j, (&gj, sj)) in ci.iter().zip(cs).enumerate() {
                let v = local[(i, j)];
                if v != 0.0 {
                    t.add(gi, gj, si * sj * v);
                }
            }
        }
    }
    Ok(t.build())
}

/// Extra quadrature degree for non-polynomial data.
pub const LOAD_OVERSAMPLING: usize = 4;

/// `∫_Ω f · ψ_i` for every global basis function `ψ_i`.
pub fn assemble_load(f: &dyn Field, el: &ElementDef, map: &GlobalDofMap, mesh: &Mesh) -> Result<Vec<f64>> {
    check_map(el, map, mesh)?;
    if f.ncomp() != el.ncomp() {
        return Err(Error::Dimension(format!("load with {} components for {}", f.ncomp(), el.family)));
    }
    let degree = el.quad_degree.max(el.max_exponent()) + LOAD_OVERSAMPLING;
    let q0 = gauss_tensor(&el.cell, degree);
    let refpts: Vec<[f64; 3]> = q0.points.iter().map(|x| el.cell.to_local(*x)).collect();
    let tab = el.tabulate(Deriv::Value, &refpts);
    let nc = el.ncomp();
    let mut out = vec![0.0; map.ndofs];
    let mut fv = nalgebra::DVector::zeros(refpts.len() * nc);
    for c in mesh.cells() {
        let cell = mesh.cell_box(c);
        for (p, xi) in refpts.iter().enumerate() {
            let v = f.value(cell.to_global(*xi));
            for k in 0..nc {
                fv[p * nc + k] = q0.weights[p] * v[k];
            }
        }
        let local = tab.tr_mul(&fv);
        for (i, (&g, s)) in map.cell_dofs[c].iter().zip(&map.signs[c]).enumerate() {
            out[g] += s * local[i];
        }
    }
    Ok(out)
}

/// `∫_Ω φ_i` for a scalar space: the row of the mean-value functional.
pub fn assemble_integrals(el: &ElementDef, map: &GlobalDofMap, mesh: &Mesh) -> Result<Vec<f64>> {
    let one = crate::field::FnField::scalar(|_| 1.0);
    assemble_load(&one, el, map, mesh)
}

/// Symmetric elimination of constrained unknowns: their rows and columns
/// are zeroed, the diagonal set to one and the right-hand side to zero.
pub fn eliminate(a: &SparseMatrix, rhs: &mut [f64], constrained: &[bool]) -> SparseMatrix {
    let mut t = TripletBuilder::new(a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        if constrained[i] {
            t.set(i, i, 1.0);
            rhs[i] = 0.0;
            continue;
        }
        for (j, v) in a.row(i) {
            if !constrained[j] {
                t.add(i, j, v);
            }
        }
    }
    t.build()
}

/// A saddle-point system ready for [`crate::linsolve::solve_sym_indef`].
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    /// Primary block (trial = test), before boundary elimination.
    pub a: SparseMatrix,
    /// Mixed block, rows in the primary space and columns in the
    /// multiplier space, before elimination.
    pub b: SparseMatrix,
    /// Mean-value row of the multiplier space, if constrained.
    pub constraint: Option<Vec<f64>>,
    /// The full eliminated system.
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub primary: GlobalDofMap,
    pub multiplier: GlobalDofMap,
}

impl AssembledSystem {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Splits a solution into primary and multiplier coefficients.
    pub fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        let n = self.primary.ndofs;
        (&x[..n], &x[n..n + self.multiplier.ndofs])
    }
}

fn combine_blocks(
    a: &SparseMatrix,
    b: &SparseMatrix,
    b_sign: f64,
    constraint: Option<&[f64]>,
) -> SparseMatrix {
    let (n, m) = (a.nrows(), b.ncols());
    let extra = usize::from(constraint.is_some());
    let mut t = TripletBuilder::new(n + m + extra, n + m + extra);
    for i in 0..n {
        for (j, v) in a.row(i) {
            t.add(i, j, v);
        }
        for (j, v) in b.row(i) {
            t.add(i, n + j, b_sign * v);
            t.add(n + j, i, b_sign * v);
        }
    }
    if let Some(c) = constraint {
        for (j, &v) in c.iter().enumerate() {
            if v != 0.0 {
                t.add(n + j, n + m, v);
                t.add(n + m, n + j, v);
            }
        }
    }
    t.build()
}

/// Parameters of the `−curl Δ curl` scheme.
#[derive(Clone, Copy, Debug)]
pub struct QuadCurlParams {
    pub mu: f64,
    pub gamma: f64,
}

/// The scheme for `μ curl Δ curl u... `: find `u_h ∈ S̊⁺¹`, `p_h ∈ S̊⁰` with
///
/// ```text
/// a₁(u_h, v) + (v, grad p_h) = (f, v)
/// (u_h, grad q)              = 0
/// ```
///
/// where `a₁ = μ Σ_K (grad curl·, grad curl·)_K + (curl·, curl·) + γ(·,·)`.
pub fn assemble_quadcurl(mesh: &Mesh, r: usize, params: QuadCurlParams, f: &dyn Field) -> Result<AssembledSystem> {
    if params.mu <= 0.0 || params.gamma < 0.0 {
        return Err(Error::Dimension(format!("need μ > 0 and γ ≥ 0, got {params:?}")));
    }
    let cell = mesh.cell_box(0);
    let ev = ElementDef::new(Family::SPlus1, r, cell)?;
    let eq = ElementDef::new(Family::S0, r, cell)?;
    let mv = global_dofs(mesh, Family::SPlus1, r, Bc::Homogeneous)?;
    let mq = global_dofs(mesh, Family::S0, r, Bc::Homogeneous)?;
    let forms = [
        FormSpec::new(FormKind::GradCurlStiffness, params.mu),
        FormSpec::new(FormKind::CurlMass, 1.0),
        FormSpec::new(FormKind::Mass, params.gamma),
    ];
    let a = assemble(&forms, mesh, (&ev, &mv), (&ev, &mv))?;
    let b = assemble(&[FormSpec::new(FormKind::B1VGradQ, 1.0)], mesh, (&eq, &mq), (&ev, &mv))?;
    let load = assemble_load(f, &ev, &mv, mesh)?;
    let full = combine_blocks(&a, &b, 1.0, None);
    let mut rhs = load;
    rhs.resize(full.nrows(), 0.0);
    let constrained: Vec<bool> = mv.constrained.iter().chain(&mq.constrained).copied().collect();
    let matrix = eliminate(&full, &mut rhs, &constrained);
    Ok(AssembledSystem {
        a,
        b,
        constraint: None,
        matrix,
        rhs,
        primary: mv,
        multiplier: mq,
    })
}

/// Parameters of the Brinkman scheme.
#[derive(Clone, Copy, Debug)]
pub struct BrinkmanParams {
    pub nu: f64,
    pub alpha: f64,
}

/// The Brinkman scheme: find `u_h ∈ S̊⁺²`, `p_h ∈ S³` with `∫ p_h = 0` and
///
/// ```text
/// ν Σ_K (grad u_h, grad v)_K + α(u_h, v) − (div v, p_h) = (f, v)
/// −(div u_h, q)                                        = −(g, q)
/// ```
///
/// The mean-value constraint enters as one Lagrange multiplier, the last
/// unknown.
pub fn assemble_brinkman(
    mesh: &Mesh,
    r: usize,
    params: BrinkmanParams,
    f: &dyn Field,
    g: Option<&dyn Field>,
) -> Result<AssembledSystem> {
    if params.nu <= 0.0 || params.alpha < 0.0 {
        return Err(Error::Dimension(format!("need ν > 0 and α ≥ 0, got {params:?}")));
    }
    let cell = mesh.cell_box(0);
    let ev = ElementDef::new(Family::SPlus2, r, cell)?;
    let ep = ElementDef::new(Family::S3, r, cell)?;
    let mv = global_dofs(mesh, Family::SPlus2, r, Bc::Homogeneous)?;
    let mp = global_dofs(mesh, Family::S3, r, Bc::Homogeneous)?;
    let forms = [
        FormSpec::new(FormKind::GradStiffness, params.nu),
        FormSpec::new(FormKind::Mass, params.alpha),
    ];
    let a = assemble(&forms, mesh, (&ev, &mv), (&ev, &mv))?;
    let b = assemble(&[FormSpec::new(FormKind::B2DivVQ, 1.0)], mesh, (&ep, &mp), (&ev, &mv))?;
    let mean = assemble_integrals(&ep, &mp, mesh)?;
    let full = combine_blocks(&a, &b, -1.0, Some(&mean));
    let mut rhs = assemble_load(f, &ev, &mv, mesh)?;
    match g {
        Some(g) => rhs.extend(assemble_load(g, &ep, &mp, mesh)?.iter().map(|v| -v)),
        None => rhs.resize(mv.ndofs + mp.ndofs, 0.0),
    }
    rhs.push(0.0);
    let mut constrained: Vec<bool> = mv.constrained.iter().chain(&mp.constrained).copied().collect();
    constrained.push(false);
    let matrix = eliminate(&full, &mut rhs, &constrained);
    Ok(AssembledSystem {
        a,
        b,
        constraint: Some(mean),
        matrix,
        rhs,
        primary: mv,
        multiplier: mp,
    })
}

/// Local coefficients of cell `c` from a global vector, signs applied.
pub fn cell_coefficients(map: &GlobalDofMap, x: &[f64], c: usize) -> Vec<f64> {
    map.cell_dofs[c].iter().zip(&map.signs[c]).map(|(&g, s)| s * x[g]).collect()
}

/// Broken `L²` norm `(Σ_K ‖D u_h − exact‖²_K)^{1/2}` of the error in the
/// derivative `d` of a discrete function. `exact(x)` returns the values in
/// the layout of [`ElementDef::tabulate`] at one point, e.g. `∂ᵢu_k` at
/// index `3i + k` for [`Deriv::Grad`]. `extra` raises the quadrature degree
/// above the element's default.
pub fn broken_error(
    mesh: &Mesh,
    el: &ElementDef,
    map: &GlobalDofMap,
    x: &[f64],
    d: Deriv,
    exact: &dyn Fn([f64; 3]) -> Vec<f64>,
    extra: usize,
) -> Result<f64> {
    check_map(el, map, mesh)?;
    let w = d.width(el.ncomp());
    let q0 = gauss_tensor(&el.cell, el.quad_degree.max(el.max_exponent()) + extra);
    let refpts: Vec<[f64; 3]> = q0.points.iter().map(|x| el.cell.to_local(*x)).collect();
    let tab = el.tabulate(d, &refpts);
    let mut total = 0.0;
    for c in mesh.cells() {
        let cell = mesh.cell_box(c);
        let coeffs = nalgebra::DVector::from_vec(cell_coefficients(map, x, c));
        let vals = &tab * coeffs;
        for (p, xi) in refpts.iter().enumerate() {
            let e = exact(cell.to_global(*xi));
            debug_assert_eq!(e.len(), w);
            let s: f64 = (0..w).map(|k| (vals[p * w + k] - e[k]).powi(2)).sum();
            total += q0.weights[p] * s;
        }
    }
    Ok(total.sqrt())
}
