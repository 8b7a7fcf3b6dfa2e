//! Degrees of freedom, Vandermonde matrices, nodal bases and local
//! interpolation.
//!
//! Every moment is normalized by the measure of its entity, so an edge
//! moment reads `(1/|e|) ∫_e u·τ q ds` and the single `S3` moment of order 2
//! is the cell average. Moment weights are Legendre polynomials in the
//! scaled coordinates of the entity. On a face `f` with axis `a` the normal
//! is `n_f = +e_a`; tangential weights are expressed in the frame of
//! [`LocalFace::frame`].

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linsolve::dense::{dense_inverse, numerical_rank, RankInfo};
use crate::poly::{homogeneous_monomials, Box3, MonoIndex, Poly, PolyVec};
use crate::quadrature::{gauss_legendre, points_for_degree};
use crate::spaces::{build_space, reduce_to_basis, Family, SpaceBasis, SPAN_TOL};
use crate::topology::{cross, LocalEdge, LocalFace, LocalVertex};

/// Relative rank tolerance of the unisolvence check.
pub const UNISOLVENCE_TOL: f64 = 1e-8;

/// Where a degree of freedom lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entity {
    Vertex(LocalVertex),
    Edge(LocalEdge),
    Face(LocalFace),
    Interior,
}

impl Entity {
    pub fn dim(&self) -> usize {
        match self {
            Entity::Vertex(_) => 0,
            Entity::Edge(_) => 1,
            Entity::Face(_) => 2,
            Entity::Interior => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DofKind {
    /// `u(v)`.
    VertexValue,
    /// `∫_e u q`.
    EdgeMoment,
    /// `∫_e u·τ_e q`.
    EdgeTangentMoment,
    /// `∫_f u q`.
    FaceMoment,
    /// `∫_f (u × n_f)·q`.
    FaceTangentialMoment,
    /// `∫_f (curl u × n_f)·q`.
    FaceCurlTangentialMoment,
    /// `∫_f u·n_f q`.
    FaceNormalMoment,
    /// `∫_K u·q` (scalar or vector).
    VolumeMoment,
}

/// One degree of freedom: kind, entity and test polynomial. The weight is a
/// polynomial on the cell whose restriction to the entity is the test
/// function.
#[derive(Clone, Debug)]
pub struct DofSpec {
    pub kind: DofKind,
    pub entity: Entity,
    pub weight: PolyVec,
    /// Orientation sign; `+1` for every entity under the mesh convention.
    pub sign: f64,
}

/// One quadrature sample of a DOF: `dof(u) += coef · u(ξ)` (or `curl u`).
#[derive(Clone, Copy, Debug)]
struct Sample {
    xi: [f64; 3],
    coef: [f64; 3],
}

#[derive(Clone, Debug)]
struct DofPlan {
    samples: Vec<Sample>,
    uses_curl: bool,
}

impl DofSpec {
    pub fn uses_curl(&self) -> bool {
        self.kind == DofKind::FaceCurlTangentialMoment
    }

    /// Normalized quadrature samples on the reference entity.
    fn plan(&self, degree: usize) -> DofPlan {
        let (pts, wts) = entity_rule(self.entity, degree);
        let samples = pts
            .into_iter()
            .zip(wts)
            .map(|(xi, w)| {
                let q = self.weight.eval_ref(xi);
                let coef = match self.kind {
                    DofKind::VertexValue | DofKind::EdgeMoment | DofKind::FaceMoment => [w * q[0], 0.0, 0.0],
                    DofKind::VolumeMoment if self.weight.ncomp() == 1 => [w * q[0], 0.0, 0.0],
                    DofKind::VolumeMoment => q.map(|c| w * c),
                    DofKind::EdgeTangentMoment => match self.entity {
                        Entity::Edge(e) => e.tangent().map(|t| w * q[0] * t),
                        _ => unreachable!("edge DOF on a non-edge"),
                    },
                    DofKind::FaceNormalMoment => match self.entity {
                        Entity::Face(f) => f.normal().map(|n| w * q[0] * n),
                        _ => unreachable!("face DOF on a non-face"),
                    },
                    DofKind::FaceTangentialMoment | DofKind::FaceCurlTangentialMoment => match self.entity {
                        // (u × n)·q = u·(n × q)
                        Entity::Face(f) => cross(f.normal(), q).map(|c| w * c),
                        _ => unreachable!("face DOF on a non-face"),
                    },
                };
                Sample {
                    xi,
                    coef: coef.map(|c| c * self.sign),
                }
            })
            .collect();
        DofPlan {
            samples,
            uses_curl: self.uses_curl(),
        }
    }
}

/// Gauss rule on a reference entity with weights summing to one.
fn entity_rule(entity: Entity, degree: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let n = points_for_degree(degree);
    let (x, w) = gauss_legendre(n);
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    match entity {
        Entity::Vertex(v) => {
            pts.push(v.ref_coords());
            wts.push(1.0);
        }
        Entity::Edge(e) => {
            for i in 0..n {
                let mut xi = e.ref_offset();
                xi[e.axis] = x[i];
                pts.push(xi);
                wts.push(0.5 * w[i]);
            }
        }
        Entity::Face(f) => {
            let [a, b] = f.tangent_axes();
            for j in 0..n {
                for i in 0..n {
                    let mut xi = [0.0; 3];
                    xi[f.axis] = f.side_sign();
                    xi[a] = x[i];
                    xi[b] = x[j];
                    pts.push(xi);
                    wts.push(0.25 * w[i] * w[j]);
                }
            }
        }
        Entity::Interior => {
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        pts.push([x[i], x[j], x[k]]);
                        wts.push(0.125 * w[i] * w[j] * w[k]);
                    }
                }
            }
        }
    }
    (pts, wts)
}

/// Products of Legendre polynomials in the given axes with total degree at
/// most `k`, graded by degree.
fn legendre_products(axes: &[usize], k: i64) -> Vec<Poly> {
    let mut out = Vec::new();
    if k < 0 {
        return out;
    }
    for d in 0..=k as usize {
        match axes {
            [a] => out.push(Poly::legendre(d, *a)),
            [a, b] => {
                for i in (0..=d).rev() {
                    out.push(&Poly::legendre(i, *a) * &Poly::legendre(d - i, *b));
                }
            }
            [a, b, c] => {
                for i in (0..=d).rev() {
                    for j in (0..=d - i).rev() {
                        let p = &Poly::legendre(i, *a) * &Poly::legendre(j, *b);
                        out.push(&p * &Poly::legendre(d - i - j, *c));
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    out
}

fn scalar_dofs(kind: DofKind, entity: Entity, weights: Vec<Poly>, cell: Box3) -> Vec<DofSpec> {
    weights
        .into_iter()
        .map(|q| DofSpec {
            kind,
            entity,
            weight: PolyVec::scalar(q, cell),
            sign: 1.0,
        })
        .collect()
}

fn vector_dofs(kind: DofKind, entity: Entity, weights: Vec<PolyVec>) -> Vec<DofSpec> {
    weights
        .into_iter()
        .map(|q| DofSpec {
            kind,
            entity,
            weight: q,
            sign: 1.0,
        })
        .collect()
}

fn along(dir: [f64; 3], p: &Poly, cell: Box3) -> PolyVec {
    PolyVec::vector(dir.map(|d| p.scale(d)), cell)
}

/// `[P_k(f)]²` in the tangential frame of `f`.
fn face_tangential_weights(f: LocalFace, k: i64, cell: Box3) -> Vec<PolyVec> {
    let scalars = legendre_products(&f.tangent_axes(), k);
    let mut out = Vec::new();
    for t in f.frame() {
        for q in &scalars {
            out.push(along(t, q, cell));
        }
    }
    out
}

/// `grad_f P̃_k(f)`: physical surface gradients of homogeneous monomials of
/// degree `k` in the face coordinates.
fn face_gradient_weights(f: LocalFace, k: i64, cell: Box3) -> Vec<PolyVec> {
    homogeneous_monomials(k)
        .into_iter()
        .filter(|m| m.0[f.axis] == 0)
        .map(|m| PolyVec::scalar(Poly::monomial(m, 1.0), cell).grad())
        .collect()
}

fn volume_vector_weights(k: i64, cell: Box3) -> Vec<PolyVec> {
    let scalars = legendre_products(&[0, 1, 2], k);
    let mut out = Vec::new();
    for axis in 0..3 {
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        for q in &scalars {
            out.push(along(e, q, cell));
        }
    }
    out
}

/// `[P_{r−5}]³ ⊕ curl [P̃_{r−3}]³`.
fn s1_interior_weights(r: usize, cell: Box3) -> Vec<PolyVec> {
    let mut out = volume_vector_weights(r as i64 - 5, cell);
    let mut curls = Vec::new();
    for m in homogeneous_monomials(r as i64 - 3) {
        for axis in 0..3 {
            let mut comps = [Poly::zero(), Poly::zero(), Poly::zero()];
            comps[axis] = Poly::monomial(m, 1.0);
            let c = PolyVec::vector(comps, cell).curl();
            if !c.is_zero() {
                curls.push(c);
            }
        }
    }
    out.extend(reduce_to_basis(&curls, SPAN_TOL));
    out
}

/// The ordered DOF list of `family` with order `r` on `cell`, grouped
/// entity by entity: vertices, edges, faces, interior.
pub fn dof_table(family: Family, r: usize, cell: Box3) -> Result<Vec<DofSpec>> {
    family.check_order(r)?;
    let ri = r as i64;
    let mut dofs = Vec::new();
    if family == Family::S0 {
        for v in LocalVertex::all() {
            dofs.extend(scalar_dofs(
                DofKind::VertexValue,
                Entity::Vertex(v),
                vec![Poly::constant(1.0)],
                cell,
            ));
        }
    }
    for e in LocalEdge::all() {
        let ent = Entity::Edge(e);
        match family {
            Family::S0 => dofs.extend(scalar_dofs(
                DofKind::EdgeMoment,
                ent,
                legendre_products(&[e.axis], ri - 2),
                cell,
            )),
            Family::S1 | Family::SPlus1 => dofs.extend(scalar_dofs(
                DofKind::EdgeTangentMoment,
                ent,
                legendre_products(&[e.axis], ri - 1),
                cell,
            )),
            _ => {}
        }
    }
    for f in LocalFace::all() {
        let ent = Entity::Face(f);
        match family {
            Family::S0 => dofs.extend(scalar_dofs(
                DofKind::FaceMoment,
                ent,
                legendre_products(&f.tangent_axes(), ri - 4),
                cell,
            )),
            Family::S1 | Family::SPlus1 => {
                let mut w = face_tangential_weights(f, ri - 3, cell);
                w.extend(face_gradient_weights(f, ri - 1, cell));
                dofs.extend(vector_dofs(DofKind::FaceTangentialMoment, ent, w));
                if family == Family::SPlus1 {
                    dofs.extend(vector_dofs(
                        DofKind::FaceCurlTangentialMoment,
                        ent,
                        face_tangential_weights(f, ri - 2, cell),
                    ));
                }
            }
            Family::S2 => dofs.extend(scalar_dofs(
                DofKind::FaceNormalMoment,
                ent,
                legendre_products(&f.tangent_axes(), ri - 1),
                cell,
            )),
            Family::SPlus2 => {
                dofs.extend(vector_dofs(
                    DofKind::FaceTangentialMoment,
                    ent,
                    face_tangential_weights(f, ri - 2, cell),
                ));
                dofs.extend(scalar_dofs(
                    DofKind::FaceNormalMoment,
                    ent,
                    legendre_products(&f.tangent_axes(), ri - 1),
                    cell,
                ));
            }
            Family::VBubble => dofs.extend(vector_dofs(
                DofKind::FaceCurlTangentialMoment,
                ent,
                face_tangential_weights(f, ri - 2, cell),
            )),
            Family::UBubble => dofs.extend(vector_dofs(
                DofKind::FaceTangentialMoment,
                ent,
                face_tangential_weights(f, ri - 2, cell),
            )),
            Family::S3 => {}
        }
    }
    let interior = Entity::Interior;
    match family {
        Family::S0 => dofs.extend(scalar_dofs(
            DofKind::VolumeMoment,
            interior,
            legendre_products(&[0, 1, 2], ri - 6),
            cell,
        )),
        Family::S1 | Family::SPlus1 => {
            dofs.extend(vector_dofs(DofKind::VolumeMoment, interior, s1_interior_weights(r, cell)))
        }
        Family::S2 | Family::SPlus2 => dofs.extend(vector_dofs(
            DofKind::VolumeMoment,
            interior,
            volume_vector_weights(ri - 3, cell),
        )),
        Family::S3 => dofs.extend(scalar_dofs(
            DofKind::VolumeMoment,
            interior,
            legendre_products(&[0, 1, 2], ri - 2),
            cell,
        )),
        Family::VBubble | Family::UBubble => {}
    }
    Ok(dofs)
}

/// Default per-axis quadrature degree for polynomial integrands.
pub fn default_quad_degree(r: usize) -> usize {
    2 * r + 12
}

fn apply_plan(plan: &DofPlan, p: &PolyVec, curl: Option<&PolyVec>) -> f64 {
    let src = if plan.uses_curl {
        curl.expect("curl required by DOF")
    } else {
        p
    };
    plan.samples
        .iter()
        .map(|s| {
            let v = src.eval_ref(s.xi);
            s.coef[0] * v[0] + s.coef[1] * v[1] + s.coef[2] * v[2]
        })
        .sum()
}

/// `V_ij = dof_i(basis_j)`.
pub fn vandermonde(space: &SpaceBasis, dofs: &[DofSpec], degree: usize) -> DMatrix<f64> {
    let plans: Vec<DofPlan> = dofs.iter().map(|d| d.plan(degree)).collect();
    vandermonde_from_plans(&space.basis, &plans)
}

fn vandermonde_from_plans(basis: &[PolyVec], plans: &[DofPlan]) -> DMatrix<f64> {
    let need_curl = plans.iter().any(|p| p.uses_curl);
    let mut v = DMatrix::zeros(plans.len(), basis.len());
    for (j, b) in basis.iter().enumerate() {
        let c = need_curl.then(|| b.curl());
        for (i, plan) in plans.iter().enumerate() {
            v[(i, j)] = apply_plan(plan, b, c.as_ref());
        }
    }
    v
}

/// A finite element: shape functions, DOFs and the dual (nodal) basis.
///
/// The definition is tied to the half-widths of `cell` but not to its
/// position: the same element serves every translate of the cell.
#[derive(Clone, Debug)]
pub struct ElementDef {
    pub family: Family,
    pub order: usize,
    pub cell: Box3,
    pub space: SpaceBasis,
    pub dofs: Vec<DofSpec>,
    plans: Vec<DofPlan>,
    /// `dof_i(nodal_j) = δ_ij`.
    pub nodal: Vec<PolyVec>,
    /// Rank decision of the Vandermonde matrix.
    pub vandermonde_rank: RankInfo,
    pub quad_degree: usize,
}

impl ElementDef {
    pub fn new(family: Family, r: usize, cell: Box3) -> Result<Self> {
        let space = build_space(family, r, cell)?;
        let dofs = dof_table(family, r, cell)?;
        ElementDef::from_parts(space, dofs)
    }

    /// Element from an explicit space and DOF list, e.g. a space paired with
    /// a subset of another family's DOFs.
    pub fn from_parts(space: SpaceBasis, dofs: Vec<DofSpec>) -> Result<Self> {
        let family = space.family;
        let r = space.order;
        if dofs.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "{family} (r = {r}): {} DOFs for a space of dimension {}",
                dofs.len(),
                space.dim()
            )));
        }
        let quad_degree = default_quad_degree(r);
        let plans: Vec<DofPlan> = dofs.iter().map(|d| d.plan(quad_degree)).collect();
        let v = vandermonde_from_plans(&space.basis, &plans);
        let rank = numerical_rank(&v, UNISOLVENCE_TOL);
        if rank.rank < dofs.len() {
            return Err(Error::Unisolvence {
                family: family.name(),
                order: r,
                rank: rank.rank,
                size: dofs.len(),
            });
        }
        let vinv = dense_inverse(&v)?;
        let nodal = (0..space.dim())
            .map(|j| {
                let c: Vec<f64> = vinv.column(j).iter().copied().collect();
                PolyVec::lincomb(&c, &space.basis)
            })
            .collect();
        Ok(ElementDef {
            family,
            order: r,
            cell: space.cell,
            space,
            dofs,
            plans,
            nodal,
            vandermonde_rank: rank,
            quad_degree,
        })
    }

    pub fn dim(&self) -> usize {
        self.nodal.len()
    }

    pub fn ncomp(&self) -> usize {
        self.family.ncomp()
    }

    /// Largest per-variable exponent among the nodal functions.
    pub fn max_exponent(&self) -> usize {
        self.nodal.iter().map(|p| p.max_exponent() as usize).max().unwrap_or(0)
    }

    fn check_cell(&self, cell: &Box3) {
        let same = (0..3).all(|i| (cell.half[i] - self.cell.half[i]).abs() <= 1e-12 * self.cell.half[i]);
        assert!(same, "element built for half-widths {:?}, used on {:?}", self.cell.half, cell.half);
    }

    /// All DOFs applied to a polynomial given in the scaled coordinates of
    /// the element cell.
    pub fn dofs_of_poly(&self, p: &PolyVec) -> Vec<f64> {
        let curl = self.plans.iter().any(|pl| pl.uses_curl).then(|| p.curl());
        self.plans.iter().map(|pl| apply_plan(pl, p, curl.as_ref())).collect()
    }

    /// All DOFs applied to a field on the translate `cell`: the coefficients
    /// of the canonical interpolant.
    pub fn interpolate(&self, f: &dyn Field, cell: &Box3) -> Result<Vec<f64>> {
        self.check_cell(cell);
        let mut out = Vec::with_capacity(self.plans.len());
        for plan in &self.plans {
            let mut acc = 0.0;
            for s in &plan.samples {
                let x = cell.to_global(s.xi);
                let v = if plan.uses_curl {
                    f.curl(x).ok_or(Error::MissingDerivative("curl"))?
                } else {
                    f.value(x)
                };
                acc += s.coef[0] * v[0] + s.coef[1] * v[1] + s.coef[2] * v[2];
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// `Σ c_j φ_j` on the element cell.
    pub fn combine(&self, coeffs: &[f64]) -> PolyVec {
        PolyVec::lincomb(coeffs, &self.nodal)
    }

    /// `Σ c_j φ_j` on the translate `cell`.
    pub fn combine_on(&self, coeffs: &[f64], cell: &Box3) -> PolyVec {
        self.check_cell(cell);
        self.combine(coeffs).with_cell(*cell)
    }

    /// Indices of the DOFs attached to `entity`, in order.
    pub fn dofs_on(&self, entity: Entity) -> Vec<usize> {
        (0..self.dofs.len()).filter(|&i| self.dofs[i].entity == entity).collect()
    }

    /// Values of a derivative of every nodal function at reference points.
    /// Row `p · w + c` holds component `c` at point `p`, where `w` is the
    /// width of the derivative; column `j` belongs to nodal function `j`.
    pub fn tabulate(&self, d: Deriv, points: &[[f64; 3]]) -> DMatrix<f64> {
        let width = d.width(self.ncomp());
        let mut t = DMatrix::zeros(points.len() * width, self.dim());
        for (j, phi) in self.nodal.iter().enumerate() {
            let parts = derive(phi, d);
            for (p, xi) in points.iter().enumerate() {
                let mut c = 0;
                for part in &parts {
                    let v = part.eval_ref(*xi);
                    for vk in &v[..part.ncomp()] {
                        t[(p * width + c, j)] = *vk;
                        c += 1;
                    }
                }
            }
        }
        t
    }
}

/// Derivatives tabulated by [`ElementDef::tabulate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Deriv {
    Value,
    /// All first partials, `∂ᵢu_k` stored with `i` outer.
    Grad,
    Curl,
    /// All first partials of `curl u`.
    GradCurl,
    Div,
}

impl Deriv {
    pub fn width(&self, ncomp: usize) -> usize {
        match self {
            Deriv::Value => ncomp,
            Deriv::Grad => 3 * ncomp,
            Deriv::Curl => 3,
            Deriv::GradCurl => 9,
            Deriv::Div => 1,
        }
    }
}

/// The pieces of `d p`, whose components concatenated give the tabulated
/// row block.
pub fn derive(p: &PolyVec, d: Deriv) -> Vec<PolyVec> {
    match d {
        Deriv::Value => vec![p.clone()],
        Deriv::Grad => p.jacobian().to_vec(),
        Deriv::Curl => vec![p.curl()],
        Deriv::GradCurl => p.curl().jacobian().to_vec(),
        Deriv::Div => vec![p.div()],
    }
}

/// The conforming subsets of DOFs: `(1), (2), (4)` of `S⁺¹` for `S1` and
/// `(5), (7)` of `S⁺²` for `S2`. These coincide with the `S1`/`S2` tables.
pub fn conforming_dofs(family: Family, r: usize, cell: Box3) -> Result<Vec<DofSpec>> {
    match family {
        Family::SPlus1 => dof_table(Family::S1, r, cell),
        Family::SPlus2 => dof_table(Family::S2, r, cell),
        _ => dof_table(family, r, cell),
    }
}

/// Monomials used by the oracle tests and the book.
pub fn monomial_field(e: [u32; 3], axis: usize, cell: Box3) -> PolyVec {
    let mut comps = [Poly::zero(), Poly::zero(), Poly::zero()];
    comps[axis] = Poly::monomial(MonoIndex(e), 1.0);
    PolyVec::vector(comps, cell)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dof_counts_at_lowest_order() {
        let c = Box3::reference();
        let count = |f: Family, k: DofKind| dof_table(f, 2, c).unwrap().iter().filter(|d| d.kind == k).count();
        assert_eq!(count(Family::SPlus1, DofKind::EdgeTangentMoment), 24);
        assert_eq!(count(Family::SPlus1, DofKind::FaceTangentialMoment), 12);
        assert_eq!(count(Family::SPlus1, DofKind::FaceCurlTangentialMoment), 12);
        assert_eq!(count(Family::SPlus2, DofKind::FaceNormalMoment), 18);
        assert_eq!(count(Family::SPlus2, DofKind::FaceTangentialMoment), 12);
        assert_eq!(count(Family::S0, DofKind::VertexValue), 8);
        assert_eq!(count(Family::S0, DofKind::EdgeMoment), 12);
        assert_eq!(dof_table(Family::S3, 2, c).unwrap().len(), 1);
    }

    #[test]
    fn entity_rules_are_normalized() {
        for e in [
            Entity::Edge(LocalEdge::from_index(5)),
            Entity::Face(LocalFace::from_index(3)),
            Entity::Interior,
        ] {
            let (_, w) = entity_rule(e, 7);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn s3_lowest_order_nodal_function_is_one() {
        let el = ElementDef::new(Family::S3, 2, Box3::new([0.0; 3], [0.25; 3])).unwrap();
        assert_eq!(el.dim(), 1);
        assert!((el.nodal[0].eval_ref([0.3, 0.1, -0.5])[0] - 1.0).abs() < 1e-14);
    }
}
