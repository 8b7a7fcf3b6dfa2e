//! Shape-function spaces on a box and the bubble spaces used to enrich them.
//!
//! Every space is first generated on the reference cube, where `ξ = x`, and
//! then carried to a physical box `K` with half-widths `h = (h₁, h₂, h₃)`.
//! Writing `D = diag(h)`, the maps are
//!
//! | family        | physical field                 |
//! |---------------|--------------------------------|
//! | `S0`, `S3`    | `û(ξ)`                         |
//! | `S1`          | `D⁻¹ û(ξ)` (covariant)         |
//! | `S2`          | `D û(ξ)` (contravariant, up to the constant `det D`) |
//! | `V`           | `û(ξ)`                         |
//! | `U`           | `curl` of the physical `V`     |
//!
//! so that `grad S0 ⊂ S1`, `curl S1 ⊂ S2` and `div S2 = P_{r−2}` hold on every
//! box, not only on the reference cube.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linsolve::dense::{null_space, numerical_rank, orthonormal_column_basis};
use crate::poly::{
    coefficient_table, homogeneous_monomials, monomials_up_to, superlinear_degree, Box3, MonoIndex, Poly,
    PolyVec,
};
use crate::quadrature::gauss_tensor;
use crate::topology::LocalFace;

/// Relative tolerance of the sum-to-basis reduction.
pub const SPAN_TOL: f64 = 1e-10;

/// Element families. `SPlus1`/`SPlus2` are the enriched nonconforming
/// spaces, `VBubble`/`UBubble` their enrichments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    S0,
    S1,
    S2,
    S3,
    SPlus1,
    SPlus2,
    VBubble,
    UBubble,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::S0,
        Family::S1,
        Family::S2,
        Family::S3,
        Family::SPlus1,
        Family::SPlus2,
        Family::VBubble,
        Family::UBubble,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::S0 => "S0",
            Family::S1 => "S1",
            Family::S2 => "S2",
            Family::S3 => "S3",
            Family::SPlus1 => "S+1",
            Family::SPlus2 => "S+2",
            Family::VBubble => "V",
            Family::UBubble => "U",
        }
    }

    pub fn ncomp(&self) -> usize {
        match self {
            Family::S0 | Family::S3 => 1,
            _ => 3,
        }
    }

    pub fn min_order(&self) -> usize {
        match self {
            Family::S0 => 1,
            _ => 2,
        }
    }

    /// Largest order the constructors are validated for.
    pub const MAX_ORDER: usize = 4;

    pub fn check_order(&self, r: usize) -> Result<()> {
        if r < self.min_order() || r > Family::MAX_ORDER {
            Err(Error::UnsupportedOrder {
                family: self.name(),
                order: r,
            })
        } else {
            Ok(())
        }
    }

    /// Closed-form dimension of the local space.
    pub fn dimension(&self, r: usize) -> usize {
        let ri = r as i64;
        let d = match self {
            Family::S0 => match r {
                1 => 8,
                2 => 20,
                _ => (ri + 1) * (ri * ri + 5 * ri + 24) / 6,
            },
            Family::S1 => match r {
                2 => 36,
                _ => (ri * ri * ri + 5 * ri * ri + 18 * ri + 6) / 2,
            },
            Family::S2 => ri * (ri * ri + 3 * ri + 8) / 2,
            Family::S3 => ri * (ri * ri - 1) / 6,
            Family::VBubble | Family::UBubble => 6 * ri * (ri - 1),
            Family::SPlus1 => Family::S1.dimension(r) as i64 + 6 * ri * (ri - 1),
            Family::SPlus2 => Family::S2.dimension(r) as i64 + 6 * ri * (ri - 1),
        };
        d as usize
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered basis of one of the local spaces.
#[derive(Clone, Debug)]
pub struct SpaceBasis {
    pub family: Family,
    pub order: usize,
    pub cell: Box3,
    pub basis: Vec<PolyVec>,
}

impl SpaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ncomp(&self) -> usize {
        self.family.ncomp()
    }

    /// Numerical rank of the coefficient matrix of the basis.
    pub fn rank(&self) -> usize {
        numerical_rank(&coefficient_table(&self.basis).0, 1e-10).rank
    }

    /// Whether `p` lies in the span, measured by the rank of the stacked
    /// coefficient matrix.
    pub fn contains(&self, p: &PolyVec) -> bool {
        span_contains(&self.basis, std::slice::from_ref(p))
    }
}

/// Whether every element of `items` lies in the span of `basis`.
pub fn span_contains(basis: &[PolyVec], items: &[PolyVec]) -> bool {
    let mut all = basis.to_vec();
    all.extend_from_slice(items);
    let (m, _) = coefficient_table(&all);
    let (b, _) = coefficient_table(basis);
    if basis.is_empty() {
        return items.iter().all(|p| p.max_abs_coeff() <= 1e-12);
    }
    numerical_rank(&m, 1e-9).rank == numerical_rank(&b, 1e-9).rank
}

/// Builds the shape-function space of `family` with order `r` on `cell`.
pub fn build_space(family: Family, r: usize, cell: Box3) -> Result<SpaceBasis> {
    family.check_order(r)?;
    let reference = Box3::reference();
    let basis = match family {
        Family::S0 => serendipity(r, reference),
        Family::S3 => monomials_up_to(r as i64 - 2)
            .into_iter()
            .map(|m| PolyVec::scalar(Poly::monomial(m, 1.0), reference))
            .collect(),
        Family::S1 => reduce(&s1_generators(r), family, r)?,
        Family::S2 => reduce(&s2_generators(r), family, r)?,
        Family::VBubble => return Ok(build_bubbles(r, cell)?.0),
        Family::UBubble => return Ok(build_bubbles(r, cell)?.1),
        Family::SPlus1 => {
            let mut b = build_space(Family::S1, r, cell)?.basis;
            b.extend(build_bubbles(r, cell)?.0.basis);
            return finish(family, r, cell, b);
        }
        Family::SPlus2 => {
            let mut b = build_space(Family::S2, r, cell)?.basis;
            b.extend(build_bubbles(r, cell)?.1.basis);
            return finish(family, r, cell, b);
        }
    };
    let h = cell.half;
    let mapped: Vec<PolyVec> = basis
        .into_iter()
        .map(|p| {
            let p = p.with_cell(cell);
            match family {
                Family::S1 => p.scale_components([1.0 / h[0], 1.0 / h[1], 1.0 / h[2]]),
                Family::S2 => p.scale_components(h),
                _ => p,
            }
        })
        .collect();
    finish(family, r, cell, mapped)
}

fn finish(family: Family, r: usize, cell: Box3, basis: Vec<PolyVec>) -> Result<SpaceBasis> {
    let expected = family.dimension(r);
    if basis.len() != expected {
        return Err(Error::Dimension(format!(
            "{family} (r = {r}) has {} basis functions, expected {expected}",
            basis.len()
        )));
    }
    Ok(SpaceBasis {
        family,
        order: r,
        cell,
        basis,
    })
}

/// Monomials of superlinear degree at most `r`.
pub fn serendipity_monomials(r: usize) -> Vec<MonoIndex> {
    let mut out = Vec::new();
    let r = r as u32;
    for d in 0..=3 * r {
        for m in homogeneous_monomials(d as i64) {
            if superlinear_degree(m) <= r {
                out.push(m);
            }
        }
    }
    out
}

fn serendipity(r: usize, cell: Box3) -> Vec<PolyVec> {
    serendipity_monomials(r)
        .into_iter()
        .map(|m| PolyVec::scalar(Poly::monomial(m, 1.0), cell))
        .collect()
}

fn mono(m: MonoIndex) -> Poly {
    Poly::monomial(m, 1.0)
}

fn xyz(i: usize, j: usize) -> Poly {
    &Poly::var(i) * &Poly::var(j)
}

/// The twist fields `(x₂x₃(w₂−w₃), x₁x₃(w₃−w₁), x₁x₂(w₁−w₂))`, one per
/// choice of a single nonzero `wᵢ` among the homogeneous monomials of degree
/// `r − 1` that do not involve `xᵢ`.
pub fn twist_generators(r: usize, cell: Box3) -> Vec<PolyVec> {
    let mut out = Vec::new();
    for i in 0..3 {
        for m in homogeneous_monomials(r as i64 - 1) {
            if m.0[i] != 0 {
                continue;
            }
            let w = mono(m);
            let mut comps = [Poly::zero(), Poly::zero(), Poly::zero()];
            // Component k carries x_a x_b (w_{k+1} − w_{k+2}) with (a, b) the
            // other two axes; only w_i is nonzero.
            let next = (i + 1) % 3;
            let prev = (i + 2) % 3;
            // w_i appears with + in component prev and with − in component next.
            comps[prev] = &xyz(i.min(next), i.max(next)) * &w;
            comps[next] = -&(&xyz(i.min(prev), i.max(prev)) * &w);
            out.push(PolyVec::vector(comps, cell));
        }
    }
    out
}

fn s1_generators(r: usize) -> Vec<PolyVec> {
    let cell = Box3::reference();
    let mut gens: Vec<PolyVec> = serendipity(r, cell).iter().map(|p| p.grad()).collect();
    let x = PolyVec::vector([Poly::var(0), Poly::var(1), Poly::var(2)], cell);
    for m in monomials_up_to(r as i64 - 1) {
        for k in 0..3 {
            let mut comps = [Poly::zero(), Poly::zero(), Poly::zero()];
            comps[k] = mono(m);
            gens.push(cross(&PolyVec::vector(comps, cell), &x));
        }
    }
    gens.extend(twist_generators(r, cell));
    gens
}

fn s2_generators(r: usize) -> Vec<PolyVec> {
    let cell = Box3::reference();
    let mut gens = Vec::new();
    for m in monomials_up_to(r as i64 - 1) {
        for k in 0..3 {
            let mut comps = [Poly::zero(), Poly::zero(), Poly::zero()];
            comps[k] = mono(m);
            gens.push(PolyVec::vector(comps, cell));
        }
    }
    gens.extend(twist_generators(r, cell).iter().map(PolyVec::curl));
    gens
}

fn cross(a: &PolyVec, b: &PolyVec) -> PolyVec {
    let (a, b) = (a.comps(), b.comps());
    let c = |i: usize, j: usize| &(&a[i] * &b[j]) - &(&a[j] * &b[i]);
    PolyVec::vector([c(1, 2), c(2, 0), c(0, 1)], Box3::reference())
}

/// Orthonormal (in coefficient space) basis of the span of `items`.
pub fn reduce_to_basis(items: &[PolyVec], rel_tol: f64) -> Vec<PolyVec> {
    if items.is_empty() {
        return Vec::new();
    }
    let ncomp = items[0].ncomp();
    let cell = *items[0].cell();
    let (m, keys) = coefficient_table(items);
    let q = orthonormal_column_basis(&m.transpose(), rel_tol);
    (0..q.ncols())
        .map(|j| {
            let col: Vec<f64> = q.column(j).iter().copied().collect();
            PolyVec::from_coefficients(&keys, &col, ncomp, cell).pruned(1e-15)
        })
        .collect()
}

fn reduce(items: &[PolyVec], family: Family, r: usize) -> Result<Vec<PolyVec>> {
    let basis = reduce_to_basis(items, SPAN_TOL);
    if basis.len() != family.dimension(r) {
        return Err(Error::Dimension(format!(
            "{family} (r = {r}): spanning set has rank {}, expected {}",
            basis.len(),
            family.dimension(r)
        )));
    }
    Ok(basis)
}

impl PolyVec {
    /// Drops coefficients below `tol` in every component.
    pub fn pruned(&self, tol: f64) -> PolyVec {
        PolyVec::from_comps(self.comps().iter().map(|p| p.pruned(tol)).collect(), *self.cell())
    }
}

/// `Π(1 − ξᵢ²)`: the cell bubble in scaled coordinates. It equals
/// `B_K / (h₁h₂h₃)²`.
pub fn cell_bubble() -> Poly {
    let mut b = Poly::constant(1.0);
    for i in 0..3 {
        let mut f = Poly::constant(1.0);
        f.add_term(MonoIndex([0, 1, 2].map(|k| if k == i { 2 } else { 0 })), -1.0);
        b = &b * &f;
    }
    b
}

/// `(1 + sξ_a) Π_{i≠a}(1 − ξᵢ²)` for the face `ξ_a = s`; proportional to
/// `B_f = B_K / λ_f`.
pub fn face_bubble(face: LocalFace) -> Poly {
    let mut b = Poly::constant(1.0);
    b.add_term(MonoIndex::var(face.axis), face.side_sign());
    for i in face.tangent_axes() {
        let mut f = Poly::constant(1.0);
        f.add_term(MonoIndex([0, 1, 2].map(|k| if k == i { 2 } else { 0 })), -1.0);
        b = &b * &f;
    }
    b
}

/// Tangential vector fields with components in `P_k` along the two
/// tangential axes of `face`.
fn tangential_fields(face: LocalFace, k: i64, cell: Box3) -> Vec<PolyVec> {
    let mut out = Vec::new();
    for axis in face.tangent_axes() {
        for m in monomials_up_to(k) {
            let mut comps = [Poly::zero(), Poly::zero(), Poly::zero()];
            comps[axis] = mono(m);
            out.push(PolyVec::vector(comps, cell));
        }
    }
    out
}

/// The per-face factors `V_f^{r−2}` of the bubble space.
#[derive(Clone, Debug)]
pub struct FaceBubbles {
    pub face: LocalFace,
    /// Basis of `V_f` (tangential fields, reference coordinates).
    pub q: Vec<PolyVec>,
}

/// Computes `V_f^{r−2}(K)` for the six faces as null spaces of the moment
/// matrices `∫ B_K B_f w·q`.
pub fn face_bubble_factors(r: usize) -> Result<Vec<FaceBubbles>> {
    Family::VBubble.check_order(r)?;
    let reference = Box3::reference();
    let quad = gauss_tensor(&reference, 2 * r + 12);
    let bk = cell_bubble();
    let mut out = Vec::new();
    for face in LocalFace::all() {
        let q = tangential_fields(face, r as i64 - 2, reference);
        let w = tangential_fields(face, r as i64 - 3, reference);
        let weight = &bk * &face_bubble(face);
        let mut g = DMatrix::zeros(w.len(), q.len());
        for (a, wa) in w.iter().enumerate() {
            for (b, qb) in q.iter().enumerate() {
                g[(a, b)] = quad.integrate(|x| {
                    let wv = wa.eval_ref(x);
                    let qv = qb.eval_ref(x);
                    weight.eval_ref(x) * (wv[0] * qv[0] + wv[1] * qv[1] + wv[2] * qv[2])
                });
            }
        }
        let ns = null_space(&g, SPAN_TOL);
        if ns.ncols() != r * (r - 1) {
            return Err(Error::Degenerate(format!(
                "face {face:?}: null space of dimension {} instead of {}",
                ns.ncols(),
                r * (r - 1)
            )));
        }
        let fields = (0..ns.ncols())
            .map(|j| {
                let c: Vec<f64> = ns.column(j).iter().copied().collect();
                PolyVec::lincomb(&c, &q).pruned(1e-15)
            })
            .collect();
        out.push(FaceBubbles { face, q: fields });
    }
    Ok(out)
}

/// The bubble spaces `V^{r−2}(K) = B_K Σ_f B_f V_f` and `U = curl V`, with
/// basis functions ordered face by face.
pub fn build_bubbles(r: usize, cell: Box3) -> Result<(SpaceBasis, SpaceBasis)> {
    let bk = cell_bubble();
    let mut v = Vec::new();
    for fb in face_bubble_factors(r)? {
        let weight = &bk * &face_bubble(fb.face);
        for q in &fb.q {
            v.push(q.mul_scalar_poly(&weight).with_cell(cell));
        }
    }
    let u: Vec<PolyVec> = v.iter().map(PolyVec::curl).collect();
    Ok((
        finish(Family::VBubble, r, cell, v)?,
        finish(Family::UBubble, r, cell, u)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_dimensions() {
        assert_eq!(Family::S0.dimension(3), 32);
        assert_eq!(Family::S1.dimension(3), 66);
        assert_eq!(Family::S2.dimension(3), 39);
        assert_eq!(Family::SPlus2.dimension(3), 75);
        assert_eq!(Family::S3.dimension(3), 4);
    }

    #[test]
    fn serendipity_space_of_order_two() {
        let m = serendipity_monomials(2);
        assert_eq!(m.len(), 20);
        assert!(m.contains(&MonoIndex::new(1, 1, 2)));
        assert!(!m.contains(&MonoIndex::new(2, 2, 0)));
    }

    #[test]
    fn twist_matches_formula() {
        // w₁ = x₂ (r = 2): (0, −x₁x₃x₂, x₁x₂x₂).
        let t = twist_generators(2, Box3::reference());
        assert_eq!(t.len(), 6);
        let first = &t[0];
        assert!(first.comp(0).is_zero());
        assert_eq!(first.comp(1).coeff(MonoIndex::new(1, 1, 1)), -1.0);
        assert_eq!(first.comp(2).coeff(MonoIndex::new(1, 2, 0)), 1.0);
    }

    #[test]
    fn bubbles_vanish_on_the_boundary() {
        let (v, _) = build_bubbles(2, Box3::reference()).unwrap();
        for z in &v.basis {
            for xi in [[1.0, 0.3, -0.2], [0.1, -1.0, 0.5], [0.7, 0.2, 1.0]] {
                assert!(z.eval_ref(xi).iter().all(|c| c.abs() < 1e-14));
            }
        }
    }

    #[test]
    fn unsupported_orders_are_rejected() {
        assert!(matches!(
            build_space(Family::S1, 1, Box3::reference()),
            Err(Error::UnsupportedOrder { .. })
        ));
        assert!(build_space(Family::S0, 1, Box3::reference()).is_ok());
    }
}
