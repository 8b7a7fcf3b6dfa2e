//! Polynomials in three variables.
//!
//! A [`Poly`] is stored in the scaled coordinates of a cell,
//! `ξᵢ = (xᵢ − cᵢ) / hᵢ`, so that every cell of a mesh sees coefficients of
//! the same magnitude regardless of its size. A [`PolyVec`] ties one or three
//! such polynomials to the [`Box3`] they live on; its derivatives are taken
//! with respect to the physical coordinates `x`, which brings in a factor
//! `1 / hᵢ` per differentiation in direction `i`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Exponent triple `(e₁, e₂, e₃)` of the monomial `ξ₁^e₁ ξ₂^e₂ ξ₃^e₃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonoIndex(pub [u32; 3]);

impl MonoIndex {
    pub const ONE: MonoIndex = MonoIndex([0, 0, 0]);

    pub fn new(e1: u32, e2: u32, e3: u32) -> Self {
        MonoIndex([e1, e2, e3])
    }

    /// The monomial `ξᵢ`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        MonoIndex(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Degree ignoring the variables that enter linearly.
    pub fn superlinear_degree(&self) -> u32 {
        superlinear_degree(*self)
    }

    pub fn product(self, other: MonoIndex) -> MonoIndex {
        MonoIndex([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }
}

/// `Σᵢ eᵢ·[eᵢ ≥ 2]`: e.g. `x²yz³` has superlinear degree 5.
pub fn superlinear_degree(m: MonoIndex) -> u32 {
    m.0.iter().filter(|&&e| e >= 2).sum()
}

/// All monomials of total degree at most `k`, in graded lexicographic order.
pub fn monomials_up_to(k: i64) -> Vec<MonoIndex> {
    (0..=k).flat_map(homogeneous_monomials).collect()
}

/// All monomials of total degree exactly `k`.
pub fn homogeneous_monomials(k: i64) -> Vec<MonoIndex> {
    let mut out = Vec::new();
    if k < 0 {
        return out;
    }
    let k = k as u32;
    for e1 in (0..=k).rev() {
        for e2 in (0..=k - e1).rev() {
            out.push(MonoIndex([e1, e2, k - e1 - e2]));
        }
    }
    out
}

/// Axis-aligned box `Π (cᵢ − hᵢ, cᵢ + hᵢ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Box3 {
    pub center: [f64; 3],
    pub half: [f64; 3],
}

impl Box3 {
    pub fn new(center: [f64; 3], half: [f64; 3]) -> Self {
        assert!(
            half.iter().all(|&h| h > 0.0 && h.is_finite()),
            "box half-widths must be positive, got {half:?}"
        );
        Box3 { center, half }
    }

    /// The reference cube `[−1, 1]³`.
    pub fn reference() -> Self {
        Box3::new([0.0; 3], [1.0; 3])
    }

    pub fn from_bounds(lo: [f64; 3], hi: [f64; 3]) -> Self {
        let center = [0, 1, 2].map(|i| 0.5 * (lo[i] + hi[i]));
        let half = [0, 1, 2].map(|i| 0.5 * (hi[i] - lo[i]));
        Box3::new(center, half)
    }

    pub fn lo(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.center[i] - self.half[i])
    }

    pub fn hi(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.center[i] + self.half[i])
    }

    pub fn volume(&self) -> f64 {
        8.0 * self.half[0] * self.half[1] * self.half[2]
    }

    /// `h_K = sqrt(h₁² + h₂² + h₃²)`.
    pub fn diameter(&self) -> f64 {
        self.half.iter().map(|h| h * h).sum::<f64>().sqrt()
    }

    pub fn to_local(&self, x: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|i| (x[i] - self.center[i]) / self.half[i])
    }

    pub fn to_global(&self, xi: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|i| self.center[i] + self.half[i] * xi[i])
    }

    /// Same half-widths, different center.
    pub fn translated_to(&self, center: [f64; 3]) -> Box3 {
        Box3::new(center, self.half)
    }
}

/// Scalar polynomial in the scaled coordinates `ξ`.
#[derive(Clone, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<MonoIndex, f64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·ξ^{:?}", m.0)?;
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly::monomial(MonoIndex::ONE, c)
    }

    pub fn monomial(m: MonoIndex, c: f64) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    /// The coordinate `ξᵢ`.
    pub fn var(i: usize) -> Self {
        Poly::monomial(MonoIndex::var(i), 1.0)
    }

    pub fn add_term(&mut self, m: MonoIndex, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(m).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (MonoIndex, f64)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    pub fn coeff(&self, m: MonoIndex) -> f64 {
        self.terms.get(&m).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.0)
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut out = Poly::zero();
        if s != 0.0 {
            for (m, c) in self.terms() {
                out.add_term(m, c * s);
            }
        }
        out
    }

    pub fn axpy(&mut self, a: f64, other: &Poly) {
        if a == 0.0 {
            return;
        }
        for (m, c) in other.terms() {
            self.add_term(m, a * c);
        }
    }

    /// `∂/∂ξᵢ`.
    pub fn partial_ref(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms() {
            let e = m.0[i];
            if e > 0 {
                let mut d = m;
                d.0[i] -= 1;
                out.add_term(d, c * e as f64);
            }
        }
        out
    }

    pub fn eval_ref(&self, xi: [f64; 3]) -> f64 {
        let n = self.max_exponent() as usize + 1;
        let pw = PowerTable::new(xi, n);
        self.terms().map(|(m, c)| c * pw.mono(m)).sum()
    }

    /// Drops coefficients smaller than `tol` in absolute value.
    pub fn pruned(&self, tol: f64) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms() {
            if c.abs() > tol {
                out.add_term(m, c);
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }
}

pub(crate) struct PowerTable {
    pw: [Vec<f64>; 3],
}

impl PowerTable {
    pub(crate) fn new(xi: [f64; 3], n: usize) -> Self {
        let pw = [0, 1, 2].map(|i| {
            let mut v = Vec::with_capacity(n.max(1));
            let mut acc = 1.0;
            for _ in 0..n.max(1) {
                v.push(acc);
                acc *= xi[i];
            }
            v
        });
        PowerTable { pw }
    }

    #[inline]
    pub(crate) fn mono(&self, m: MonoIndex) -> f64 {
        self.pw[0][m.0[0] as usize] * self.pw[1][m.0[1] as usize] * self.pw[2][m.0[2] as usize]
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        self.axpy(1.0, rhs);
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                out.add_term(ma.product(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul<f64> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: f64) -> Poly {
        self.scale(rhs)
    }
}

/// Differential operator applied to a [`PolyVec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffOp {
    Grad,
    Curl,
    Div,
    Partial(usize),
}

/// Scalar (`ncomp = 1`) or vector (`ncomp = 3`) polynomial field on a cell.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVec {
    comps: Vec<Poly>,
    cell: Box3,
}

impl PolyVec {
    pub fn scalar(p: Poly, cell: Box3) -> Self {
        PolyVec {
            comps: vec![p],
            cell,
        }
    }

    pub fn vector(comps: [Poly; 3], cell: Box3) -> Self {
        PolyVec {
            comps: comps.into(),
            cell,
        }
    }

    pub fn from_comps(comps: Vec<Poly>, cell: Box3) -> Self {
        assert!(
            comps.len() == 1 || comps.len() == 3,
            "a PolyVec has 1 or 3 components, got {}",
            comps.len()
        );
        PolyVec { comps, cell }
    }

    pub fn zero(ncomp: usize, cell: Box3) -> Self {
        PolyVec::from_comps(vec![Poly::zero(); ncomp], cell)
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn cell(&self) -> &Box3 {
        &self.cell
    }

    /// The same coefficients interpreted on another cell. Only meaningful
    /// when the half-widths agree, which is what translation-invariant
    /// reference elements rely on.
    pub fn with_cell(&self, cell: Box3) -> PolyVec {
        PolyVec {
            comps: self.comps.clone(),
            cell,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn max_exponent(&self) -> u32 {
        self.comps.iter().map(Poly::max_exponent).max().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<u32> {
        self.comps.iter().filter_map(Poly::degree).max()
    }

    /// Value at a physical point. Unused trailing entries are zero.
    pub fn eval(&self, x: [f64; 3]) -> [f64; 3] {
        self.eval_ref(self.cell.to_local(x))
    }

    /// Value at a point given in the scaled coordinates of the cell.
    pub fn eval_ref(&self, xi: [f64; 3]) -> [f64; 3] {
        let pw = PowerTable::new(xi, self.max_exponent() as usize + 1);
        let mut out = [0.0; 3];
        for (k, p) in self.comps.iter().enumerate() {
            out[k] = p.terms().map(|(m, c)| c * pw.mono(m)).sum();
        }
        out
    }

    pub fn scale(&self, s: f64) -> PolyVec {
        PolyVec {
            comps: self.comps.iter().map(|p| p.scale(s)).collect(),
            cell: self.cell,
        }
    }

    /// Multiplies component `i` by `s[i]`.
    pub fn scale_components(&self, s: [f64; 3]) -> PolyVec {
        PolyVec {
            comps: self
                .comps
                .iter()
                .enumerate()
                .map(|(i, p)| p.scale(s[i]))
                .collect(),
            cell: self.cell,
        }
    }

    pub fn axpy(&mut self, a: f64, other: &PolyVec) {
        assert_eq!(self.ncomp(), other.ncomp(), "component count mismatch");
        for (p, q) in self.comps.iter_mut().zip(&other.comps) {
            p.axpy(a, q);
        }
    }

    /// `Σⱼ coeffs[j] · items[j]`.
    pub fn lincomb(coeffs: &[f64], items: &[PolyVec]) -> PolyVec {
        assert_eq!(coeffs.len(), items.len());
        assert!(!items.is_empty(), "empty linear combination");
        let mut out = PolyVec::zero(items[0].ncomp(), items[0].cell);
        for (c, p) in coeffs.iter().zip(items) {
            out.axpy(*c, p);
        }
        out
    }

    /// Multiplies every component by the scalar polynomial `s`.
    pub fn mul_scalar_poly(&self, s: &Poly) -> PolyVec {
        PolyVec {
            comps: self.comps.iter().map(|p| p * s).collect(),
            cell: self.cell,
        }
    }

    /// `∂/∂xᵢ` in physical coordinates.
    pub fn partial(&self, i: usize) -> PolyVec {
        let s = 1.0 / self.cell.half[i];
        PolyVec {
            comps: self
                .comps
                .iter()
                .map(|p| p.partial_ref(i).scale(s))
                .collect(),
            cell: self.cell,
        }
    }

    pub fn grad(&self) -> PolyVec {
        assert_eq!(self.ncomp(), 1, "grad needs a scalar field");
        let p = &self.comps[0];
        let comps = [0, 1, 2].map(|i| p.partial_ref(i).scale(1.0 / self.cell.half[i]));
        PolyVec::vector(comps, self.cell)
    }

    pub fn curl(&self) -> PolyVec {
        assert_eq!(self.ncomp(), 3, "curl needs a vector field");
        let d = |comp: usize, dir: usize| {
            self.comps[comp]
                .partial_ref(dir)
                .scale(1.0 / self.cell.half[dir])
        };
        let c0 = &d(2, 1) - &d(1, 2);
        let c1 = &d(0, 2) - &d(2, 0);
        let c2 = &d(1, 0) - &d(0, 1);
        PolyVec::vector([c0, c1, c2], self.cell)
    }

    pub fn div(&self) -> PolyVec {
        assert_eq!(self.ncomp(), 3, "div needs a vector field");
        let mut out = Poly::zero();
        for i in 0..3 {
            out.axpy(1.0 / self.cell.half[i], &self.comps[i].partial_ref(i));
        }
        PolyVec::scalar(out, self.cell)
    }

    pub fn diff(&self, op: DiffOp) -> PolyVec {
        match op {
            DiffOp::Grad => self.grad(),
            DiffOp::Curl => self.curl(),
            DiffOp::Div => self.div(),
            DiffOp::Partial(i) => self.partial(i),
        }
    }

    /// `n × self` for a constant vector `n` (vector fields only).
    pub fn cross_left(&self, n: [f64; 3]) -> PolyVec {
        assert_eq!(self.ncomp(), 3);
        let u = &self.comps;
        let c = |a: f64, p: &Poly, b: f64, q: &Poly| {
            let mut r = p.scale(a);
            r.axpy(-b, q);
            r
        };
        PolyVec::vector(
            [
                c(n[1], &u[2], n[2], &u[1]),
                c(n[2], &u[0], n[0], &u[2]),
                c(n[0], &u[1], n[1], &u[0]),
            ],
            self.cell,
        )
    }

    /// `self × n` for a constant vector `n`.
    pub fn cross_right(&self, n: [f64; 3]) -> PolyVec {
        self.cross_left(n).scale(-1.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().map(Poly::max_abs_coeff).fold(0.0, f64::max)
    }
}

/// Coefficient matrix of a family of fields over the union of their
/// `(component, monomial)` supports. Row `j` holds the coefficients of
/// `items[j]`.
pub fn coefficient_matrix(items: &[PolyVec]) -> nalgebra::DMatrix<f64> {
    coefficient_table(items).0
}

/// Like [`coefficient_matrix`], also returning the `(component, monomial)`
/// key of every column.
pub fn coefficient_table(items: &[PolyVec]) -> (nalgebra::DMatrix<f64>, Vec<(usize, MonoIndex)>) {
    let mut keys: BTreeMap<(usize, MonoIndex), usize> = BTreeMap::new();
    for p in items {
        for (k, c) in p.comps().iter().enumerate() {
            for (m, _) in c.terms() {
                keys.entry((k, m)).or_insert(0);
            }
        }
    }
    for (n, v) in keys.values_mut().enumerate() {
        *v = n;
    }
    let mut mat = nalgebra::DMatrix::zeros(items.len(), keys.len());
    for (j, p) in items.iter().enumerate() {
        for (k, c) in p.comps().iter().enumerate() {
            for (m, v) in c.terms() {
                mat[(j, keys[&(k, m)])] = v;
            }
        }
    }
    (mat, keys.into_keys().collect())
}

impl PolyVec {
    /// Inverse of [`coefficient_table`] for a single coefficient vector.
    pub fn from_coefficients(keys: &[(usize, MonoIndex)], coeffs: &[f64], ncomp: usize, cell: Box3) -> PolyVec {
        assert_eq!(keys.len(), coeffs.len());
        let mut out = PolyVec::zero(ncomp, cell);
        for (&(k, m), &c) in keys.iter().zip(coeffs) {
            out.comps[k].add_term(m, c);
        }
        out
    }

    /// All first partial derivatives: `[∂₁self, ∂₂self, ∂₃self]`.
    pub fn jacobian(&self) -> [PolyVec; 3] {
        [0, 1, 2].map(|i| self.partial(i))
    }
}

impl Poly {
    /// Legendre polynomial `P_k(ξ_var)`.
    pub fn legendre(k: usize, var: usize) -> Poly {
        let mut p0 = Poly::constant(1.0);
        if k == 0 {
            return p0;
        }
        let t = Poly::var(var);
        let mut p1 = t.clone();
        for n in 2..=k {
            let mut p2 = (&t * &p1).scale((2 * n - 1) as f64 / n as f64);
            p2.axpy(-((n - 1) as f64) / n as f64, &p0);
            p0 = p1;
            p1 = p2;
        }
        p1
    }
}
