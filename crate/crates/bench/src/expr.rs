//! Symbolic scalar expressions for manufactured solutions.
//!
//! An [`Expr`] is built from constants, coordinates, sums, products,
//! integer powers, `sin` and `cos`. For differentiation and fast evaluation
//! it is compiled to a [`Sop`], a sum of products
//! `c · Πᵢ xᵢ^a sin(ωᵢxᵢ)^b cos(ωᵢxᵢ)^d` with `d ≤ 1` (higher cosine powers
//! are rewritten through `cos² = 1 − sin²`). Trigonometric arguments must
//! therefore be of the form `ω·xᵢ`, with one frequency per coordinate.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

pub fn x() -> Expr {
    Expr::Var(0)
}

pub fn y() -> Expr {
    Expr::Var(1)
}

pub fn z() -> Expr {
    Expr::Var(2)
}

pub fn c(v: f64) -> Expr {
    Expr::Const(v)
}

impl Expr {
    pub fn sin(self) -> Expr {
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Cos(Box::new(self))
    }

    pub fn pow(self, k: u32) -> Expr {
        Expr::Pow(Box::new(self), k)
    }

    /// Compiles to canonical form.
    pub fn to_sop(&self) -> Result<Sop, String> {
        match self {
            Expr::Const(v) => Ok(Sop::constant(*v)),
            Expr::Var(i) => Ok(Sop::var(*i)),
            Expr::Add(items) => items.iter().try_fold(Sop::zero(), |acc, e| Ok(&acc + &e.to_sop()?)),
            Expr::Mul(items) => items.iter().try_fold(Sop::constant(1.0), |acc, e| Ok(&acc * &e.to_sop()?)),
            Expr::Pow(e, k) => {
                let b = e.to_sop()?;
                Ok((0..*k).fold(Sop::constant(1.0), |acc, _| &acc * &b))
            }
            Expr::Sin(arg) | Expr::Cos(arg) => {
                let (axis, omega) = linear_argument(arg)?;
                let mut s = Sop::zero();
                s.omega[axis] = omega;
                let mut key = [Factor::default(); 3];
                if matches!(self, Expr::Sin(_)) {
                    key[axis].s = 1;
                } else {
                    key[axis].c = 1;
                }
                s.terms.insert(key, 1.0);
                Ok(s)
            }
        }
    }
}

/// `ω·xᵢ` → `(i, ω)`.
fn linear_argument(e: &Expr) -> Result<(usize, f64), String> {
    let s = e.to_sop()?;
    let mut found = None;
    for (k, v) in &s.terms {
        let lin = k.iter().enumerate().filter(|(_, f)| **f != Factor::default()).collect::<Vec<_>>();
        match lin.as_slice() {
            [(i, f)] if **f == (Factor { x: 1, s: 0, c: 0 }) && found.is_none() => found = Some((*i, *v)),
            _ => return Err(format!("trigonometric argument {e} is not of the form w*x_i")),
        }
    }
    found.ok_or_else(|| format!("trigonometric argument {e} vanishes"))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, items: &[Expr], sep: &str| {
            write!(f, "(")?;
            for (k, e) in items.iter().enumerate() {
                if k > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")
        };
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "{}", ["x", "y", "z"][*i]),
            Expr::Add(items) => join(f, items, " + "),
            Expr::Mul(items) => join(f, items, "*"),
            Expr::Pow(e, k) => write!(f, "{e}^{k}"),
            Expr::Sin(e) => write!(f, "sin({e})"),
            Expr::Cos(e) => write!(f, "cos({e})"),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match self {
            Expr::Add(mut v) => {
                v.push(rhs);
                Expr::Add(v)
            }
            e => Expr::Add(vec![e, rhs]),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Mul(vec![Expr::Const(-1.0), self])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match self {
            Expr::Mul(mut v) => {
                v.push(rhs);
                Expr::Mul(v)
            }
            e => Expr::Mul(vec![e, rhs]),
        }
    }
}

impl Mul<Expr> for f64 {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![Expr::Const(self), rhs])
    }
}

/// Exponents of `x^x sin(ωx)^s cos(ωx)^c` for one coordinate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub x: u8,
    pub s: u8,
    pub c: u8,
}

type Key = [Factor; 3];

/// Canonical sum of products.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sop {
    /// Frequency of the trigonometric factors per coordinate (0 if none).
    pub omega: [f64; 3],
    pub terms: BTreeMap<Key, f64>,
}

impl Sop {
    pub fn zero() -> Self {
        Sop::default()
    }

    pub fn constant(v: f64) -> Self {
        let mut s = Sop::zero();
        if v != 0.0 {
            s.terms.insert(Key::default(), v);
        }
        s
    }

    pub fn var(i: usize) -> Self {
        let mut s = Sop::zero();
        let mut k = Key::default();
        k[i].x = 1;
        s.terms.insert(k, 1.0);
        s
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn merged_omega(a: &Sop, b: &Sop) -> [f64; 3] {
        std::array::from_fn(|i| {
            let (p, q) = (a.omega[i], b.omega[i]);
            assert!(
                p == 0.0 || q == 0.0 || p == q,
                "coordinate {i} carries two trigonometric frequencies {p} and {q}"
            );
            if p != 0.0 {
                p
            } else {
                q
            }
        })
    }

    fn add_term(&mut self, k: Key, v: f64) {
        // cos² → 1 − sin²
        if let Some(i) = (0..3).find(|&i| k[i].c >= 2) {
            let mut a = k;
            a[i].c -= 2;
            let mut b = a;
            b[i].s += 2;
            self.add_term(a, v);
            self.add_term(b, -v);
            return;
        }
        let e = self.terms.entry(k).or_insert(0.0);
        *e += v;
        if *e == 0.0 {
            self.terms.remove(&k);
        }
    }

    pub fn scale(&self, a: f64) -> Sop {
        if a == 0.0 {
            return Sop { omega: self.omega, terms: BTreeMap::new() };
        }
        Sop {
            omega: self.omega,
            terms: self.terms.iter().map(|(k, v)| (*k, a * v)).collect(),
        }
    }

    /// Partial derivative along coordinate `i`.
    pub fn diff(&self, i: usize) -> Sop {
        let w = self.omega[i];
        let mut out = Sop { omega: self.omega, terms: BTreeMap::new() };
        for (k, &v) in &self.terms {
            let f = k[i];
            if f.x > 0 {
                let mut n = *k;
                n[i].x -= 1;
                out.add_term(n, v * f.x as f64);
            }
            if f.s > 0 {
                let mut n = *k;
                n[i].s -= 1;
                n[i].c += 1;
                out.add_term(n, v * w * f.s as f64);
            }
            if f.c > 0 {
                let mut n = *k;
                n[i].c -= 1;
                n[i].s += 1;
                out.add_term(n, -v * w * f.c as f64);
            }
        }
        out
    }

    fn max_exponents(&self) -> [[usize; 3]; 3] {
        let mut m = [[0usize; 3]; 3];
        for k in self.terms.keys() {
            for i in 0..3 {
                m[i][0] = m[i][0].max(k[i].x as usize);
                m[i][1] = m[i][1].max(k[i].s as usize);
                m[i][2] = m[i][2].max(k[i].c as usize);
            }
        }
        m
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        let m = self.max_exponents();
        // Power tables per coordinate: x^a, sin^b, cos^d.
        let tables: [[Vec<f64>; 3]; 3] = std::array::from_fn(|i| {
            let base = [p[i], (self.omega[i] * p[i]).sin(), (self.omega[i] * p[i]).cos()];
            std::array::from_fn(|j| {
                let mut t = Vec::with_capacity(m[i][j] + 1);
                let mut acc = 1.0;
                for _ in 0..=m[i][j] {
                    t.push(acc);
                    acc *= base[j];
                }
                t
            })
        });
        let mut sum = 0.0;
        for (k, v) in &self.terms {
            let mut t = *v;
            for i in 0..3 {
                let f = k[i];
                t *= tables[i][0][f.x as usize] * tables[i][1][f.s as usize] * tables[i][2][f.c as usize];
            }
            sum += t;
        }
        sum
    }
}

impl Add for &Sop {
    type Output = Sop;
    fn add(self, rhs: &Sop) -> Sop {
        let mut out = Sop { omega: Sop::merged_omega(self, rhs), terms: self.terms.clone() };
        for (k, v) in &rhs.terms {
            out.add_term(*k, *v);
        }
        out
    }
}

impl Sub for &Sop {
    type Output = Sop;
    fn sub(self, rhs: &Sop) -> Sop {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Sop {
    type Output = Sop;
    // Exponents add under multiplication.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Sop) -> Sop {
        let mut out = Sop { omega: Sop::merged_omega(self, rhs), terms: BTreeMap::new() };
        for (a, va) in &self.terms {
            for (b, vb) in &rhs.terms {
                let k: Key = std::array::from_fn(|i| Factor {
                    x: a[i].x + b[i].x,
                    s: a[i].s + b[i].s,
                    c: a[i].c + b[i].c,
                });
                out.add_term(k, va * vb);
            }
        }
        out
    }
}

/// A vector field of three canonical expressions with the differential
/// operators of vector calculus.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SopVec(pub [Sop; 3]);

impl SopVec {
    pub fn from_exprs(e: [Expr; 3]) -> Result<SopVec, String> {
        let [a, b, c] = e;
        Ok(SopVec([a.to_sop()?, b.to_sop()?, c.to_sop()?]))
    }

    pub fn eval(&self, p: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| self.0[i].eval(p))
    }

    pub fn curl(&self) -> SopVec {
        let d = |c: usize, i: usize| self.0[c].diff(i);
        SopVec([&d(2, 1) - &d(1, 2), &d(0, 2) - &d(2, 0), &d(1, 0) - &d(0, 1)])
    }

    pub fn div(&self) -> Sop {
        &(&self.0[0].diff(0) + &self.0[1].diff(1)) + &self.0[2].diff(2)
    }

    /// Componentwise Laplacian.
    pub fn laplacian(&self) -> SopVec {
        SopVec(std::array::from_fn(|c| laplacian(&self.0[c])))
    }

    /// `∂ᵢu_k` at index `3i + k`.
    pub fn jacobian(&self) -> Vec<Sop> {
        (0..3).flat_map(|i| (0..3).map(move |k| (i, k))).map(|(i, k)| self.0[k].diff(i)).collect()
    }

    pub fn scale(&self, a: f64) -> SopVec {
        SopVec(std::array::from_fn(|c| self.0[c].scale(a)))
    }

    pub fn num_terms(&self) -> usize {
        self.0.iter().map(Sop::num_terms).sum()
    }
}

impl Add for &SopVec {
    type Output = SopVec;
    fn add(self, rhs: &SopVec) -> SopVec {
        SopVec(std::array::from_fn(|c| &self.0[c] + &rhs.0[c]))
    }
}

pub fn grad(s: &Sop) -> SopVec {
    SopVec(std::array::from_fn(|i| s.diff(i)))
}

pub fn laplacian(s: &Sop) -> Sop {
    (0..3).fold(Sop::zero(), |acc, i| &acc + &s.diff(i).diff(i))
}
