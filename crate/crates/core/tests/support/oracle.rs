//! Closed-form monomial integration, independent of the quadrature and
//! tabulation code. Polynomials live in scaled coordinates
//! `ξ = (x − c)/h`, so `∫_K ξ^a = |K| Π_i [a_i even] / (a_i + 1)`.

#![allow(dead_code)]

use std::collections::BTreeMap;

use std::collections::HashMap;

use cubefem::assembly::{local_matrix, FormKind, FormSpec};
use cubefem::refelem::{Deriv, ElementDef};
use cubefem::{Box3, Family, PolyVec};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub type Mono = BTreeMap<[u32; 3], f64>;

pub fn components(p: &PolyVec) -> Vec<Mono> {
    p.comps()
        .iter()
        .map(|c| c.terms().map(|(m, v)| (m.0, v)).collect())
        .collect()
}

/// Physical partial `∂/∂x_i = h_i⁻¹ ∂/∂ξ_i`.
pub fn partial(m: &Mono, i: usize, cell: &Box3) -> Mono {
    let mut out = Mono::new();
    for (e, v) in m {
        if e[i] > 0 {
            let mut f = *e;
            f[i] -= 1;
            *out.entry(f).or_insert(0.0) += v * e[i] as f64 / cell.half[i];
        }
    }
    out
}

fn sub(a: &Mono, b: &Mono) -> Mono {
    let mut out = a.clone();
    for (e, v) in b {
        *out.entry(*e).or_insert(0.0) -= v;
    }
    out
}

fn curl(u: &[Mono], cell: &Box3) -> Vec<Mono> {
    (0..3)
        .map(|k| {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            sub(&partial(&u[j], i, cell), &partial(&u[i], j, cell))
        })
        .collect()
}

fn jacobian(u: &[Mono], cell: &Box3) -> Vec<Mono> {
    (0..3).flat_map(|i| u.iter().map(move |c| partial(c, i, cell))).collect()
}

pub fn apply(p: &PolyVec, d: Deriv) -> Vec<Mono> {
    let cell = p.cell();
    let u = components(p);
    match d {
        Deriv::Value => u,
        Deriv::Grad => jacobian(&u, cell),
        Deriv::Curl => curl(&u, cell),
        Deriv::GradCurl => jacobian(&curl(&u, cell), cell),
        Deriv::Div => {
            let mut s = Mono::new();
            for (i, c) in u.iter().enumerate() {
                for (e, v) in partial(c, i, cell) {
                    *s.entry(e).or_insert(0.0) += v;
                }
            }
            vec![s]
        }
    }
}

/// `∫_K a b` in closed form.
pub fn integrate_product(a: &Mono, b: &Mono, cell: &Box3) -> f64 {
    let mut s = 0.0;
    for (ea, va) in a {
        for (eb, vb) in b {
            let mut f = 1.0;
            for i in 0..3 {
                let k = ea[i] + eb[i];
                if k % 2 == 1 {
                    f = 0.0;
                    break;
                }
                f /= (k + 1) as f64;
            }
            s += va * vb * f;
        }
    }
    s * cell.volume()
}

/// `∫_K ξ^a / |K|`.
fn unit_moment(a: [u32; 3]) -> f64 {
    a.iter().map(|&k| if k % 2 == 1 { 0.0 } else { 1.0 / (k + 1) as f64 }).product()
}

/// `M_ij = c ∫_K d_test(test_i) · d_trial(trial_j)`, as `C_t G C_rᵀ` with
/// `G` the closed-form Gram matrix of the monomials that occur.
pub fn matrix(test: &[PolyVec], dt: Deriv, trial: &[PolyVec], dr: Deriv, coeff: f64) -> DMatrix<f64> {
    let cell = *test[0].cell();
    let a: Vec<Vec<Mono>> = test.iter().map(|p| apply(p, dt)).collect();
    let b: Vec<Vec<Mono>> = trial.iter().map(|p| apply(p, dr)).collect();
    let width = a[0].len();
    assert!(a.iter().chain(&b).all(|v| v.len() == width));
    let index = |items: &[Vec<Mono>]| {
        let mut keys: Vec<[u32; 3]> = items.iter().flatten().flat_map(|m| m.keys().copied()).collect();
        keys.sort_unstable();
        keys.dedup();
        keys
    };
    let (ka, kb) = (index(&a), index(&b));
    let coeffs = |items: &[Vec<Mono>], keys: &[[u32; 3]]| {
        let mut c = DMatrix::zeros(items.len(), width * keys.len());
        for (i, v) in items.iter().enumerate() {
            for (k, m) in v.iter().enumerate() {
                for (e, x) in m {
                    let j = keys.binary_search(e).unwrap();
                    c[(i, k * keys.len() + j)] = *x;
                }
            }
        }
        c
    };
    let (ca, cb) = (coeffs(&a, &ka), coeffs(&b, &kb));
    let mut g = DMatrix::zeros(width * ka.len(), width * kb.len());
    for k in 0..width {
        for (i, ea) in ka.iter().enumerate() {
            for (j, eb) in kb.iter().enumerate() {
                g[(k * ka.len() + i, k * kb.len() + j)] = unit_moment([0, 1, 2].map(|d| ea[d] + eb[d]));
            }
        }
    }
    (ca * g * cb.transpose()) * (coeff * cell.volume())
}

pub fn rel_frobenius(got: &DMatrix<f64>, want: &DMatrix<f64>) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

/// (form, test family, test derivative, trial family, trial derivative).
pub const CASES: [(FormKind, Family, Deriv, Family, Deriv); 13] = [
    (FormKind::Mass, Family::S0, Deriv::Value, Family::S0, Deriv::Value),
    (FormKind::Mass, Family::S1, Deriv::Value, Family::S1, Deriv::Value),
    (FormKind::Mass, Family::S2, Deriv::Value, Family::S2, Deriv::Value),
    (FormKind::Mass, Family::S3, Deriv::Value, Family::S3, Deriv::Value),
    (FormKind::Mass, Family::SPlus1, Deriv::Value, Family::SPlus1, Deriv::Value),
    (FormKind::Mass, Family::SPlus2, Deriv::Value, Family::SPlus2, Deriv::Value),
    (FormKind::GradStiffness, Family::S0, Deriv::Grad, Family::S0, Deriv::Grad),
    (FormKind::CurlMass, Family::SPlus1, Deriv::Curl, Family::SPlus1, Deriv::Curl),
    (FormKind::GradCurlStiffness, Family::SPlus1, Deriv::GradCurl, Family::SPlus1, Deriv::GradCurl),
    (FormKind::GradStiffness, Family::SPlus2, Deriv::Grad, Family::SPlus2, Deriv::Grad),
    (FormKind::DivDiv, Family::SPlus2, Deriv::Div, Family::SPlus2, Deriv::Div),
    (FormKind::B1VGradQ, Family::SPlus1, Deriv::Value, Family::S0, Deriv::Grad),
    (FormKind::B2DivVQ, Family::SPlus2, Deriv::Div, Family::S3, Deriv::Value),
];

/// Worst relative Frobenius error of the library local matrices on `cell`
/// over [`CASES`] and `r ∈ {2, 3}`.
pub fn worst_local_error(cell: Box3) -> f64 {
    let mut worst: f64 = 0.0;
    for r in [2, 3] {
        let mut elements = HashMap::new();
        for fam in [Family::S0, Family::S1, Family::S2, Family::S3, Family::SPlus1, Family::SPlus2] {
            elements.insert(fam, ElementDef::new(fam, r, cell).unwrap());
        }
        for (kind, ft, dt, fr, dr) in CASES {
            let (test, trial) = (&elements[&ft], &elements[&fr]);
            let got = local_matrix(&FormSpec::new(kind, 0.75), trial, test).unwrap();
            let want = matrix(&test.nodal, dt, &trial.nodal, dr, 0.75);
            worst = worst.max(rel_frobenius(&got, &want));
        }
    }
    worst
}

/// A cell with random center and half-widths in `[0.05, 0.8)`.
pub fn random_cell(seed: u64) -> Box3 {
    let mut rng = StdRng::seed_from_u64(seed);
    let c = [0; 3].map(|_| rng.random_range(-2.0..2.0));
    let h = [0; 3].map(|_| rng.random_range(0.05..0.8));
    Box3::new(c, h)
}
