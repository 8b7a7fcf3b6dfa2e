//! Residuals of the bubble identities, shared by the acceptance run.

#![allow(dead_code)]

use cubefem::poly::monomials_up_to;
use cubefem::quadrature::{gauss_face, gauss_tensor};
use cubefem::spaces::{cell_bubble, face_bubble, face_bubble_factors};
use cubefem::topology::LocalFace;
use cubefem::{build_bubbles, Box3, Poly, PolyVec};

pub fn cells() -> [Box3; 2] {
    [Box3::reference(), Box3::new([0.3, -1.0, 2.0], [0.5, 0.125, 0.25])]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normal(face: LocalFace) -> [f64; 3] {
    let mut n = [0.0; 3];
    n[face.axis] = face.side_sign();
    n
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest relative residual of `curl z × n_f + (1/h_a) B_f² q_f` on `f`,
/// and of `curl z × n_g` on the other faces.
pub fn curl_trace_residual(r: usize, cell: Box3) -> f64 {
    let bk = cell_bubble();
    let mut worst: f64 = 0.0;
    for fb in face_bubble_factors(r).unwrap() {
        let bf = face_bubble(fb.face);
        let weight = &bk * &bf;
        let h = cell.half[fb.face.axis];
        for q in &fb.q {
            let cz = q.mul_scalar_poly(&weight).with_cell(cell).curl();
            let (mut res, mut scale) = (Vec::new(), Vec::new());
            for x in &gauss_face(&cell, fb.face, 2 * r + 8).points {
                let xi = cell.to_local(*x);
                let lhs = cross(cz.eval(*x), normal(fb.face));
                let b2 = bf.eval_ref(xi).powi(2) / h;
                let qv = q.eval_ref(xi);
                for k in 0..3 {
                    res.push(lhs[k] + b2 * qv[k]);
                    scale.push(b2 * qv[k]);
                }
            }
            let scale = max_abs(&scale);
            worst = worst.max(max_abs(&res) / scale);
            for g in (0..6).map(LocalFace::from_index).filter(|g| *g != fb.face) {
                let vals: Vec<f64> = gauss_face(&cell, g, 2 * r + 8)
                    .points
                    .iter()
                    .flat_map(|x| cross(cz.eval(*x), normal(g)))
                    .collect();
                worst = worst.max(max_abs(&vals) / scale);
            }
        }
    }
    worst
}

/// Largest `|u·n|` on the faces over `max |u|` in the cell, for `u ∈ U`.
pub fn normal_trace_residual(r: usize, cell: Box3) -> f64 {
    let (_, u) = build_bubbles(r, cell).unwrap();
    let mut worst: f64 = 0.0;
    for z in &u.basis {
        let inside = gauss_tensor(&cell, 2 * r + 8);
        let scale = inside.points.iter().map(|x| max_abs(&z.eval(*x))).fold(0.0, f64::max);
        for face in (0..6).map(LocalFace::from_index) {
            let n = normal(face);
            let trace: Vec<f64> = gauss_face(&cell, face, 2 * r + 8)
                .points
                .iter()
                .map(|x| {
                    let v = z.eval(*x);
                    v[0] * n[0] + v[1] * n[1] + v[2] * n[2]
                })
                .collect();
            worst = worst.max(max_abs(&trace) / scale);
        }
    }
    worst
}

/// Largest `|(u, w)| / (‖u‖ ‖w‖)` over `u ∈ U` and monomial `w ∈ [P_{r−2}]³`.
pub fn orthogonality_residual(r: usize, cell: Box3) -> f64 {
    let (_, u) = build_bubbles(r, cell).unwrap();
    let quad = gauss_tensor(&cell, 3 * r + 10);
    let norm = |f: &dyn Fn([f64; 3]) -> [f64; 3]| quad.integrate(|x| f(x).iter().map(|a| a * a).sum()).sqrt();
    let mut worst: f64 = 0.0;
    for z in &u.basis {
        let nz = norm(&|x| z.eval(x));
        for m in monomials_up_to(r as i64 - 2) {
            for axis in 0..3 {
                let mut comps = [Poly::zero(), Poly::zero(), Poly::zero()];
                comps[axis] = Poly::monomial(m, 1.0);
                let w = PolyVec::vector(comps, cell);
                let ip = quad.integrate(|x| {
                    let (a, b) = (z.eval(x), w.eval(x));
                    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
                });
                worst = worst.max(ip.abs() / (nz * norm(&|x| w.eval(x))));
            }
        }
    }
    worst
}
