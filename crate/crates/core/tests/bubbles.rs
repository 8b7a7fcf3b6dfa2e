//! The bubble identities: `curl z × n_f = −(1/h_a) B_f² q_f` on each face
//! (reference scaling), zero normal traces of `U = curl V`, and
//! orthogonality of `U` to `[P_{r−2}]³`.

mod support;

use cubefem::refelem::{DofKind, ElementDef};
use cubefem::spaces::span_contains;
use cubefem::{build_bubbles, Box3, Family, PolyVec};

use support::bubbles;

const TOL: f64 = 1e-10;

#[test]
fn curl_trace_identity() {
    for r in [2, 3] {
        for cell in bubbles::cells() {
            let res = bubbles::curl_trace_residual(r, cell);
            assert!(res < TOL, "r={r} {cell:?}: {res:e}");
        }
    }
}

#[test]
fn u_has_zero_normal_traces() {
    for r in [2, 3] {
        for cell in bubbles::cells() {
            assert!(bubbles::normal_trace_residual(r, cell) < TOL);
        }
    }
}

#[test]
fn u_is_orthogonal_to_low_degree_fields() {
    for r in [2, 3] {
        for cell in bubbles::cells() {
            assert!(bubbles::orthogonality_residual(r, cell) < TOL);
        }
    }
}
#[test]
fn curl_moment_duals_are_bubbles() {
    let cell = Box3::reference();
    let el = ElementDef::new(Family::SPlus1, 2, cell).unwrap();
    let (v, _) = build_bubbles(2, cell).unwrap();
    let duals: Vec<PolyVec> = el
        .dofs
        .iter()
        .zip(&el.nodal)
        .filter(|(d, _)| d.kind == DofKind::FaceCurlTangentialMoment)
        .map(|(_, p)| p.clone())
        .collect();
    assert_eq!(duals.len(), 12);
    assert!(span_contains(&v.basis, &duals));
}
