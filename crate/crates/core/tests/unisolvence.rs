use cubefem::refelem::{ElementDef, UNISOLVENCE_TOL};
use cubefem::{Box3, Family};

fn cells() -> [Box3; 2] {
    [Box3::reference(), Box3::new([0.3, -1.0, 2.0], [0.5, 0.125, 0.25])]
}

#[test]
fn every_family_is_unisolvent() {
    for cell in cells() {
        for fam in Family::ALL {
            for r in fam.min_order()..=Family::MAX_ORDER {
                let el = ElementDef::new(fam, r, cell).unwrap_or_else(|e| panic!("{fam} r={r}: {e}"));
                assert_eq!(el.dim(), fam.dimension(r), "{fam} r={r}");
                let m = el.vandermonde_rank.margin(UNISOLVENCE_TOL);
                println!("{fam:>4} r={r} half={:?} dim={} margin={m:.3e}", cell.half, el.dim());
                assert!(m >= 1e3, "{fam} r={r}: margin {m}");
            }
        }
    }
}

#[test]
fn nodal_basis_is_dual_to_dofs() {
    let cell = cells()[1];
    for fam in [Family::SPlus1, Family::SPlus2, Family::S0, Family::S1] {
        let el = ElementDef::new(fam, 3, cell).unwrap();
        for (j, phi) in el.nodal.iter().enumerate() {
            let d = el.dofs_of_poly(phi);
            for (i, v) in d.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-9, "{fam}: dof {i} of basis {j} = {v}");
            }
        }
    }
}
