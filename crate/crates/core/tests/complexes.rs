use cubefem::complexcheck::{check_commuting, check_exactness, Complex};
use cubefem::field::{Field, PolyField, TrigField};
use cubefem::mesh::{build_box_mesh, unit_cube_mesh, Bc};
use cubefem::{Box3, Poly, PolyVec};

fn meshes() -> Vec<cubefem::mesh::Mesh> {
    let unit = Box3::from_bounds([0.0; 3], [1.0; 3]);
    vec![
        build_box_mesh(unit, 1, 1, 1).unwrap(),
        build_box_mesh(unit, 2, 2, 2).unwrap(),
        build_box_mesh(unit, 2, 3, 2).unwrap(),
    ]
}

#[test]
fn complexes_are_exact() {
    for mesh in meshes() {
        for r in [2, 3] {
            for bc in [Bc::None, Bc::Homogeneous] {
                for cx in [Complex::Nonconforming, Complex::Conforming] {
                    let rep = check_exactness(&mesh, r, bc, cx).unwrap();
                    print!("{}", rep.to_table());
                    assert!(rep.passed());
                    assert!(rep.min_gap >= 1e3, "gap {}", rep.min_gap);
                }
            }
        }
    }
}

#[test]
fn homogeneous_divergence_rank_on_eight_cells() {
    let rep = check_exactness(&unit_cube_mesh(2), 2, Bc::Homogeneous, Complex::Nonconforming).unwrap();
    assert_eq!(rep.slots[2].rank, 7);
    assert_eq!(rep.slots[3].dim, 7);
}

fn trig_samples() -> Vec<TrigField> {
    let mut s = 0.123_f64;
    (0..5)
        .map(|_| {
            TrigField::from_unit(std::array::from_fn(|_| {
                s = (s * 9301.0 + 0.49297).fract();
                s
            }))
        })
        .collect()
}

#[test]
fn interpolants_commute() {
    let mesh = build_box_mesh(Box3::from_bounds([0.0; 3], [1.0; 3]), 2, 3, 2).unwrap();
    let samples = trig_samples();
    let refs: Vec<&dyn Field> = samples.iter().map(|s| s as &dyn Field).collect();
    for r in [2, 3] {
        let rep = check_commuting(&mesh, r, &refs).unwrap();
        println!("r={r} {rep:?}");
        assert!(rep.max() <= 1e-9, "{rep:?}");
    }
}

#[test]
fn polynomials_in_the_space_are_reproduced() {
    let mesh = unit_cube_mesh(2);
    let c = mesh.cell_box(0);
    let x = Poly::var(0);
    let y = Poly::var(1);
    let p = PolyField::new(PolyVec::vector([&x * &y, Poly::constant(1.0), &y * 2.0], c));
    let rep = check_commuting(&mesh, 2, &[&p]).unwrap();
    assert!(rep.max() <= 1e-12, "{rep:?}");
}
