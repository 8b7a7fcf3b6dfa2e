//! Local dimension table and structured mesh counts.

use cubefem::mesh::{build_box_mesh, global_dofs, unit_cube_mesh, Bc};
use cubefem::{build_bubbles, build_space, Box3, Family};

#[test]
fn local_dimensions() {
    let cell = Box3::reference();
    let table = [
        (Family::S0, 2, 20),
        (Family::S0, 3, 32),
        (Family::S1, 2, 36),
        (Family::S1, 3, 66),
        (Family::S2, 2, 18),
        (Family::S2, 3, 39),
        (Family::SPlus1, 2, 48),
        (Family::SPlus2, 2, 30),
        (Family::SPlus2, 3, 75),
    ];
    for (fam, r, want) in table {
        let sp = build_space(fam, r, cell).unwrap();
        assert_eq!(sp.dim(), want, "{fam} r={r}");
        assert_eq!(sp.rank(), want, "{fam} r={r}");
    }
    assert_eq!(build_bubbles(2, cell).unwrap().0.dim(), 12);
    assert_eq!(build_bubbles(3, cell).unwrap().0.dim(), 36);
}

#[test]
fn mesh_entity_counts() {
    let m = build_box_mesh(Box3::from_bounds([0.0; 3], [1.0, 2.0, 3.0]), 2, 3, 4).unwrap();
    assert_eq!(m.num_vertices(), 3 * 4 * 5);
    assert_eq!(m.num_edges(), 2 * 4 * 5 + 3 * 3 * 5 + 3 * 4 * 4);
    assert_eq!(m.num_faces(), 3 * 3 * 4 + 2 * 4 * 4 + 2 * 3 * 5);
    assert_eq!(m.num_cells(), 24);
    assert_eq!(m.euler_characteristic(), 1);
}

#[test]
fn global_dimensions_from_entity_counts() {
    let m = unit_cube_mesh(2);
    for fam in [Family::S0, Family::S1, Family::S2, Family::S3, Family::SPlus1, Family::SPlus2] {
        let map = global_dofs(&m, fam, 2, Bc::None).unwrap();
        let el = cubefem::refelem::ElementDef::new(fam, 2, m.cell_box(0)).unwrap();
        let counts: usize = [m.num_vertices(), m.num_edges(), m.num_faces(), m.num_cells()]
            .iter()
            .zip(map.per_entity)
            .map(|(n, k)| n * k)
            .sum();
        assert_eq!(map.ndofs, counts, "{fam}");
        // Every local DOF belongs to exactly one entity.
        assert_eq!(el.dim(), 8 * map.per_entity[0] + 12 * map.per_entity[1] + 6 * map.per_entity[2] + map.per_entity[3]);
    }
}
