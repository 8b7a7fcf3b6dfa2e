//! Structured box meshes and global DOF numbering.
//!
//! Entities are numbered lexicographically with the first index fastest:
//! vertex `(i, j, k)` has index `i + (n₁+1)(j + (n₂+1)k)`. Edges are grouped
//! by direction (all `x₁`-edges first) and faces by normal axis. Every edge
//! is oriented toward increasing coordinate and every face normal points
//! along the positive axis, so two cells sharing an entity see identical
//! frames and all DOF signs are `+1`.

use crate::error::{Error, Result};
use crate::poly::Box3;
use crate::quadrature::{gauss_edge, gauss_face, Quadrature};
use crate::refelem::{dof_table, Entity};
use crate::spaces::Family;
use crate::topology::{LocalEdge, LocalFace, LocalVertex};

#[derive(Clone, Debug)]
pub struct Mesh {
    pub domain: Box3,
    pub n: [usize; 3],
}

/// A mesh entity by global index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GlobalEntity {
    Vertex(usize),
    Edge(usize),
    Face(usize),
    Cell(usize),
}

impl Mesh {
    pub fn cell_half(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.domain.half[i] / self.n[i] as f64)
    }

    /// Mesh size `max hᵢ` measured as full cell width.
    pub fn h(&self) -> f64 {
        self.cell_half().iter().fold(0.0, |a: f64, &b| a.max(2.0 * b))
    }

    pub fn num_vertices(&self) -> usize {
        (self.n[0] + 1) * (self.n[1] + 1) * (self.n[2] + 1)
    }

    fn edge_dims(&self, axis: usize) -> [usize; 3] {
        [0, 1, 2].map(|b| if b == axis { self.n[b] } else { self.n[b] + 1 })
    }

    fn face_dims(&self, axis: usize) -> [usize; 3] {
        [0, 1, 2].map(|b| if b == axis { self.n[b] + 1 } else { self.n[b] })
    }

    fn count(d: [usize; 3]) -> usize {
        d[0] * d[1] * d[2]
    }

    pub fn num_edges(&self) -> usize {
        (0..3).map(|a| Mesh::count(self.edge_dims(a))).sum()
    }

    pub fn num_faces(&self) -> usize {
        (0..3).map(|a| Mesh::count(self.face_dims(a))).sum()
    }

    pub fn num_cells(&self) -> usize {
        Mesh::count(self.n)
    }

    /// `V − E + F − C`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64 - self.num_cells() as i64
    }

    fn linear(d: [usize; 3], p: [usize; 3]) -> usize {
        debug_assert!((0..3).all(|i| p[i] < d[i]));
        p[0] + d[0] * (p[1] + d[1] * p[2])
    }

    fn unlinear(d: [usize; 3], mut idx: usize) -> [usize; 3] {
        let i = idx % d[0];
        idx /= d[0];
        let j = idx % d[1];
        [i, j, idx / d[1]]
    }

    pub fn vertex_index(&self, p: [usize; 3]) -> usize {
        Mesh::linear(self.n.map(|k| k + 1), p)
    }

    pub fn vertex_coords(&self, v: usize) -> [usize; 3] {
        Mesh::unlinear(self.n.map(|k| k + 1), v)
    }

    pub fn vertex_point(&self, v: usize) -> [f64; 3] {
        let p = self.vertex_coords(v);
        let lo = self.domain.lo();
        let h = self.cell_half();
        [0, 1, 2].map(|i| lo[i] + 2.0 * h[i] * p[i] as f64)
    }

    fn edge_offset(&self, axis: usize) -> usize {
        (0..axis).map(|a| Mesh::count(self.edge_dims(a))).sum()
    }

    fn face_offset(&self, axis: usize) -> usize {
        (0..axis).map(|a| Mesh::count(self.face_dims(a))).sum()
    }

    /// Edge along `axis` starting at lattice point `p`.
    pub fn edge_index(&self, axis: usize, p: [usize; 3]) -> usize {
        self.edge_offset(axis) + Mesh::linear(self.edge_dims(axis), p)
    }

    /// `(axis, start point)` of an edge.
    pub fn edge_info(&self, e: usize) -> (usize, [usize; 3]) {
        let mut axis = 0;
        while e >= self.edge_offset(axis) + Mesh::count(self.edge_dims(axis)) {
            axis += 1;
        }
        (axis, Mesh::unlinear(self.edge_dims(axis), e - self.edge_offset(axis)))
    }

    /// Face with normal `axis` whose lowest corner is lattice point `p`.
    pub fn face_index(&self, axis: usize, p: [usize; 3]) -> usize {
        self.face_offset(axis) + Mesh::linear(self.face_dims(axis), p)
    }

    pub fn face_info(&self, f: usize) -> (usize, [usize; 3]) {
        let mut axis = 0;
        while f >= self.face_offset(axis) + Mesh::count(self.face_dims(axis)) {
            axis += 1;
        }
        (axis, Mesh::unlinear(self.face_dims(axis), f - self.face_offset(axis)))
    }

    pub fn cell_index(&self, p: [usize; 3]) -> usize {
        Mesh::linear(self.n, p)
    }

    pub fn cell_coords(&self, c: usize) -> [usize; 3] {
        Mesh::unlinear(self.n, c)
    }

    pub fn cell_box(&self, c: usize) -> Box3 {
        let p = self.cell_coords(c);
        let h = self.cell_half();
        let lo = self.domain.lo();
        Box3::new([0, 1, 2].map(|i| lo[i] + h[i] * (2 * p[i] + 1) as f64), h)
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> {
        0..self.num_cells()
    }

    /// Global index of a local entity of cell `c`.
    pub fn global_entity(&self, c: usize, local: Entity) -> GlobalEntity {
        let p = self.cell_coords(c);
        match local {
            Entity::Vertex(LocalVertex(b)) => {
                GlobalEntity::Vertex(self.vertex_index([0, 1, 2].map(|i| p[i] + b[i] as usize)))
            }
            Entity::Edge(e) => {
                let mut q = p;
                let [a, b] = e.other_axes();
                q[a] += e.bits[0] as usize;
                q[b] += e.bits[1] as usize;
                GlobalEntity::Edge(self.edge_index(e.axis, q))
            }
            Entity::Face(f) => {
                let mut q = p;
                q[f.axis] += f.side as usize;
                GlobalEntity::Face(self.face_index(f.axis, q))
            }
            Entity::Interior => GlobalEntity::Cell(c),
        }
    }

    pub fn cell_vertices(&self, c: usize) -> [usize; 8] {
        std::array::from_fn(|i| match self.global_entity(c, Entity::Vertex(LocalVertex::from_index(i))) {
            GlobalEntity::Vertex(v) => v,
            _ => unreachable!(),
        })
    }

    pub fn cell_edges(&self, c: usize) -> [usize; 12] {
        std::array::from_fn(|i| match self.global_entity(c, Entity::Edge(LocalEdge::from_index(i))) {
            GlobalEntity::Edge(e) => e,
            _ => unreachable!(),
        })
    }

    pub fn cell_faces(&self, c: usize) -> [usize; 6] {
        std::array::from_fn(|i| match self.global_entity(c, Entity::Face(LocalFace::from_index(i))) {
            GlobalEntity::Face(f) => f,
            _ => unreachable!(),
        })
    }

    pub fn is_boundary(&self, e: GlobalEntity) -> bool {
        let on = |axis: usize, k: usize| k == 0 || k == self.n[axis];
        match e {
            GlobalEntity::Vertex(v) => {
                let p = self.vertex_coords(v);
                (0..3).any(|i| on(i, p[i]))
            }
            GlobalEntity::Edge(e) => {
                let (axis, p) = self.edge_info(e);
                (0..3).filter(|&i| i != axis).any(|i| on(i, p[i]))
            }
            GlobalEntity::Face(f) => {
                let (axis, p) = self.face_info(f);
                on(axis, p[axis])
            }
            GlobalEntity::Cell(_) => false,
        }
    }

    /// Cells sharing face `f`, with the local face in each.
    pub fn face_cells(&self, f: usize) -> Vec<(usize, LocalFace)> {
        let (axis, p) = self.face_info(f);
        let mut out = Vec::new();
        if p[axis] > 0 {
            let mut q = p;
            q[axis] -= 1;
            out.push((self.cell_index(q), LocalFace::new(axis, 1)));
        }
        if p[axis] < self.n[axis] {
            out.push((self.cell_index(p), LocalFace::new(axis, 0)));
        }
        out
    }

    /// A cell containing the entity and the entity's local description.
    pub fn locate(&self, e: GlobalEntity) -> (usize, Entity) {
        let clamp = |p: [usize; 3]| [0, 1, 2].map(|i| p[i].min(self.n[i] - 1));
        match e {
            GlobalEntity::Vertex(v) => {
                let p = self.vertex_coords(v);
                let c = clamp(p);
                let bits = [0, 1, 2].map(|i| (p[i] - c[i]) as u8);
                (self.cell_index(c), Entity::Vertex(LocalVertex(bits)))
            }
            GlobalEntity::Edge(e) => {
                let (axis, p) = self.edge_info(e);
                let c = clamp(p);
                let [a, b] = crate::topology::other_axes(axis);
                let bits = [(p[a] - c[a]) as u8, (p[b] - c[b]) as u8];
                (self.cell_index(c), Entity::Edge(LocalEdge::new(axis, bits)))
            }
            GlobalEntity::Face(f) => {
                let (axis, p) = self.face_info(f);
                let c = clamp(p);
                (
                    self.cell_index(c),
                    Entity::Face(LocalFace::new(axis, (p[axis] - c[axis]) as u8)),
                )
            }
            GlobalEntity::Cell(c) => (c, Entity::Interior),
        }
    }
}

/// Structured `n₁ × n₂ × n₃` partition of `domain`.
pub fn build_box_mesh(domain: Box3, n1: usize, n2: usize, n3: usize) -> Result<Mesh> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::Dimension(format!("mesh divisions must be positive, got {n1}x{n2}x{n3}")));
    }
    Ok(Mesh {
        domain,
        n: [n1, n2, n3],
    })
}

/// Uniform `n³` mesh of the unit cube.
pub fn unit_cube_mesh(n: usize) -> Mesh {
    build_box_mesh(Box3::from_bounds([0.0; 3], [1.0; 3]), n, n, n).expect("positive divisions")
}

/// Gauss rule on a global edge or face.
pub fn entity_trace_quadrature(mesh: &Mesh, entity: GlobalEntity, degree: usize) -> Quadrature {
    let (c, local) = mesh.locate(entity);
    let cell = mesh.cell_box(c);
    match local {
        Entity::Edge(e) => gauss_edge(&cell, e, degree),
        Entity::Face(f) => gauss_face(&cell, f, degree),
        Entity::Interior => crate::quadrature::gauss_tensor(&cell, degree),
        Entity::Vertex(v) => Quadrature {
            points: vec![cell.to_global(v.ref_coords())],
            weights: vec![1.0],
            degree,
        },
    }
}

/// Boundary treatment of a global space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bc {
    None,
    /// All DOFs on boundary entities vanish; for `S3` a mean-zero
    /// constraint is recorded instead.
    Homogeneous,
}

/// Local-to-global DOF numbering of one family on a mesh.
#[derive(Clone, Debug)]
pub struct GlobalDofMap {
    pub family: Family,
    pub order: usize,
    pub bc: Bc,
    pub ndofs: usize,
    /// `cell_dofs[c][i]`: global index of local DOF `i` of cell `c`.
    pub cell_dofs: Vec<Vec<usize>>,
    /// Orientation signs, parallel to `cell_dofs`.
    pub signs: Vec<Vec<f64>>,
    /// Constrained (boundary) DOFs.
    pub constrained: Vec<bool>,
    /// Whether the space carries a mean-zero constraint.
    pub mean_zero: bool,
    /// Number of DOFs per vertex, edge, face and cell.
    pub per_entity: [usize; 4],
}

impl GlobalDofMap {
    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.ndofs).filter(|&i| !self.constrained[i]).collect()
    }

    pub fn num_free(&self) -> usize {
        self.constrained.iter().filter(|&&c| !c).count()
    }

    /// Dimension of the space after constraints (the mean-zero constraint
    /// removes one).
    pub fn effective_dim(&self) -> usize {
        self.num_free() - usize::from(self.mean_zero)
    }
}

/// Numbers the DOFs of `family` (order `r`) on `mesh`: all vertex DOFs,
/// then edge, face and cell DOFs, entities in global order and DOFs within
/// an entity in local order.
pub fn global_dofs(mesh: &Mesh, family: Family, r: usize, bc: Bc) -> Result<GlobalDofMap> {
    let cell = mesh.cell_box(0);
    let table = dof_table(family, r, cell)?;
    let mut per_entity = [0usize; 4];
    // Ordinal of each local DOF within its entity.
    let mut ordinal = Vec::with_capacity(table.len());
    for d in &table {
        let k = table
            .iter()
            .take_while(|o| !std::ptr::eq(*o, d))
            .filter(|o| o.entity == d.entity)
            .count();
        ordinal.push(k);
    }
    let probe = [
        Entity::Vertex(LocalVertex::from_index(0)),
        Entity::Edge(LocalEdge::from_index(0)),
        Entity::Face(LocalFace::from_index(0)),
        Entity::Interior,
    ];
    for (slot, e) in probe.iter().enumerate() {
        per_entity[slot] = table.iter().filter(|d| d.entity == *e).count();
    }
    let offsets = [
        0,
        per_entity[0] * mesh.num_vertices(),
        per_entity[0] * mesh.num_vertices() + per_entity[1] * mesh.num_edges(),
        per_entity[0] * mesh.num_vertices() + per_entity[1] * mesh.num_edges() + per_entity[2] * mesh.num_faces(),
    ];
    let ndofs = offsets[3] + per_entity[3] * mesh.num_cells();
    let mut cell_dofs = Vec::with_capacity(mesh.num_cells());
    let mut constrained = vec![false; ndofs];
    for c in mesh.cells() {
        let mut dofs = Vec::with_capacity(table.len());
        for (d, &k) in table.iter().zip(&ordinal) {
            let g = mesh.global_entity(c, d.entity);
            let (slot, idx) = match g {
                GlobalEntity::Vertex(i) => (0, i),
                GlobalEntity::Edge(i) => (1, i),
                GlobalEntity::Face(i) => (2, i),
                GlobalEntity::Cell(i) => (3, i),
            };
            let gi = offsets[slot] + idx * per_entity[slot] + k;
            if bc == Bc::Homogeneous && family != Family::S3 && mesh.is_boundary(g) {
                constrained[gi] = true;
            }
            dofs.push(gi);
        }
        cell_dofs.push(dofs);
    }
    let signs = cell_dofs.iter().map(|d| vec![1.0; d.len()]).collect();
    Ok(GlobalDofMap {
        family,
        order: r,
        bc,
        ndofs,
        cell_dofs,
        signs,
        constrained,
        mean_zero: bc == Bc::Homogeneous && family == Family::S3,
        per_entity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_counts() {
        let m = unit_cube_mesh(2);
        assert_eq!(
            (m.num_vertices(), m.num_edges(), m.num_faces(), m.num_cells()),
            (27, 54, 36, 8)
        );
        assert_eq!(m.euler_characteristic(), 1);
        let one = unit_cube_mesh(1);
        assert_eq!((one.num_vertices(), one.num_edges(), one.num_faces()), (8, 12, 6));
    }

    #[test]
    fn index_round_trips() {
        let m = build_box_mesh(Box3::from_bounds([0.0; 3], [1.0, 2.0, 1.0]), 2, 3, 2).unwrap();
        for e in 0..m.num_edges() {
            let (a, p) = m.edge_info(e);
            assert_eq!(m.edge_index(a, p), e);
        }
        for f in 0..m.num_faces() {
            let (a, p) = m.face_info(f);
            assert_eq!(m.face_index(a, p), f);
        }
    }

    #[test]
    fn interior_faces_have_two_cells() {
        let m = unit_cube_mesh(2);
        for f in 0..m.num_faces() {
            let n = m.face_cells(f).len();
            assert_eq!(n, if m.is_boundary(GlobalEntity::Face(f)) { 1 } else { 2 });
        }
    }

    #[test]
    fn serendipity_free_dofs() {
        let m = unit_cube_mesh(2);
        let map = global_dofs(&m, Family::S0, 2, Bc::Homogeneous).unwrap();
        assert_eq!(map.num_free(), 7);
        let p = global_dofs(&m, Family::S3, 2, Bc::Homogeneous).unwrap();
        assert_eq!((p.ndofs, p.effective_dim()), (8, 7));
    }

    #[test]
    fn zero_divisions_are_rejected() {
        assert!(build_box_mesh(Box3::reference(), 0, 1, 1).is_err());
    }
}
