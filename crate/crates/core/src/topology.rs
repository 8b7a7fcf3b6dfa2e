//! Local entities of a box: 8 vertices, 12 edges, 6 faces.
//!
//! Orientation convention shared with the mesh: every edge is oriented
//! toward increasing coordinate and every face normal points along the
//! positive axis. The tangential frame of a face is `(t₁, t₂)` with `t₁` the
//! lower-numbered tangential axis and `t₂ = n × t₁`.

/// Vertex `(b₀, b₁, b₂) ∈ {0,1}³`, local index `b₀ + 2b₁ + 4b₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalVertex(pub [u8; 3]);

impl LocalVertex {
    pub fn index(&self) -> usize {
        (self.0[0] + 2 * self.0[1] + 4 * self.0[2]) as usize
    }

    pub fn from_index(i: usize) -> Self {
        LocalVertex([(i & 1) as u8, ((i >> 1) & 1) as u8, ((i >> 2) & 1) as u8])
    }

    pub fn ref_coords(&self) -> [f64; 3] {
        self.0.map(|b| if b == 0 { -1.0 } else { 1.0 })
    }

    pub fn all() -> impl Iterator<Item = LocalVertex> {
        (0..8).map(LocalVertex::from_index)
    }
}

/// Edge parallel to `axis`; `bits` give the position along the two other
/// axes (in increasing axis order). Local index `4·axis + b₀ + 2b₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalEdge {
    pub axis: usize,
    pub bits: [u8; 2],
}

impl LocalEdge {
    pub fn new(axis: usize, bits: [u8; 2]) -> Self {
        assert!(axis < 3 && bits.iter().all(|&b| b < 2));
        LocalEdge { axis, bits }
    }

    pub fn index(&self) -> usize {
        4 * self.axis + (self.bits[0] + 2 * self.bits[1]) as usize
    }

    pub fn from_index(i: usize) -> Self {
        LocalEdge::new(i / 4, [(i & 1) as u8, ((i >> 1) & 1) as u8])
    }

    /// The two axes orthogonal to the edge, ascending.
    pub fn other_axes(&self) -> [usize; 2] {
        other_axes(self.axis)
    }

    /// Reference coordinates of the edge midpoint.
    pub fn ref_offset(&self) -> [f64; 3] {
        let mut xi = [0.0; 3];
        let [a, b] = self.other_axes();
        xi[a] = if self.bits[0] == 0 { -1.0 } else { 1.0 };
        xi[b] = if self.bits[1] == 0 { -1.0 } else { 1.0 };
        xi
    }

    pub fn tangent(&self) -> [f64; 3] {
        unit(self.axis)
    }

    pub fn all() -> impl Iterator<Item = LocalEdge> {
        (0..12).map(LocalEdge::from_index)
    }
}

/// Face orthogonal to `axis` on side `side ∈ {0 (low), 1 (high)}`. Local
/// index `2·axis + side`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalFace {
    pub axis: usize,
    pub side: u8,
}

impl LocalFace {
    pub fn new(axis: usize, side: u8) -> Self {
        assert!(axis < 3 && side < 2);
        LocalFace { axis, side }
    }

    pub fn index(&self) -> usize {
        2 * self.axis + self.side as usize
    }

    pub fn from_index(i: usize) -> Self {
        LocalFace::new(i / 2, (i % 2) as u8)
    }

    /// Reference coordinate of the face along its normal axis: `±1`.
    pub fn side_sign(&self) -> f64 {
        if self.side == 0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn tangent_axes(&self) -> [usize; 2] {
        other_axes(self.axis)
    }

    /// Global (mesh-oriented) unit normal, always `+e_axis`.
    pub fn normal(&self) -> [f64; 3] {
        unit(self.axis)
    }

    /// Outward unit normal of the cell on this face.
    pub fn outward_normal(&self) -> [f64; 3] {
        let mut n = [0.0; 3];
        n[self.axis] = self.side_sign();
        n
    }

    /// Tangential frame `(t₁, t₂)` with `n × t₁ = t₂`.
    pub fn frame(&self) -> [[f64; 3]; 2] {
        let [a, _] = self.tangent_axes();
        let t1 = unit(a);
        let t2 = cross(self.normal(), t1);
        [t1, t2]
    }

    pub fn all() -> impl Iterator<Item = LocalFace> {
        (0..6).map(LocalFace::from_index)
    }
}

pub fn other_axes(axis: usize) -> [usize; 2] {
    match axis {
        0 => [1, 2],
        1 => [0, 2],
        2 => [0, 1],
        _ => panic!("axis {axis} out of range"),
    }
}

pub fn unit(axis: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    e
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
