//! Gauss–Legendre rules on intervals and their tensor products on boxes,
//! box faces and box edges.

use crate::poly::Box3;
use crate::topology::{LocalEdge, LocalFace};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Legendre polynomial `P_k(t)`.
pub fn legendre(k: usize, t: f64) -> f64 {
    match k {
        0 => 1.0,
        _ => legendre_with_derivative(k, t).0,
    }
}

/// Number of Gauss points per axis exact for per-axis degree `d`.
pub fn points_for_degree(d: usize) -> usize {
    d / 2 + 1
}

/// Points and positive weights of a quadrature rule in physical coordinates.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Per-axis polynomial degree integrated exactly.
    pub degree: usize,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn([f64; 3]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Tensor Gauss rule on `cell` exact for per-axis degree `degree`.
pub fn gauss_tensor(cell: &Box3, degree: usize) -> Quadrature {
    let n = points_for_degree(degree);
    let (x, w) = gauss_legendre(n);
    let jac = cell.half[0] * cell.half[1] * cell.half[2];
    let mut points = Vec::with_capacity(n * n * n);
    let mut weights = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                points.push(cell.to_global([x[i], x[j], x[k]]));
                weights.push(w[i] * w[j] * w[k] * jac);
            }
        }
    }
    Quadrature {
        points,
        weights,
        degree,
    }
}

/// Gauss rule on a face of `cell`, exact for per-axis degree `degree` in
/// the two tangential directions.
pub fn gauss_face(cell: &Box3, face: LocalFace, degree: usize) -> Quadrature {
    let n = points_for_degree(degree);
    let (x, w) = gauss_legendre(n);
    let [a, b] = face.tangent_axes();
    let jac = cell.half[a] * cell.half[b];
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let mut xi = [0.0; 3];
            xi[face.axis] = face.side_sign();
            xi[a] = x[i];
            xi[b] = x[j];
            points.push(cell.to_global(xi));
            weights.push(w[i] * w[j] * jac);
        }
    }
    Quadrature {
        points,
        weights,
        degree,
    }
}

/// Gauss rule on an edge of `cell`.
pub fn gauss_edge(cell: &Box3, edge: LocalEdge, degree: usize) -> Quadrature {
    let n = points_for_degree(degree);
    let (x, w) = gauss_legendre(n);
    let base = edge.ref_offset();
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut xi = base;
        xi[edge.axis] = x[i];
        points.push(cell.to_global(xi));
        weights.push(w[i] * cell.half[edge.axis]);
    }
    Quadrature {
        points,
        weights,
        degree,
    }
}
