//! Fields that can be sampled pointwise: exact solutions, right-hand sides
//! and polynomial functions alike.

use std::sync::Arc;

use crate::poly::PolyVec;
use crate::topology::{cross, dot};

/// A scalar (`ncomp = 1`) or vector (`ncomp = 3`) field on physical space.
/// Values of scalar fields occupy the first slot of the returned array.
pub trait Field: Sync {
    fn ncomp(&self) -> usize;

    fn value(&self, x: [f64; 3]) -> [f64; 3];

    /// `curl` of a vector field, when available.
    fn curl(&self, _x: [f64; 3]) -> Option<[f64; 3]> {
        None
    }

    /// `div` of a vector field, when available.
    fn div(&self, _x: [f64; 3]) -> Option<f64> {
        None
    }
}

type VecFn = Arc<dyn Fn([f64; 3]) -> [f64; 3] + Send + Sync>;
type ScalarFn = Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>;

/// A field assembled from closures.
#[derive(Clone)]
pub struct FnField {
    ncomp: usize,
    value: VecFn,
    curl: Option<VecFn>,
    div: Option<ScalarFn>,
}

impl FnField {
    pub fn scalar(f: impl Fn([f64; 3]) -> f64 + Send + Sync + 'static) -> Self {
        FnField {
            ncomp: 1,
            value: Arc::new(move |x| [f(x), 0.0, 0.0]),
            curl: None,
            div: None,
        }
    }

    pub fn vector(f: impl Fn([f64; 3]) -> [f64; 3] + Send + Sync + 'static) -> Self {
        FnField {
            ncomp: 3,
            value: Arc::new(f),
            curl: None,
            div: None,
        }
    }

    pub fn with_curl(mut self, f: impl Fn([f64; 3]) -> [f64; 3] + Send + Sync + 'static) -> Self {
        self.curl = Some(Arc::new(f));
        self
    }

    pub fn with_div(mut self, f: impl Fn([f64; 3]) -> f64 + Send + Sync + 'static) -> Self {
        self.div = Some(Arc::new(f));
        self
    }
}

impl Field for FnField {
    fn ncomp(&self) -> usize {
        self.ncomp
    }

    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        (self.value)(x)
    }

    fn curl(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        self.curl.as_ref().map(|f| f(x))
    }

    fn div(&self, x: [f64; 3]) -> Option<f64> {
        self.div.as_ref().map(|f| f(x))
    }
}

/// A polynomial with its derivatives precomputed.
#[derive(Clone, Debug)]
pub struct PolyField {
    pub poly: PolyVec,
    curl: Option<PolyVec>,
    div: Option<PolyVec>,
}

impl PolyField {
    pub fn new(poly: PolyVec) -> Self {
        let (curl, div) = if poly.ncomp() == 3 {
            (Some(poly.curl()), Some(poly.div()))
        } else {
            (None, None)
        };
        PolyField { poly, curl, div }
    }
}

impl Field for PolyField {
    fn ncomp(&self) -> usize {
        self.poly.ncomp()
    }

    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        self.poly.eval(x)
    }

    fn curl(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        self.curl.as_ref().map(|c| c.eval(x))
    }

    fn div(&self, x: [f64; 3]) -> Option<f64> {
        self.div.as_ref().map(|d| d.eval(x)[0])
    }
}

/// `a sin(k·x + φ) + b cos(m·x + ψ)`: a smooth vector field with closed-form
/// curl and divergence, used as a random test sample.
#[derive(Clone, Copy, Debug)]
pub struct TrigField {
    pub a: [f64; 3],
    pub k: [f64; 3],
    pub phi: f64,
    pub b: [f64; 3],
    pub m: [f64; 3],
    pub psi: f64,
}

impl TrigField {
    /// Builds a sample from 14 numbers in `[0, 1)`.
    pub fn from_unit(u: [f64; 14]) -> Self {
        let s = |t: f64| 2.0 * t - 1.0;
        TrigField {
            a: [s(u[0]), s(u[1]), s(u[2])],
            k: [3.0 * s(u[3]), 3.0 * s(u[4]), 3.0 * s(u[5])],
            phi: 6.0 * u[6],
            b: [s(u[7]), s(u[8]), s(u[9])],
            m: [3.0 * s(u[10]), 3.0 * s(u[11]), 3.0 * s(u[12])],
            psi: 6.0 * u[13],
        }
    }
}

impl Field for TrigField {
    fn ncomp(&self) -> usize {
        3
    }

    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        let s = (dot(self.k, x) + self.phi).sin();
        let c = (dot(self.m, x) + self.psi).cos();
        [0, 1, 2].map(|i| self.a[i] * s + self.b[i] * c)
    }

    fn curl(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        let cs = (dot(self.k, x) + self.phi).cos();
        let sn = (dot(self.m, x) + self.psi).sin();
        let ka = cross(self.k, self.a);
        let mb = cross(self.m, self.b);
        Some([0, 1, 2].map(|i| cs * ka[i] - sn * mb[i]))
    }

    fn div(&self, x: [f64; 3]) -> Option<f64> {
        let cs = (dot(self.k, x) + self.phi).cos();
        let sn = (dot(self.m, x) + self.psi).sin();
        Some(cs * dot(self.k, self.a) - sn * dot(self.m, self.b))
    }
}

/// The curl of a field as a field in its own right (no further
/// derivatives).
pub struct CurlOf<'a, F: Field + ?Sized>(pub &'a F);

impl<F: Field + ?Sized> Field for CurlOf<'_, F> {
    fn ncomp(&self) -> usize {
        3
    }

    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        self.0.curl(x).expect("field has no curl")
    }

    fn div(&self, _x: [f64; 3]) -> Option<f64> {
        Some(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_curl(f: &dyn Field, x: [f64; 3]) -> [f64; 3] {
        let h = 1e-5;
        let d = |comp: usize, dir: usize| {
            let mut xp = x;
            let mut xm = x;
            xp[dir] += h;
            xm[dir] -= h;
            (f.value(xp)[comp] - f.value(xm)[comp]) / (2.0 * h)
        };
        [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]
    }

    #[test]
    fn trig_field_derivatives_match_differences() {
        let f = TrigField::from_unit([0.1, 0.7, 0.3, 0.9, 0.2, 0.5, 0.4, 0.8, 0.6, 0.05, 0.33, 0.71, 0.12, 0.58]);
        let x = [0.3, -0.2, 0.8];
        let c = f.curl(x).unwrap();
        let fd = central_curl(&f, x);
        for i in 0..3 {
            assert!((c[i] - fd[i]).abs() < 1e-7);
        }
    }
}
