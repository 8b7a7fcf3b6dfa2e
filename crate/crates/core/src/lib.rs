//! Finite elements on axis-aligned box meshes: the nonconforming
//! `−curl Δ curl` element `S⁺¹`, the nonconforming Brinkman element `S⁺²`,
//! and the discrete complexes
//!
//! ```text
//! S⁰ᵣ --grad--> S⁺¹ --curl--> S⁺² --div--> S³
//! S⁰ᵣ --grad--> S¹  --curl--> S²  --div--> S³
//! ```
//!
//! The crate is organised bottom-up: [`poly`] and [`quadrature`] provide
//! exact polynomial calculus on a box, [`spaces`] builds the shape-function
//! spaces, [`refelem`] attaches degrees of freedom and nodal bases, [`mesh`]
//! numbers them globally, [`assembly`] forms the linear systems that
//! [`linsolve`] solves, and [`complexcheck`] audits the structural
//! properties of the complexes.

pub mod assembly;
pub mod complexcheck;
pub mod error;
pub mod field;
pub mod linsolve;
pub mod mesh;
pub mod poly;
pub mod quadrature;
pub mod refelem;
pub mod spaces;
pub mod topology;

pub use error::{Error, Result};
pub use poly::{Box3, MonoIndex, Poly, PolyVec};
pub use spaces::{build_bubbles, build_space, Family, SpaceBasis};
