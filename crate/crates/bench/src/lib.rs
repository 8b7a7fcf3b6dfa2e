//! Convergence studies for the `cubefem` elements: manufactured solutions,
//! solves on uniform meshes of the unit cube, error norms and orders.

pub mod exact;
pub mod expr;
pub mod run;
