//! Sparse storage, a symmetric-indefinite Krylov solver and dense helpers.

pub mod dense;
pub mod minres;
pub mod sparse;

pub use dense::{dense_eigs_smallest, dense_solve, numerical_rank, RankInfo};
pub use minres::{solve_sym_indef, SolveReport, SolverOptions};
pub use sparse::{SparseMatrix, TripletBuilder};
