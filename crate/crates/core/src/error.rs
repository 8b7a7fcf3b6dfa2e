use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order r = {order} is not supported for {family}")]
    UnsupportedOrder { family: &'static str, order: usize },

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("DOFs are not unisolvent for {family} (r = {order}): numerical rank {rank} < {size}")]
    Unisolvence {
        family: &'static str,
        order: usize,
        rank: usize,
        size: usize,
    },

    #[error("operator does not map into the target space: residual {residual:e}")]
    ComplexStructure { residual: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("iteration limit {iterations} reached, best relative residual {residual:e}")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("field does not provide its {0}")]
    MissingDerivative(&'static str),

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
