//! Crate-wide error types.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("dual-route disagreement in {what}: relative {rel:.3e} exceeds {tol:.3e}")]
    RouteMismatch { what: &'static str, rel: f64, tol: f64 },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("solver diverged (non-finite iterate) at iteration {iter}")]
    NonFinite { iter: usize },

    #[error("concentration under-resolved: mu = {mu:.3e} < 4h = {four_h:.3e}")]
    UnderResolved { mu: f64, four_h: f64 },

    #[error("eigensolver did not converge: worst Ritz residual {worst:.3e} after {iters} iterations")]
    EigenNoConverge { worst: f64, iters: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
