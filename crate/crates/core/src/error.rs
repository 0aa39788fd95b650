//! Crate-wide error type.

use crate::solver::SolveReport;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid user-supplied configuration (bad box side, bad distribution
    /// parameters, out-of-range constants).
    #[error("configuration error: {0}")]
    Config(String),

    /// Geometry violation, typically a ball that would wrap onto itself.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A caller broke an operation's precondition (incompatible right-hand
    /// side, missing prerequisite field, oversized exhaustive enumeration).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Iterative solver hit its iteration cap before reaching tolerance.
    #[error(
        "solver did not converge: residual {resid:.3e} > tol {tol:.3e} after {iters} iterations",
        resid = report.final_residual,
        tol = report.tolerance,
        iters = report.iterations
    )]
    Convergence { report: SolveReport },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
