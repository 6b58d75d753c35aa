//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameter or argument outside the mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An adaptive series, cutoff search, or recursion hit its hard cap
    /// before reaching the requested tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature error: {0}")]
    Quadrature(String),
    /// A threshold bracket does not actually bracket a verdict flip.
    #[error("bracket error: {0}")]
    Bracket(String),
}
