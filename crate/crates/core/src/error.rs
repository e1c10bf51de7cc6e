//! Error type shared across the crate.
//!
//! Everything fallible returns [`enum@Error`]; values embedded in variants are
//! stored as `f64` so the error type stays independent of the scalar
//! parameter used by the numerics.

use thiserror::Error;

/// Any failure produced by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The Fock cutoff is too small for the requested coherent state: the
    /// probability weight beyond the cutoff exceeds the allowed tolerance.
    #[error(
        "Fock truncation inadequate: n_bar = {n_bar}, n_fock = {n_fock} \
         leaves tail weight {tail:.3e} > {tol:.3e}"
    )]
    Truncation {
        n_bar: f64,
        n_fock: usize,
        tail: f64,
        tol: f64,
    },

    /// Operands with incompatible dimensions.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// The iterative symmetric eigensolver did not converge.
    #[error("eigendecomposition failed to converge for a {dim}x{dim} matrix")]
    EigSolverFailure { dim: usize },

    /// A reduced density matrix has an eigenvalue too negative to be a
    /// rounding artifact.
    #[error("density matrix eigenvalue {value:.3e} is below the clamping window")]
    NonPositiveDensity { value: f64 },

    /// A density matrix whose trace is not 1 within tolerance.
    #[error("density matrix trace {trace} deviates from 1 beyond tolerance")]
    NotNormalized { trace: f64 },

    /// First-passage threshold outside the meaningful range (0, 1].
    #[error("ergotropy threshold {value} outside (0, 1]")]
    InvalidThreshold { value: f64 },

    /// Structurally invalid parameters or configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Shorthand for a [`Error::Config`] with a formatted message.
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
