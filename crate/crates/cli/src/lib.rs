//! Configuration, suite runner and evaluation commands behind the `ruijsenaars` binary.

pub mod config;
pub mod eval;
pub mod suite;

use thiserror::Error;

use ruijsenaars_core::elliptic_core::EllipticError;
use ruijsenaars_core::elliptic_spectral::SpectralError;
use ruijsenaars_core::operator_core::OperatorError;
use ruijsenaars_core::symmetric_core::SymmetricError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_IDENTITY_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFRASTRUCTURE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Bad input, including domain errors of the evaluators, is a usage error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_INFRASTRUCTURE,
            _ => EXIT_USAGE,
        }
    }
}
