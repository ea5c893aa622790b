//! Elliptic Macdonald polynomials as formal p-series, conversion between the
//! monomial and elliptic Macdonald bases, the kernel coefficients K^(m) and
//! the c-series φ_λ(c).

mod basis;
mod emacdonald;
mod kernel;
mod phi;

use thiserror::Error;

use crate::operator_core::OperatorError;
use crate::scalar_ring::ScalarError;
use crate::symmetric_core::{SignedPartition, SymmetricError};

pub use basis::{basis_convert, elliptic_to_m, m_to_elliptic, ConvertDirection, EllipticBasis, EllipticCoefficients};
pub use emacdonald::{elliptic_macdonald, elliptic_span, EllipticMacdonald, ELLIPTIC_MAX_N, ELLIPTIC_MAX_ORDER};
pub use kernel::{
    kernel_coefficient, kernel_coefficient_in, KernelExpansion, KERNEL_MAX_DEGREE, KERNEL_MAX_N, KERNEL_MAX_ORDER,
};
pub use phi::{phi_lambda_series, phi_lambda_series_in, PhiSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("outside the supported envelope: {0}")]
    Envelope(String),
    #[error("eigenvalue collision between {0} and {1}")]
    Degenerate(SignedPartition, SignedPartition),
    #[error("{mu} in order {order} of the expansion of {lambda} violates the support bound")]
    Support { lambda: SignedPartition, mu: SignedPartition, order: usize },
    #[error("{0} does not hold to the computed order")]
    Consistency(String),
    #[error("kernel coefficient has a nonzero off-diagonal term at ({0}, {1})")]
    NotDiagonal(SignedPartition, SignedPartition),
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}
