//! Signed partitions with dominance order, monomial symmetric Laurent
//! polynomials, Macdonald polynomials over ℚ(q,t) and the constants N_λ, b_λ.

mod constants;
mod macdonald;
mod monomial;
mod partition;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::operator_core::OperatorError;

pub use crate::scalar_ring::LaurentPoly;
pub use constants::{cauchy_b_constants, cauchy_b_constants_in, macdonald_constants, orthogonality_norm, MacdonaldConstants};
pub use macdonald::{
    format_m_expansion, macdonald_expansion, macdonald_expansion_in, macdonald_poly, macdonald_poly_in, max_spread, MAX_N,
};
pub use monomial::{from_m_expansion, m_expand, monomial_sym};
pub use partition::{dominated_by, dominated_in_box, partitions_in_box, PartitionClass, SignedPartition};

/// Coefficients in the monomial basis, keyed by partition.
pub type MExpansion<F> = BTreeMap<SignedPartition, F>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetricError {
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("partitions have different lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("outside the supported envelope: {0}")]
    Envelope(String),
    #[error("polynomial is not symmetric")]
    NotSymmetric,
    #[error("eigenvalue collision between {0} and {1}")]
    Degenerate(SignedPartition, SignedPartition),
    #[error("Cauchy expansion is not diagonal at {0}, {1}")]
    NotDiagonal(SignedPartition, SignedPartition),
    #[error("degree cap {cap} is below |λ| = {size}")]
    DegreeCap { cap: usize, size: i64 },
    #[error("numerical evaluation failed: {0}")]
    Numeric(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}
