//! Elliptic special functions, Ruijsenaars difference operators, Macdonald
//! polynomials and numerical verification of Q-operator identities.

pub mod scalar_ring;
pub mod elliptic_core;
pub mod symmetric_core;
pub mod operator_core;
pub mod elliptic_spectral;
pub mod quadrature_verify;
