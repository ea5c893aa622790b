//! Torus quadrature and numerical verification of the integral identities.

mod dixon;
mod kernels;
mod report;
mod residue;
mod sampling;
mod spectral;
mod torus;
mod verify;

use thiserror::Error;

use crate::elliptic_core::EllipticError;
use crate::elliptic_spectral::SpectralError;
use crate::operator_core::OperatorError;
use crate::scalar_ring::HPComplex;
use crate::symmetric_core::{monomial_sym, SignedPartition, SymmetricError};

pub use dixon::{dixon_integral, kappa, DixonSpec};
pub use kernels::{kernel_kcd, q_apply_numeric, Integrand, KernelVariant, QKernel};
pub use report::{
    relative_residual, SubCheck, VerificationReport, VerifyConfig, DEFAULT_VERIFY_PRECISION, RESIDUAL_FLOOR,
};
pub use residue::{
    check_hypotheses, circle_residue, continuation_matches_torus, noumi_sano_side, pole_location, q_continued_n2,
    residue_noumi_sano, LATTICE_SPAN,
};
pub use sampling::{Sampler, MAX_RETRIES};
pub use spectral::{elliptic_macdonald_value, q_eigen_spread, PhiLemma, PHI_MAX_ORDER};
pub use torus::{torus_integrate, torus_integrate_fixed, QuadConfig, QuadResult, TorusDomain, DEFAULT_CAP};
pub use verify::{
    default_test_function, verify_grry, verify_qd_commutation, verify_qhqp, verify_rains, verify_theta_identity,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge with {points_per_dim} points per dimension (value {value}, relative change {change:e})")]
    Convergence { points_per_dim: usize, value: String, change: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("sample outside the admissible region: {0}")]
    Region(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
    #[error(transparent)]
    Spectral(Box<SpectralError>),
}

impl From<SpectralError> for QuadratureError {
    fn from(e: SpectralError) -> Self {
        QuadratureError::Spectral(Box::new(e))
    }
}

/// Registered identity ids, in listing order.
pub const IDENTITIES: [(&str, &str); 7] = [
    ("theta-identity", "x ↔ y symmetry of the |I| = k theta function sum"),
    ("rains", "I_n^m(a;b) = ∏Γ(a_i b_j) I_m^n(pq/sb; s/a)"),
    ("grry", "K_cd = K_dc, with the J_n form and its symmetries"),
    ("qhqp", "K₁ = K₂ for the kernel of [Q_c, Q̃_d]"),
    ("qd-commutation", "D^(k) Q_c f = Q_c D^(k) f"),
    ("residue", "Res_{c=q^{-k/n}} Q_c f against the Noumi–Sano operator"),
    ("phi-lemma", "p = 0 eigenvalue φ_λ(c) of Q_c on P_λ"),
];

/// Arguments of a registered identity beyond the seed.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityArgs {
    pub n: usize,
    /// operator order k, or m for the Rains transform
    pub k: usize,
    /// λ for phi-lemma, or f = m_λ for residue
    pub lambda: Option<SignedPartition>,
}

fn sampled_y(smp: &mut Sampler, n: usize) -> Vec<HPComplex> {
    let r = HPComplex::one(smp.prec());
    smp.constrained(n, &r, 1.08)
}

/// Runs one registered identity at one seed.
pub fn run_identity(
    id: &str,
    args: &IdentityArgs,
    seed: u64,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, QuadratureError> {
    let n = args.n;
    match id {
        "theta-identity" => verify_theta_identity(n, args.k, seed, cfg),
        "rains" => verify_rains(n, args.k, seed, cfg),
        "grry" => verify_grry(n, seed, cfg),
        "qhqp" => verify_qhqp(n, seed, cfg),
        "qd-commutation" => verify_qd_commutation(n, args.k, seed, None, cfg),
        "residue" => {
            let mut smp = Sampler::new(seed, cfg.prec);
            let p = smp.point(0.005, 0.02);
            let q = smp.point(0.25, 0.4);
            let t = smp.point(0.05, 0.12);
            let y = sampled_y(&mut smp, n);
            let lambda = match &args.lambda {
                Some(l) => l.clone(),
                None => SignedPartition::new(vec![0; n])?,
            };
            if lambda.n() != n {
                return Err(QuadratureError::Precondition(format!("λ = {lambda} does not have {n} parts")));
            }
            let f = monomial_sym(&lambda, &HPComplex::zero(cfg.prec));
            residue_noumi_sano(args.k, &f, &y, &p, &q, &t, Some(seed), cfg)
        }
        "phi-lemma" => {
            let mut smp = Sampler::new(seed, cfg.prec);
            let q = smp.point(0.2, 0.5);
            let t = smp.point(0.2, 0.6);
            let c = smp.point(0.05, 0.3);
            let y = sampled_y(&mut smp, n);
            let lambda = match &args.lambda {
                Some(l) => l.clone(),
                None => SignedPartition::new(vec![0; n])?,
            };
            let mut r = PhiLemma::new(&lambda, &q, &t, PHI_MAX_ORDER, cfg)?.check(&c, &y, cfg)?;
            r.seed = Some(seed);
            Ok(r)
        }
        other => Err(QuadratureError::Precondition(format!("unknown identity '{other}'"))),
    }
}
