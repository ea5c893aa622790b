use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::torus::{QuadConfig, QuadResult};
use crate::scalar_ring::HPComplex;

/// Denominator floor of the relative residual.
pub const RESIDUAL_FLOOR: f64 = 1e-30;

pub const DEFAULT_VERIFY_PRECISION: u32 = 128;

/// |lhs − rhs| / max(|lhs|, |rhs|, 1e-30).
pub fn relative_residual(lhs: &HPComplex, rhs: &HPComplex) -> f64 {
    lhs.rel_diff(rhs, RESIDUAL_FLOOR)
}

/// Precision and quadrature settings shared by the verifiers.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub prec: u32,
    pub quad: QuadConfig,
    /// overrides the identity's default pass threshold
    pub threshold: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            prec: DEFAULT_VERIFY_PRECISION,
            quad: QuadConfig { start: 16, cap: 256, tol: 1e-14 },
            threshold: None,
        }
    }
}

impl VerifyConfig {
    pub fn threshold_or(&self, default: f64) -> f64 {
        self.threshold.unwrap_or(default)
    }
}

/// A secondary comparison carried by a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub lhs: HPComplex,
    pub rhs: HPComplex,
    pub rel_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub n: usize,
    /// k (operator order) or m (Rains), where the identity has one
    pub index: Option<i64>,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, HPComplex>,
    /// points per dimension of every quadrature that contributed
    pub quad_points: Vec<usize>,
    pub lhs: HPComplex,
    pub rhs: HPComplex,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub checks: Vec<SubCheck>,
    pub precision_bits: u32,
    pub wall_time_ms: f64,
}

impl VerificationReport {
    /// Largest relative residual over the main comparison and all subchecks.
    pub fn worst_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.rel_residual).fold(self.rel_residual, f64::max)
    }
}

pub(crate) struct ReportBuilder {
    identity: String,
    n: usize,
    index: Option<i64>,
    seed: Option<u64>,
    prec: u32,
    parameters: BTreeMap<String, HPComplex>,
    quad_points: Vec<usize>,
    checks: Vec<SubCheck>,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(identity: &str, n: usize, index: Option<i64>, seed: Option<u64>, prec: u32) -> Self {
        ReportBuilder {
            identity: identity.into(),
            n,
            index,
            seed,
            prec,
            parameters: BTreeMap::new(),
            quad_points: Vec::new(),
            checks: Vec::new(),
            start: Instant::now(),
        }
    }

    pub fn param(&mut self, name: &str, v: &HPComplex) {
        self.parameters.insert(name.into(), v.clone());
    }

    pub fn params(&mut self, prefix: &str, v: &[HPComplex]) {
        for (j, z) in v.iter().enumerate() {
            self.parameters.insert(format!("{prefix}_{}", j + 1), z.clone());
        }
    }

    pub fn quad(&mut self, r: &QuadResult) -> HPComplex {
        self.quad_points.push(r.points_per_dim);
        r.value.clone()
    }

    pub fn check(&mut self, name: &str, lhs: HPComplex, rhs: HPComplex, threshold: f64) {
        let rel_residual = relative_residual(&lhs, &rhs);
        self.checks.push(SubCheck { name: name.into(), lhs, rhs, rel_residual, pass: rel_residual < threshold });
    }

    pub fn finish(self, lhs: HPComplex, rhs: HPComplex, threshold: f64) -> VerificationReport {
        let abs_residual = (&lhs - &rhs).abs_f64();
        let rel_residual = relative_residual(&lhs, &rhs);
        let pass = rel_residual < threshold && self.checks.iter().all(|c| c.pass);
        VerificationReport {
            identity: self.identity,
            n: self.n,
            index: self.index,
            seed: self.seed,
            parameters: self.parameters,
            quad_points: self.quad_points,
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            threshold,
            pass,
            checks: self.checks,
            precision_bits: self.prec,
            wall_time_ms: self.start.elapsed().as_secs_f64() * 1e3,
        }
    }
}
