use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ruijsenaars_core::quadrature_verify::{IdentityArgs, QuadConfig, VerifyConfig, DEFAULT_VERIFY_PRECISION, IDENTITIES};
use ruijsenaars_core::scalar_ring::MIN_PRECISION;
use ruijsenaars_core::symmetric_core::SignedPartition;

use crate::CliError;

/// Default precision is read from this variable when neither the config nor a flag sets it.
pub const PRECISION_ENV: &str = "RUIJSENAARS_PRECISION";

pub const DEFAULT_TOLERANCE: f64 = 1e-14;
pub const DEFAULT_QUAD_CAP: usize = 256;
pub const DEFAULT_SEED_COUNT: u64 = 3;

/// Either a seed count (seeds 0..k) or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    pub fn expand(&self) -> Vec<u64> {
        match self {
            Seeds::Count(k) => (0..*k).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

/// One identity to run, with optional per-identity overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySelection {
    pub id: String,
    #[serde(default = "default_n")]
    pub n: usize,
    /// operator order k, or m for the Rains transform
    #[serde(default)]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<SignedPartition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Seeds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_cap: Option<usize>,
}

fn default_n() -> usize {
    2
}

impl IdentitySelection {
    pub fn new(id: &str, n: usize, k: usize) -> Self {
        IdentitySelection { id: id.into(), n, k, lambda: None, seeds: None, threshold: None, quad_cap: None }
    }

    pub fn args(&self) -> IdentityArgs {
        IdentityArgs { n: self.n, k: self.k, lambda: self.lambda.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub precision_bits: u32,
    /// relative convergence tolerance of the torus quadrature
    pub tolerance: f64,
    pub quad_cap: usize,
    pub seeds: Seeds,
    #[serde(rename = "identity")]
    pub identities: Vec<IdentitySelection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// The file form: every field optional so that flags can fill the gaps.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub precision_bits: Option<u32>,
    pub tolerance: Option<f64>,
    pub quad_cap: Option<usize>,
    pub seeds: Option<Seeds>,
    #[serde(default, rename = "identity")]
    pub identities: Vec<IdentitySelection>,
    pub output: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }
}

/// Flag values; each one that is set wins over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub precision_bits: Option<u32>,
    pub tolerance: Option<f64>,
    pub quad_cap: Option<usize>,
    pub seeds: Option<u64>,
    pub identity: Option<IdentitySelection>,
    pub threshold: Option<f64>,
    pub output: Option<PathBuf>,
}

pub fn env_precision() -> Result<Option<u32>, CliError> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{PRECISION_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

impl SuiteConfig {
    pub fn resolve(file: ConfigFile, flags: Overrides) -> Result<Self, CliError> {
        let precision_bits = match flags.precision_bits.or(file.precision_bits) {
            Some(p) => p,
            None => env_precision()?.unwrap_or(DEFAULT_VERIFY_PRECISION),
        };
        let mut identities = match flags.identity {
            Some(sel) => vec![sel],
            None => file.identities,
        };
        if let Some(thr) = flags.threshold {
            for sel in &mut identities {
                sel.threshold = Some(thr);
            }
        }
        let cfg = SuiteConfig {
            precision_bits,
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(DEFAULT_TOLERANCE),
            quad_cap: flags.quad_cap.or(file.quad_cap).unwrap_or(DEFAULT_QUAD_CAP),
            seeds: flags.seeds.map(Seeds::Count).or(file.seeds).unwrap_or(Seeds::Count(DEFAULT_SEED_COUNT)),
            identities,
            output: flags.output.or(file.output),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.precision_bits < MIN_PRECISION {
            return usage(format!("precision_bits = {} is below the minimum {MIN_PRECISION}", self.precision_bits));
        }
        let floor = 2f64.powi(8 - self.precision_bits as i32);
        if !(self.tolerance > floor) {
            return usage(format!(
                "tolerance {:e} must exceed 2^-(precision_bits-8) = {floor:e}",
                self.tolerance
            ));
        }
        if self.quad_cap < 16 || !self.quad_cap.is_power_of_two() {
            return usage(format!("quad_cap = {} must be a power of two ≥ 16", self.quad_cap));
        }
        if self.identities.is_empty() {
            return usage("no identities selected".into());
        }
        for sel in &self.identities {
            if !IDENTITIES.iter().any(|(id, _)| *id == sel.id) {
                return usage(format!("unknown identity '{}'", sel.id));
            }
            if sel.n == 0 {
                return usage(format!("{}: n must be positive", sel.id));
            }
            if let Some(cap) = sel.quad_cap {
                if cap < 16 || !cap.is_power_of_two() {
                    return usage(format!("{}: quad_cap = {cap} must be a power of two ≥ 16", sel.id));
                }
            }
            if let Some(l) = &sel.lambda {
                if l.n() != sel.n {
                    return usage(format!("{}: λ = {l} does not have n = {} parts", sel.id, sel.n));
                }
            }
            let seeds = sel.seeds.as_ref().unwrap_or(&self.seeds);
            if seeds.expand().is_empty() {
                return usage(format!("{}: no seeds", sel.id));
            }
        }
        Ok(())
    }

    pub fn verify_config(&self, sel: &IdentitySelection) -> VerifyConfig {
        VerifyConfig {
            prec: self.precision_bits,
            quad: QuadConfig { start: 16, cap: sel.quad_cap.unwrap_or(self.quad_cap), tol: self.tolerance },
            threshold: sel.threshold,
        }
    }

    pub fn seeds_for(&self, sel: &IdentitySelection) -> Vec<u64> {
        sel.seeds.as_ref().unwrap_or(&self.seeds).expand()
    }
}
