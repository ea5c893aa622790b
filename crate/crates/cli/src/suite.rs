use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ruijsenaars_core::quadrature_verify::{run_identity, VerificationReport};

use crate::config::{IdentitySelection, SuiteConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedError {
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRun {
    pub selection: IdentitySelection,
    pub reports: Vec<VerificationReport>,
    /// verifier failures that produced no report
    pub errors: Vec<SeedError>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub config: SuiteConfig,
    pub runs: Vec<IdentityRun>,
    pub summary: Summary,
    pub wall_time_ms: f64,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }

    /// 0 if everything passed, 3 on any infrastructure error, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.summary.errors > 0 {
            3
        } else if self.summary.failed > 0 {
            1
        } else {
            0
        }
    }
}

/// Runs every (identity, seed) pair; jobs run concurrently, results are merged in config order.
pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let jobs: Vec<(usize, u64)> = config
        .identities
        .iter()
        .enumerate()
        .flat_map(|(i, sel)| config.seeds_for(sel).into_iter().map(move |s| (i, s)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let sel = &config.identities[i];
            (i, seed, run_identity(&sel.id, &sel.args(), seed, &config.verify_config(sel)))
        })
        .collect();
    let mut runs: Vec<IdentityRun> = config
        .identities
        .iter()
        .map(|sel| IdentityRun { selection: sel.clone(), reports: Vec::new(), errors: Vec::new() })
        .collect();
    let mut summary = Summary::default();
    for (i, seed, res) in results {
        summary.total += 1;
        match res {
            Ok(r) => {
                if r.pass {
                    summary.passed += 1;
                } else {
                    summary.failed += 1;
                }
                runs[i].reports.push(r);
            }
            Err(e) => {
                summary.errors += 1;
                runs[i].errors.push(SeedError { seed, message: e.to_string() });
            }
        }
    }
    SuiteReport {
        schema_version: SCHEMA_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        runs,
        summary,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ConfigFile, Overrides};

    #[test]
    fn theta_suite_passes() {
        let flags = Overrides {
            identity: Some(IdentitySelection::new("theta-identity", 2, 1)),
            precision_bits: Some(128),
            seeds: Some(2),
            ..Default::default()
        };
        let cfg = SuiteConfig::resolve(ConfigFile::default(), flags).unwrap();
        let rep = run_suite(&cfg);
        assert_eq!(rep.summary, Summary { total: 2, passed: 2, failed: 0, errors: 0 });
        assert_eq!(rep.exit_code(), 0);
        assert_eq!(rep.runs[0].reports.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![Some(0), Some(1)]);
    }
}
