//! The full verification battery run by `erwhex verify`.

use std::time::Instant;

use serde::Serialize;

use super::fidelity::MomentRow;
use super::{
    run_claim1, run_claim2, run_clt, run_kernel_consistency, run_lln, run_moment_identities,
    run_oracle_consistency, run_sampler_fidelity, BiasedSignSource, Check, Claim1Report,
    Claim2Report, CltReport, ExperimentConfig, HistorySource, LlnReport, SamplerKind, Tally,
    TrajectorySource, DEFAULT_SIGNIFICANCE,
};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Settings for the battery. Every suite has pre-registered grids and
/// sample sizes; `p_grid`, when set, replaces the p values of every suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryConfig {
    pub base_seed: u64,
    pub significance: f64,
    pub p_grid: Option<Vec<f64>>,
    /// Sign bias of the negative-control sampler used for the sign suite.
    pub negative_control: Option<f64>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            base_seed: 20_240_601,
            significance: DEFAULT_SIGNIFICANCE,
            p_grid: None,
            negative_control: None,
        }
    }
}

impl BatteryConfig {
    fn suite(&self, name: &str, p: &[f64], n: &[u64], reps: u64) -> ExperimentConfig {
        ExperimentConfig {
            p_grid: self.p_grid.clone().unwrap_or_else(|| p.to_vec()),
            n_grid: n.to_vec(),
            replications: reps,
            base_seed: derive_seed(self.base_seed, name),
            significance: self.significance,
        }
    }

    /// The pre-registered experiment for each named suite.
    pub fn suites(&self) -> BatterySuites {
        BatterySuites {
            kernel: self.suite("kernel", &[0.0, 0.3, 1.0], &[4], 1),
            oracle: self.suite("oracle", &[0.0, 0.3, 0.5, 0.9, 1.0], &[20], 1),
            fidelity: self.suite("fidelity", &[0.0, 0.5, 1.0], &[6], 1_000_000),
            claim1: self.suite("claim1", &[0.5, 0.9], &[100_000], 1),
            claim2: self.suite(
                "claim2",
                &[0.0, 0.3, 0.5, 0.9, 1.0],
                &[10_000, 100_000, 1_000_000],
                10_000,
            ),
            lln: self.suite("lln", &[0.0, 0.5, 1.0], &[100, 1_000, 10_000], 10_000),
            clt: self.suite("clt", &[0.0, 0.5, 0.9], &[10_000], 100_000),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(b) = self.negative_control {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::Config(format!(
                    "negative-control bias {b} is outside [0, 1]"
                )));
            }
        }
        let s = self.suites();
        for cfg in [
            &s.kernel,
            &s.oracle,
            &s.fidelity,
            &s.claim1,
            &s.claim2,
            &s.lln,
            &s.clt,
        ] {
            cfg.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatterySuites {
    pub kernel: ExperimentConfig,
    pub oracle: ExperimentConfig,
    pub fidelity: ExperimentConfig,
    pub claim1: ExperimentConfig,
    pub claim2: ExperimentConfig,
    pub lln: ExperimentConfig,
    pub clt: ExperimentConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteTiming {
    pub suite: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryReport {
    pub config: BatteryConfig,
    pub suites: BatterySuites,
    pub checks: Vec<Check>,
    pub tally: Tally,
    pub moments: Vec<MomentRow>,
    pub claim1: Claim1Report,
    pub claim2: Claim2Report,
    pub lln: LlnReport,
    pub clt: CltReport,
    /// Wall-clock per suite; not part of the reproducible outputs.
    #[serde(skip)]
    pub timings: Vec<SuiteTiming>,
}

/// Runs every suite in a fixed order; `progress` is called after each one.
pub fn run_battery(
    config: &BatteryConfig,
    mut progress: impl FnMut(&str, f64, &[Check]),
) -> Result<BatteryReport> {
    config.validate()?;
    let suites = config.suites();
    let mut checks = Vec::new();
    let mut timings = Vec::new();
    let mut timed = |name: &str, new: Vec<Check>, started: Instant, checks: &mut Vec<Check>| {
        let seconds = started.elapsed().as_secs_f64();
        progress(name, seconds, &new);
        timings.push(SuiteTiming {
            suite: name.to_string(),
            seconds,
        });
        checks.extend(new);
    };

    let t = Instant::now();
    let new = run_kernel_consistency(&suites.kernel.p_grid, suites.kernel.n_grid[0])?;
    timed("kernel", new, t, &mut checks);

    let t = Instant::now();
    let new = run_oracle_consistency(&suites.oracle.p_grid, suites.oracle.n_grid[0])?;
    timed("oracle", new, t, &mut checks);

    let t = Instant::now();
    let (moments, new) = run_moment_identities(&suites.oracle.p_grid, suites.oracle.n_grid[0])?;
    timed("moments", new, t, &mut checks);

    let t = Instant::now();
    let new = run_sampler_fidelity(&suites.fidelity, &SamplerKind::ALL)?;
    timed("fidelity", new, t, &mut checks);

    let t = Instant::now();
    let biased;
    let source: &dyn TrajectorySource = match config.negative_control {
        Some(bias) => {
            biased = BiasedSignSource { bias };
            &biased
        }
        None => &HistorySource,
    };
    let claim1 = run_claim1(&suites.claim1, source)?;
    timed("claim1", claim1.checks.clone(), t, &mut checks);

    let t = Instant::now();
    let claim2 = run_claim2(&suites.claim2)?;
    timed("claim2", claim2.checks.clone(), t, &mut checks);

    let t = Instant::now();
    let lln = run_lln(&suites.lln, SamplerKind::Counts)?;
    timed("lln", lln.checks.clone(), t, &mut checks);

    let t = Instant::now();
    let clt = run_clt(&suites.clt, SamplerKind::Counts)?;
    timed("clt", clt.checks.clone(), t, &mut checks);

    let tally = Tally::of(&checks);
    Ok(BatteryReport {
        config: config.clone(),
        suites,
        checks,
        tally,
        moments,
        claim1,
        claim2,
        lln,
        clt,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suites_match_registered_sizes() {
        let s = BatteryConfig::default().suites();
        assert_eq!(s.fidelity.replications, 1_000_000);
        assert_eq!(s.fidelity.n_grid, vec![6]);
        assert_eq!(s.clt.replications, 100_000);
        assert_eq!(s.clt.p_grid, vec![0.0, 0.5, 0.9]);
        assert_eq!(s.claim1.n_grid, vec![100_000]);
        assert_eq!(s.lln.n_grid, vec![100, 1_000, 10_000]);
    }

    #[test]
    fn p_override_reaches_every_suite() {
        let cfg = BatteryConfig {
            p_grid: Some(vec![1.0]),
            ..BatteryConfig::default()
        };
        let s = cfg.suites();
        for suite in [
            &s.kernel,
            &s.oracle,
            &s.fidelity,
            &s.claim1,
            &s.claim2,
            &s.lln,
            &s.clt,
        ] {
            assert_eq!(suite.p_grid, vec![1.0]);
        }
        let bad = BatteryConfig {
            p_grid: Some(vec![2.0]),
            ..BatteryConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
