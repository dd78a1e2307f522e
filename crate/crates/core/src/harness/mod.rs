//! Monte Carlo experiments and the verification battery.
//!
//! Every experiment takes an [`ExperimentConfig`] and returns plain tables
//! plus a list of [`Check`]s. Replication `r` always runs on stream `r` of a
//! seed derived from the base seed and the experiment name, and per-replica
//! results are collected in index order, so outputs do not depend on the
//! number of worker threads.

mod battery;
mod claims;
mod fidelity;
mod limits;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::counts::CountVector6;
use crate::error::{check_memory, Error, Result};
use crate::rng::{stream_rng, StreamRng};
use crate::urn::simulate_decomposed_counts_with;
use crate::walk::{simulate_counts_with, simulate_history_with, Trajectory};

pub use battery::{run_battery, BatteryConfig, BatteryReport, BatterySuites, SuiteTiming};
pub use claims::{run_claim1, run_claim2, Claim1Report, Claim1Row, Claim2Report, Claim2Row};
pub use fidelity::{
    brute_force_step_distribution, run_axis_marginal, run_kernel_consistency,
    run_moment_identities, run_oracle_consistency, run_sampler_fidelity, MomentReportRow,
    MomentRow,
};
pub use limits::{
    gaussian_limit_applies, run_clt, run_lln, CltReport, CltRow, HistogramBin, LlnReport, LlnRow,
};

/// Default significance level of every hypothesis test.
pub const DEFAULT_SIGNIFICANCE: f64 = 1e-3;

/// Two-sided Gaussian tail beyond 4 standard deviations.
pub const FOUR_SIGMA_RATE: f64 = 6.334e-5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub p_grid: Vec<f64>,
    pub n_grid: Vec<u64>,
    pub replications: u64,
    pub base_seed: u64,
    pub significance: f64,
}

impl ExperimentConfig {
    pub fn new(p_grid: Vec<f64>, n_grid: Vec<u64>, replications: u64, base_seed: u64) -> Self {
        ExperimentConfig {
            p_grid,
            n_grid,
            replications,
            base_seed,
            significance: DEFAULT_SIGNIFICANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_grid.is_empty() || self.n_grid.is_empty() {
            return Err(Error::Config("p_grid and n_grid must be non-empty".into()));
        }
        for &p in &self.p_grid {
            check_memory(p)?;
        }
        if self.n_grid.contains(&0) {
            return Err(Error::EmptyHorizon);
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::Config(format!(
                "significance {} is outside (0, 1)",
                self.significance
            )));
        }
        Ok(())
    }
}

/// Which sampler produces the walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    History,
    Counts,
    Decomposed,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 3] = [
        SamplerKind::History,
        SamplerKind::Counts,
        SamplerKind::Decomposed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::History => "history",
            SamplerKind::Counts => "counts",
            SamplerKind::Decomposed => "decomposed",
        }
    }

    pub fn final_counts(self, p: f64, n: u64, rng: &mut StreamRng) -> Result<CountVector6> {
        match self {
            SamplerKind::History => Ok(simulate_history_with(p, n, rng)?.counts()),
            SamplerKind::Counts => simulate_counts_with(p, n, rng),
            SamplerKind::Decomposed => simulate_decomposed_counts_with(p, n, rng),
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "history" => Ok(SamplerKind::History),
            "counts" => Ok(SamplerKind::Counts),
            "decomposed" => Ok(SamplerKind::Decomposed),
            other => Err(Error::Config(format!("unknown sampler mode {other:?}"))),
        }
    }
}

/// Anything that can produce full trajectories for the sign/axis tests.
pub trait TrajectorySource: Sync {
    fn name(&self) -> &str;

    fn sample(&self, p: f64, n: u64, rng: &mut StreamRng) -> Result<Trajectory>;
}

/// The literal full-history sampler.
#[derive(Clone, Copy, Debug, Default)]
pub struct HistorySource;

impl TrajectorySource for HistorySource {
    fn name(&self) -> &str {
        "history"
    }

    fn sample(&self, p: f64, n: u64, rng: &mut StreamRng) -> Result<Trajectory> {
        simulate_history_with(p, n, rng)
    }
}

/// Negative-control fixture: the history sampler with each step's sign
/// forced to `+1` with probability `bias`. The sign tests must flag it.
#[derive(Clone, Copy, Debug)]
pub struct BiasedSignSource {
    pub bias: f64,
}

impl TrajectorySource for BiasedSignSource {
    fn name(&self) -> &str {
        "biased-sign"
    }

    fn sample(&self, p: f64, n: u64, rng: &mut StreamRng) -> Result<Trajectory> {
        use rand::Rng;
        let t = simulate_history_with(p, n, rng)?;
        let steps = t
            .steps()
            .iter()
            .map(|&d| {
                let (_, axis) = d.axis_sign_decompose();
                if rng.gen::<f64>() < self.bias {
                    crate::lattice::Direction::recompose(crate::lattice::Sign::Plus, axis)
                } else {
                    d
                }
            })
            .collect();
        Ok(Trajectory::from_steps(steps))
    }
}

/// Runs `f` once per replication on stream `r` of `seed`; results come back
/// in replication order.
pub fn replicate<T, F>(reps: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync + Send,
{
    (0..reps)
        .into_par_iter()
        .map(|r| f(&mut stream_rng(seed, r)))
        .collect()
}

/// Integer histogram over `cells` buckets; `f` returns the bucket index of
/// one replication. Integer sums make the merge order irrelevant.
pub fn replicate_histogram<F>(reps: u64, seed: u64, cells: usize, f: F) -> Vec<u64>
where
    F: Fn(&mut StreamRng) -> usize + Sync + Send,
{
    (0..reps)
        .into_par_iter()
        .fold(
            || vec![0u64; cells],
            |mut h, r| {
                h[f(&mut stream_rng(seed, r))] += 1;
                h
            },
        )
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// How a check's failure should be read.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Deterministic identity; must always hold.
    Exact,
    /// Fixed numeric tolerance on a Monte Carlo estimate.
    Tolerance,
    /// Hypothesis test at the given significance.
    Significance(f64),
    /// Four-standard-error bound.
    FourSigma,
    /// Monotone-trend requirement on a single path.
    Trend,
}

impl CheckKind {
    /// Nominal probability of failing when the model is correct.
    pub fn nominal_rate(self) -> f64 {
        match self {
            CheckKind::Significance(a) => a,
            CheckKind::FourSigma => FOUR_SIGMA_RATE,
            _ => 0.0,
        }
    }

    pub fn is_statistical(self) -> bool {
        matches!(self, CheckKind::Significance(_) | CheckKind::FourSigma)
    }

    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Exact => "exact",
            CheckKind::Tolerance => "tolerance",
            CheckKind::Significance(_) => "significance",
            CheckKind::FourSigma => "four_sigma",
            CheckKind::Trend => "trend",
        }
    }
}

/// One named pass/fail outcome with its statistic and threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub p: Option<f64>,
    pub n: Option<u64>,
    #[serde(serialize_with = "number_or_label")]
    pub statistic: f64,
    /// `inf` for a test that cannot reject (e.g. zero degrees of freedom).
    #[serde(serialize_with = "number_or_label")]
    pub threshold: f64,
    pub kind: CheckKind,
    pub passed: bool,
}

/// JSON has no infinities; write them as `"inf"`, `"-inf"` or `"nan"`.
fn number_or_label<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&x.to_string().to_lowercase())
    }
}

impl Check {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        suite: &str,
        name: impl Into<String>,
        p: Option<f64>,
        n: Option<u64>,
        statistic: f64,
        threshold: f64,
        kind: CheckKind,
        passed: bool,
    ) -> Self {
        Check {
            suite: suite.to_string(),
            name: name.into(),
            p,
            n,
            statistic,
            threshold,
            kind,
            passed,
        }
    }

    /// `|statistic| <= threshold`.
    pub fn bound(
        suite: &str,
        name: impl Into<String>,
        p: Option<f64>,
        n: Option<u64>,
        statistic: f64,
        threshold: f64,
        kind: CheckKind,
    ) -> Self {
        let passed = statistic.abs() <= threshold;
        Check::new(suite, name, p, n, statistic, threshold, kind, passed)
    }
}

/// Rejection tally under the multiple-testing policy: deterministic and
/// tolerance checks must all pass; statistical rejections may not exceed
/// twice their expected false-positive count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tally {
    pub checks: usize,
    pub statistical_checks: usize,
    pub hypothesis_tests: usize,
    pub statistical_rejections: usize,
    pub expected_false_positives: f64,
    pub deterministic_failures: usize,
    pub passed: bool,
}

impl Tally {
    pub fn of(checks: &[Check]) -> Self {
        let statistical: Vec<&Check> = checks.iter().filter(|c| c.kind.is_statistical()).collect();
        let statistical_rejections = statistical.iter().filter(|c| !c.passed).count();
        let expected_false_positives: f64 = statistical.iter().map(|c| c.kind.nominal_rate()).sum();
        let deterministic_failures = checks
            .iter()
            .filter(|c| !c.kind.is_statistical() && !c.passed)
            .count();
        Tally {
            checks: checks.len(),
            statistical_checks: statistical.len(),
            hypothesis_tests: checks
                .iter()
                .filter(|c| matches!(c.kind, CheckKind::Significance(_)))
                .count(),
            statistical_rejections,
            expected_false_positives,
            deterministic_failures,
            passed: deterministic_failures == 0
                && (statistical_rejections as f64) <= 2.0 * expected_false_positives,
        }
    }
}
