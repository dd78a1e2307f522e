//! Sign independence and axis equidistribution.

use serde::Serialize;

use super::{replicate, Check, CheckKind, ExperimentConfig, TrajectorySource};
use crate::error::Result;
use crate::lattice::{Axis, Sign};
use crate::rng::{derive_seed, stream_rng};
use crate::stats::{autocorrelation, chi_square_independence, mean_and_stderr};
use crate::urn::{decompose_trajectory, simulate_urn_counts_with, simulate_urn_final_with};

pub const MAX_LAG: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim1Row {
    pub p: f64,
    pub n: u64,
    pub plus_fraction: f64,
    pub autocorrelations: [f64; MAX_LAG],
    pub sign_axis_chi_square: f64,
    /// `(visits, plus fraction)` of the sign sub-stream on each axis.
    pub axis_substreams: [(u64, f64); 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim1Report {
    pub source: String,
    pub rows: Vec<Claim1Row>,
    pub checks: Vec<Check>,
}

fn plus_fraction(signs: impl Iterator<Item = Sign>) -> (u64, f64) {
    let (mut n, mut plus) = (0u64, 0u64);
    for s in signs {
        n += 1;
        plus += u64::from(s == Sign::Plus);
    }
    (n, if n > 0 { plus as f64 / n as f64 } else { 0.5 })
}

/// Sign-process tests on one trajectory per `(p, n)`: fair-coin frequency,
/// lag-1..4 autocorrelation, sign/axis independence and fairness of the
/// sign sub-stream read at each axis's visit times.
pub fn run_claim1(
    config: &ExperimentConfig,
    source: &dyn TrajectorySource,
) -> Result<Claim1Report> {
    config.validate()?;
    let alpha = config.significance;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &p in &config.p_grid {
        for &n in &config.n_grid {
            let seed = derive_seed(config.base_seed, &format!("claim1/{p}/{n}"));
            let t = source.sample(p, n, &mut stream_rng(seed, 0))?;
            let (signs, axes, times) = decompose_trajectory(&t);
            let nf = n as f64;
            let (s, nn) = (Some(p), Some(n));

            let (_, plus) = plus_fraction(signs.0.iter().copied());
            checks.push(Check::bound(
                "claim1",
                "sign_frequency_minus_half",
                s,
                nn,
                plus - 0.5,
                4.0 / (2.0 * nf.sqrt()),
                CheckKind::FourSigma,
            ));

            let ys: Vec<f64> = signs.0.iter().map(|s| s.value() as f64).collect();
            let mut acf = [0.0; MAX_LAG];
            for (lag, slot) in acf.iter_mut().enumerate() {
                *slot = autocorrelation(&ys, lag + 1);
                checks.push(Check::bound(
                    "claim1",
                    format!("sign_autocorrelation_lag{}", lag + 1),
                    s,
                    nn,
                    *slot,
                    4.0 / nf.sqrt(),
                    CheckKind::FourSigma,
                ));
            }

            let mut table = vec![vec![0u64; 3]; 2];
            for (sign, axis) in signs.0.iter().zip(&axes.0) {
                table[usize::from(*sign == Sign::Minus)][axis.slot()] += 1;
            }
            let indep = chi_square_independence(&table, alpha)?;
            checks.push(Check::new(
                "claim1",
                format!("sign_axis_independence[df={}]", indep.degrees_of_freedom),
                s,
                nn,
                indep.statistic,
                indep.critical,
                CheckKind::Significance(alpha),
                !indep.reject,
            ));

            let mut substreams = [(0u64, 0.5f64); 3];
            for axis in Axis::ALL {
                let taus = times.for_axis(axis);
                let (visits, frac) = plus_fraction(taus.iter().map(|&t| signs.0[t as usize - 1]));
                substreams[axis.slot()] = (visits, frac);
                if visits > 0 {
                    checks.push(Check::bound(
                        "claim1",
                        format!("axis{}_substream_frequency_minus_half", axis.exponent()),
                        s,
                        nn,
                        frac - 0.5,
                        4.0 / (2.0 * (visits as f64).sqrt()),
                        CheckKind::FourSigma,
                    ));
                }
            }

            rows.push(Claim1Row {
                p,
                n,
                plus_fraction: plus,
                autocorrelations: acf,
                sign_axis_chi_square: indep.statistic,
                axis_substreams: substreams,
            });
        }
    }
    Ok(Claim1Report {
        source: source.name().to_string(),
        rows,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim2Row {
    pub p: f64,
    pub n: u64,
    /// `max_i |C_n^i/n - 1/3|` on the single reference path.
    pub path_deviation: f64,
    /// Replication means of `C_n^i/n` (only at the first horizon).
    pub replication_means: Option<[f64; 3]>,
    pub replication_stderrs: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim2Report {
    pub rows: Vec<Claim2Row>,
    pub checks: Vec<Check>,
}

/// Largest horizon at which a single path must already be within 0.01 of
/// equal axis shares, for `p ≤ 1/2`.
pub const CLAIM2_THRESHOLD: f64 = 0.01;

/// Axis equidistribution: replication means of `C_n^i/n` at the first
/// horizon of `n_grid`, and one long urn path read at every horizon.
///
/// For `p ≤ 1/2` the path must end within [`CLAIM2_THRESHOLD`]; for
/// `1/2 < p < 1` the deviation must strictly decrease along `n_grid`. At
/// `p = 1` the urn never leaves its first colour, so only the replication
/// mean is checked.
pub fn run_claim2(config: &ExperimentConfig) -> Result<Claim2Report> {
    config.validate()?;
    let mut n_grid = config.n_grid.clone();
    n_grid.sort_unstable();
    n_grid.dedup();
    let first = n_grid[0];
    let last = *n_grid.last().expect("validated non-empty");
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &p in &config.p_grid {
        let seed = derive_seed(config.base_seed, &format!("claim2/{p}"));
        let finals = replicate(config.replications, seed, |rng| {
            simulate_urn_final_with(first, p, rng).expect("validated parameters")
        });
        let mut means = [0.0; 3];
        let mut stderrs = [0.0; 3];
        for i in 0..3 {
            let shares: Vec<f64> = finals.iter().map(|c| c[i] as f64 / first as f64).collect();
            let (m, se) = if shares.len() > 1 {
                mean_and_stderr(&shares)
            } else {
                (shares[0], f64::INFINITY)
            };
            means[i] = m;
            stderrs[i] = se;
            checks.push(Check::bound(
                "claim2",
                format!("axis{}_replication_mean_minus_third", i + 1),
                Some(p),
                Some(first),
                m - 1.0 / 3.0,
                4.0 * se,
                CheckKind::FourSigma,
            ));
        }

        let path_seed = derive_seed(config.base_seed, &format!("claim2-path/{p}"));
        let path = simulate_urn_counts_with(last, p, &mut stream_rng(path_seed, 0))?;
        let deviations: Vec<f64> = n_grid
            .iter()
            .map(|&n| {
                let c = path[n as usize - 1];
                (0..3)
                    .map(|i| (c[i] as f64 / n as f64 - 1.0 / 3.0).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for (k, (&n, &dev)) in n_grid.iter().zip(&deviations).enumerate() {
            rows.push(Claim2Row {
                p,
                n,
                path_deviation: dev,
                replication_means: (k == 0).then_some(means),
                replication_stderrs: (k == 0).then_some(stderrs),
            });
        }
        if p <= 0.5 {
            checks.push(Check::bound(
                "claim2",
                "path_deviation_at_largest_n",
                Some(p),
                Some(last),
                deviations[deviations.len() - 1],
                CLAIM2_THRESHOLD,
                CheckKind::Tolerance,
            ));
        } else if p < 1.0 && deviations.len() > 1 {
            let worst_ratio = deviations
                .windows(2)
                .map(|w| w[1] / w[0])
                .fold(0.0, f64::max);
            let decreasing = deviations.windows(2).all(|w| w[1] < w[0]);
            checks.push(Check::new(
                "claim2",
                "path_deviation_strictly_decreasing(max_ratio)",
                Some(p),
                Some(last),
                worst_ratio,
                1.0,
                CheckKind::Trend,
                decreasing,
            ));
        }
    }
    Ok(Claim2Report { rows, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{BiasedSignSource, HistorySource};

    #[test]
    fn memoryless_signs_pass() {
        let cfg = ExperimentConfig::new(vec![0.0], vec![20_000], 1, 3);
        let report = run_claim1(&cfg, &HistorySource).unwrap();
        assert!(
            report.checks.iter().all(|c| c.passed),
            "{:?}",
            report.checks
        );
    }

    #[test]
    fn biased_signs_are_flagged() {
        let cfg = ExperimentConfig::new(vec![0.5], vec![20_000], 1, 3);
        let report = run_claim1(&cfg, &BiasedSignSource { bias: 0.1 }).unwrap();
        let freq = report
            .checks
            .iter()
            .find(|c| c.name == "sign_frequency_minus_half")
            .unwrap();
        assert!(!freq.passed);
    }

    #[test]
    fn full_memory_claim1_skips_unvisited_axes() {
        let cfg = ExperimentConfig::new(vec![1.0], vec![5_000], 1, 3);
        let report = run_claim1(&cfg, &HistorySource).unwrap();
        let visited = report.rows[0]
            .axis_substreams
            .iter()
            .filter(|s| s.0 > 0)
            .count();
        assert_eq!(visited, 1);
        assert!(
            report.checks.iter().all(|c| c.passed),
            "{:?}",
            report.checks
        );
    }

    #[test]
    fn claim2_small_run() {
        let cfg = ExperimentConfig::new(vec![0.3, 1.0], vec![1_000, 100_000], 500, 8);
        let report = run_claim2(&cfg).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(
            report.checks.iter().all(|c| c.passed),
            "{:?}",
            report.checks
        );
        // p = 1: no single-path check.
        assert!(report
            .checks
            .iter()
            .filter(|c| c.p == Some(1.0))
            .all(|c| c.name.contains("replication_mean")));
    }
}
