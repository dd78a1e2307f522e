//! Exact-oracle checks and sampler-versus-oracle goodness of fit.

use std::collections::HashMap;

use serde::Serialize;

use super::{replicate_histogram, Check, CheckKind, ExperimentConfig, SamplerKind};
use crate::counts::{CountVector3, CountVector6};
use crate::error::{check_memory, Result};
use crate::lattice::Direction;
use crate::oracle::{
    compositions, exact_axis_distribution, exact_count_distribution, exact_count_levels,
    CountDistribution, MomentReport, DEFAULT_CAP,
};
use crate::rng::derive_seed;
use crate::stats::chi_square_gof;
use crate::walk::{simulate_history_with, step_distribution};

/// Next-step law obtained by enumerating every branch of the step rule for
/// one history realising `c`: each past index (weight `1/n`), then copy
/// (`p/2`), reverse (`p/2`) or each of the six innovations (`(1-p)/6`).
pub fn brute_force_step_distribution(c: &CountVector6, p: f64) -> Result<[f64; 6]> {
    check_memory(p)?;
    let history: Vec<Direction> = Direction::ALL
        .iter()
        .flat_map(|&d| std::iter::repeat_n(d, c[d.index()] as usize))
        .collect();
    if history.is_empty() {
        return Ok([1.0 / 6.0; 6]);
    }
    let weight = 1.0 / history.len() as f64;
    let mut q = [0.0; 6];
    for past in &history {
        q[past.index()] += weight * p / 2.0;
        q[past.negate().index()] += weight * p / 2.0;
        for xi in Direction::ALL {
            q[xi.index()] += weight * (1.0 - p) / 6.0;
        }
    }
    Ok(q)
}

/// Closed-form kernel against branch enumeration for every count vector
/// with at most `max_total` steps.
pub fn run_kernel_consistency(p_grid: &[f64], max_total: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &p in p_grid {
        let mut worst = 0.0f64;
        let mut vectors = 0;
        for total in 0..=max_total {
            for c in compositions::<6>(total) {
                let closed = step_distribution(&c, p)?;
                let brute = brute_force_step_distribution(&c, p)?;
                for (a, b) in closed.iter().zip(brute) {
                    worst = worst.max((a - b).abs());
                }
                vectors += 1;
            }
        }
        checks.push(Check::bound(
            "kernel",
            format!("closed_form_vs_enumeration[{vectors} vectors]"),
            Some(p),
            Some(max_total),
            worst,
            1e-12,
            CheckKind::Exact,
        ));
    }
    Ok(checks)
}

/// Chapman–Kolmogorov, total mass and rotation invariance of the oracle at
/// every level up to `n_max`.
pub fn run_oracle_consistency(p_grid: &[f64], n_max: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &p in p_grid {
        let mut ck = 0.0f64;
        let mut mass = 0.0f64;
        let mut rotation = 0.0f64;
        let mut prev: Option<CountDistribution> = None;
        exact_count_levels(n_max, p, DEFAULT_CAP, |level| {
            mass = mass.max((level.total_mass() - 1.0).abs());
            for (c, m) in level.iter() {
                rotation = rotation.max((level.prob(&c.rotated(1)) - m).abs());
            }
            if let Some(prev) = &prev {
                let pulled = prev.pull_step();
                for c in pulled
                    .iter()
                    .map(|(c, _)| *c)
                    .chain(level.iter().map(|(c, _)| *c))
                {
                    ck = ck.max((pulled.prob(&c) - level.prob(&c)).abs());
                }
            }
            prev = Some(level.clone());
        })?;
        let n = Some(n_max);
        checks.push(Check::bound(
            "oracle",
            "chapman_kolmogorov_max_abs",
            Some(p),
            n,
            ck,
            1e-12,
            CheckKind::Exact,
        ));
        checks.push(Check::bound(
            "oracle",
            "total_mass_abs_error",
            Some(p),
            n,
            mass,
            1e-10,
            CheckKind::Exact,
        ));
        checks.push(Check::bound(
            "oracle",
            "rotation_invariance_max_abs",
            Some(p),
            n,
            rotation,
            1e-12,
            CheckKind::Exact,
        ));
    }
    Ok(checks)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub p: f64,
    pub n: u64,
    pub moments: MomentReportRow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentReportRow {
    pub mean_x: f64,
    pub mean_y: f64,
    pub second_moment_radius: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
}

impl From<MomentReport> for MomentReportRow {
    fn from(m: MomentReport) -> Self {
        MomentReportRow {
            mean_x: m.mean.0,
            mean_y: m.mean.1,
            second_moment_radius: m.second_moment_radius,
            var_x: m.component_variances.0,
            var_y: m.component_variances.1,
            cov_xy: m.component_covariance,
        }
    }
}

/// Exact moments `E S_n = 0`, `E|S_n|² = n`, `Var x = Var y = n/2`,
/// `Cov = 0` for `n = 1..=n_max`.
pub fn run_moment_identities(p_grid: &[f64], n_max: u64) -> Result<(Vec<MomentRow>, Vec<Check>)> {
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &p in p_grid {
        let (mut mean, mut radius, mut var, mut cov) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        exact_count_levels(n_max, p, DEFAULT_CAP, |level| {
            let m = level.moments();
            let n = level.n() as f64;
            mean = mean.max(m.mean.0.abs()).max(m.mean.1.abs());
            radius = radius.max((m.second_moment_radius - n).abs());
            var = var
                .max((m.component_variances.0 - n / 2.0).abs())
                .max((m.component_variances.1 - n / 2.0).abs());
            cov = cov.max(m.component_covariance.abs());
            rows.push(MomentRow {
                p,
                n: level.n(),
                moments: m.into(),
            });
        })?;
        let n = Some(n_max);
        checks.push(Check::bound(
            "moments",
            "mean_max_abs",
            Some(p),
            n,
            mean,
            1e-10,
            CheckKind::Exact,
        ));
        checks.push(Check::bound(
            "moments",
            "second_moment_minus_n_max_abs",
            Some(p),
            n,
            radius,
            1e-9,
            CheckKind::Exact,
        ));
        checks.push(Check::bound(
            "moments",
            "component_variance_minus_half_n_max_abs",
            Some(p),
            n,
            var,
            1e-9,
            CheckKind::Exact,
        ));
        checks.push(Check::bound(
            "moments",
            "covariance_max_abs",
            Some(p),
            n,
            cov,
            1e-9,
            CheckKind::Exact,
        ));
    }
    Ok((rows, checks))
}

fn index_of<const K: usize>(
    states: &[crate::counts::CountVector<K>],
) -> HashMap<crate::counts::CountVector<K>, usize> {
    states.iter().enumerate().map(|(i, c)| (*c, i)).collect()
}

/// Chi-square fit of final count-vector histograms to the exact oracle, one
/// test per (sampler, p, n).
pub fn run_sampler_fidelity(
    config: &ExperimentConfig,
    samplers: &[SamplerKind],
) -> Result<Vec<Check>> {
    config.validate()?;
    let mut checks = Vec::new();
    for &n in &config.n_grid {
        let states = compositions::<6>(n);
        let index = index_of(&states);
        for &p in &config.p_grid {
            let oracle = exact_count_distribution(n, p)?;
            let expected: Vec<f64> = states.iter().map(|c| oracle.prob(c)).collect();
            for &sampler in samplers {
                let seed = derive_seed(config.base_seed, &format!("fidelity/{sampler}/{p}/{n}"));
                let hist = replicate_histogram(config.replications, seed, states.len(), |rng| {
                    let c = sampler
                        .final_counts(p, n, rng)
                        .expect("validated parameters");
                    index[&c]
                });
                let out =
                    chi_square_gof(&hist, &expected, config.replications, config.significance)?;
                checks.push(Check::new(
                    "fidelity",
                    format!("chi_square_{sampler}[df={}]", out.degrees_of_freedom),
                    Some(p),
                    Some(n),
                    out.statistic,
                    out.critical,
                    CheckKind::Significance(config.significance),
                    !out.reject,
                ));
            }
        }
    }
    Ok(checks)
}

/// Axis counts extracted from full-history trajectories against the exact
/// three-colour urn law.
pub fn run_axis_marginal(config: &ExperimentConfig) -> Result<Vec<Check>> {
    config.validate()?;
    let mut checks = Vec::new();
    for &n in &config.n_grid {
        let states = compositions::<3>(n);
        let index = index_of(&states);
        for &p in &config.p_grid {
            let oracle = exact_axis_distribution(n, p)?;
            let expected: Vec<f64> = states.iter().map(|c| oracle.prob(c)).collect();
            let seed = derive_seed(config.base_seed, &format!("axis-marginal/{p}/{n}"));
            let hist = replicate_histogram(config.replications, seed, states.len(), |rng| {
                let t = simulate_history_with(p, n, rng).expect("validated parameters");
                let mut c = CountVector3::zero();
                for d in t.steps() {
                    c.increment(d.axis_sign_decompose().1.slot());
                }
                index[&c]
            });
            let out = chi_square_gof(&hist, &expected, config.replications, config.significance)?;
            checks.push(Check::new(
                "axis_marginal",
                format!("chi_square_history_axes[df={}]", out.degrees_of_freedom),
                Some(p),
                Some(n),
                out.statistic,
                out.critical,
                CheckKind::Significance(config.significance),
                !out.reject,
            ));
        }
    }
    Ok(checks)
}
