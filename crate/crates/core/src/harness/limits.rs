//! Law of large numbers and Gaussian-limit experiments.

use serde::Serialize;

use super::{replicate, Check, CheckKind, ExperimentConfig, SamplerKind};
use crate::error::Result;
use crate::lattice::position_from_counts;
use crate::rng::derive_seed;
use crate::stats::{ks_gaussian_test, ks_two_sample_test, mean_and_stderr, Moments2};

/// Relative tolerance on the per-decade decay of `E|S_n|/n`.
pub const LLN_DECAY_TOLERANCE: f64 = 0.10;

/// Limit variance of each Cartesian component of `S_n/√n`.
pub const LIMIT_COMPONENT_VARIANCE: f64 = 0.5;

/// Absolute tolerance on the Monte Carlo component variances and covariance.
pub const CLT_MOMENT_TOLERANCE: f64 = 0.01;

/// Spacing of the marginal lattices: `x ∈ ½ℤ`, `y ∈ (√3/2)ℤ`.
pub const X_SPACING: f64 = 0.5;
pub const Y_SPACING: f64 = 0.866_025_403_784_438_6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LlnRow {
    pub p: f64,
    pub n: u64,
    pub mean_abs_over_n: f64,
    pub stderr_abs_over_n: f64,
    pub mean_x_over_n: f64,
    pub mean_y_over_n: f64,
    pub stderr_x_over_n: f64,
    pub stderr_y_over_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LlnReport {
    pub sampler: SamplerKind,
    pub rows: Vec<LlnRow>,
    pub checks: Vec<Check>,
}

/// `|S_n|/n` over the `(p, n)` grid. Checks that the mean of `S_n/n` is zero
/// within four standard errors and that `E|S_n|/n` falls by `sqrt(n'/n)`
/// (within 10%) between consecutive horizons.
pub fn run_lln(config: &ExperimentConfig, sampler: SamplerKind) -> Result<LlnReport> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut n_grid = config.n_grid.clone();
    n_grid.sort_unstable();
    n_grid.dedup();
    for &p in &config.p_grid {
        let mut per_p: Vec<LlnRow> = Vec::new();
        for &n in &n_grid {
            let seed = derive_seed(config.base_seed, &format!("lln/{sampler}/{p}/{n}"));
            let positions = replicate(config.replications, seed, |rng| {
                let c = sampler
                    .final_counts(p, n, rng)
                    .expect("validated parameters");
                position_from_counts(&c).to_cartesian()
            });
            let nf = n as f64;
            let abs: Vec<f64> = positions.iter().map(|(x, y)| x.hypot(*y) / nf).collect();
            let xs: Vec<f64> = positions.iter().map(|(x, _)| x / nf).collect();
            let ys: Vec<f64> = positions.iter().map(|(_, y)| y / nf).collect();
            let (ma, sa) = mean_and_stderr(&abs);
            let (mx, sx) = mean_and_stderr(&xs);
            let (my, sy) = mean_and_stderr(&ys);
            checks.push(Check::bound(
                "lln",
                "mean_x_over_n",
                Some(p),
                Some(n),
                mx,
                4.0 * sx,
                CheckKind::FourSigma,
            ));
            checks.push(Check::bound(
                "lln",
                "mean_y_over_n",
                Some(p),
                Some(n),
                my,
                4.0 * sy,
                CheckKind::FourSigma,
            ));
            per_p.push(LlnRow {
                p,
                n,
                mean_abs_over_n: ma,
                stderr_abs_over_n: sa,
                mean_x_over_n: mx,
                mean_y_over_n: my,
                stderr_x_over_n: sx,
                stderr_y_over_n: sy,
            });
        }
        for w in per_p.windows(2) {
            let expected = (w[1].n as f64 / w[0].n as f64).sqrt();
            let ratio = w[0].mean_abs_over_n / w[1].mean_abs_over_n;
            checks.push(Check::bound(
                "lln",
                format!("decay_ratio_rel_error[{}->{}]", w[0].n, w[1].n),
                Some(p),
                Some(w[1].n),
                ratio / expected - 1.0,
                LLN_DECAY_TOLERANCE,
                CheckKind::Tolerance,
            ));
        }
        rows.extend(per_p);
    }
    Ok(LlnReport {
        sampler,
        rows,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltRow {
    pub p: f64,
    pub n: u64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
    pub ks_x: f64,
    pub ks_y: f64,
    pub ks_critical: f64,
    /// Smaller over larger eigenvalue of the sample covariance.
    pub isotropy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltReport {
    pub sampler: SamplerKind,
    pub rows: Vec<CltRow>,
    /// Two-sample KS between p values: `(p_a, p_b, n, D_x, D_y, critical)`.
    pub cross_p: Vec<(f64, f64, u64, f64, f64, f64)>,
    /// Histogram of the x component of `S_n/√n` per `(p, n)`.
    pub histograms: Vec<(f64, u64, Vec<HistogramBin>)>,
    pub checks: Vec<Check>,
}

const HIST_LO: f64 = -4.0;
const HIST_HI: f64 = 4.0;
const HIST_BINS: usize = 80;

fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    let width = (HIST_HI - HIST_LO) / HIST_BINS as f64;
    let mut counts = vec![0u64; HIST_BINS];
    for &v in values {
        let i = ((v - HIST_LO) / width).floor();
        let i = (i.max(0.0) as usize).min(HIST_BINS - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            bin_left: HIST_LO + i as f64 * width,
            bin_right: HIST_LO + (i + 1) as f64 * width,
            count,
        })
        .collect()
}

/// At `p = 1` the axis urn never leaves its first colour: `S_n/√n` tends to
/// a one-dimensional Gaussian along a uniformly chosen axis, not to an
/// isotropic one. Its component variances are still `1/2`, so only the
/// Gaussian-shape and cross-p checks are skipped there.
pub fn gaussian_limit_applies(p: f64) -> bool {
    p < 1.0
}

struct CltSample {
    raw: Vec<(f64, f64)>,
    spread: (Vec<f64>, Vec<f64>),
}

/// `S_n/√n` per replication, plus a copy with each coordinate spread
/// uniformly over its lattice cell.
///
/// The marginals of `S_n` live on the lattices `½ℤ` and `(√3/2)ℤ`, so their
/// empirical CDFs jump by roughly one cell of Gaussian mass at every atom.
/// Spreading each atom over its cell (independent uniform offsets drawn from
/// the same replication stream after the walk) turns the lattice law into
/// a continuous one that the KS comparison can use; it adds variance
/// `h²/12n`, below 10⁻⁵ at `n = 10⁴`. Moments use the raw values.
fn clt_sample(p: f64, n: u64, reps: u64, seed: u64, sampler: SamplerKind) -> CltSample {
    use rand::Rng;
    let root = (n as f64).sqrt();
    let pairs = replicate(reps, seed, |rng| {
        let c = sampler
            .final_counts(p, n, rng)
            .expect("validated parameters");
        let (x, y) = position_from_counts(&c).to_cartesian();
        let jx = X_SPACING * (rng.gen::<f64>() - 0.5);
        let jy = Y_SPACING * (rng.gen::<f64>() - 0.5);
        ((x / root, y / root), ((x + jx) / root, (y + jy) / root))
    });
    let raw = pairs.iter().map(|(r, _)| *r).collect();
    let spread = pairs.iter().map(|(_, s)| *s).unzip();
    CltSample { raw, spread }
}

/// Gaussian-limit statistics of `S_n/√n` per `(p, n)` and pairwise
/// two-sample KS between p values at equal `n`.
///
/// Each cross-p pair counts as one test at the configured significance,
/// split evenly between the two components.
pub fn run_clt(config: &ExperimentConfig, sampler: SamplerKind) -> Result<CltReport> {
    config.validate()?;
    let alpha = config.significance;
    let sigma = LIMIT_COMPONENT_VARIANCE.sqrt();
    let mut rows = Vec::new();
    let mut cross_p = Vec::new();
    let mut histograms = Vec::new();
    let mut checks = Vec::new();
    for &n in &config.n_grid {
        let mut samples = Vec::new();
        for &p in &config.p_grid {
            let seed = derive_seed(config.base_seed, &format!("clt/{sampler}/{p}/{n}"));
            let sample = clt_sample(p, n, config.replications, seed, sampler);
            let m = Moments2::from_pairs(sample.raw.iter().copied());
            let (var_x, var_y) = m.variances();
            let cov = m.covariance();
            let ks_x = ks_gaussian_test(&sample.spread.0, sigma, alpha)?;
            let ks_y = ks_gaussian_test(&sample.spread.1, sigma, alpha)?;
            let (s, nn) = (Some(p), Some(n));
            checks.push(Check::bound(
                "clt",
                "var_x_minus_half",
                s,
                nn,
                var_x - 0.5,
                CLT_MOMENT_TOLERANCE,
                CheckKind::Tolerance,
            ));
            checks.push(Check::bound(
                "clt",
                "var_y_minus_half",
                s,
                nn,
                var_y - 0.5,
                CLT_MOMENT_TOLERANCE,
                CheckKind::Tolerance,
            ));
            checks.push(Check::bound(
                "clt",
                "cov_xy",
                s,
                nn,
                cov,
                CLT_MOMENT_TOLERANCE,
                CheckKind::Tolerance,
            ));
            if gaussian_limit_applies(p) {
                checks.push(Check::new(
                    "clt",
                    "ks_x_vs_gaussian",
                    s,
                    nn,
                    ks_x.statistic,
                    ks_x.critical,
                    CheckKind::Significance(alpha),
                    !ks_x.reject,
                ));
                checks.push(Check::new(
                    "clt",
                    "ks_y_vs_gaussian",
                    s,
                    nn,
                    ks_y.statistic,
                    ks_y.critical,
                    CheckKind::Significance(alpha),
                    !ks_y.reject,
                ));
            }
            let (mean_x, mean_y) = m.mean();
            rows.push(CltRow {
                p,
                n,
                mean_x,
                mean_y,
                var_x,
                var_y,
                cov_xy: cov,
                ks_x: ks_x.statistic,
                ks_y: ks_y.statistic,
                ks_critical: ks_x.critical,
                isotropy: m.isotropy(),
            });
            let xs: Vec<f64> = sample.raw.iter().map(|(x, _)| *x).collect();
            histograms.push((p, n, histogram(&xs)));
            if gaussian_limit_applies(p) {
                samples.push((p, sample.spread));
            }
        }
        for i in 0..samples.len() {
            for j in i + 1..samples.len() {
                let (pa, a) = &samples[i];
                let (pb, b) = &samples[j];
                let kx = ks_two_sample_test(&a.0, &b.0, alpha / 2.0)?;
                let ky = ks_two_sample_test(&a.1, &b.1, alpha / 2.0)?;
                cross_p.push((*pa, *pb, n, kx.statistic, ky.statistic, kx.critical));
                let worst = (kx.statistic / kx.critical).max(ky.statistic / ky.critical);
                checks.push(Check::new(
                    "clt",
                    format!("two_sample_ks_p{pa}_vs_p{pb}(max D/critical)"),
                    None,
                    Some(n),
                    worst,
                    1.0,
                    CheckKind::Significance(alpha),
                    !(kx.reject || ky.reject),
                ));
            }
        }
    }
    Ok(CltReport {
        sampler,
        rows,
        cross_p,
        histograms,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_clamps_to_edges() {
        let h = histogram(&[-10.0, 0.0, 0.05, 10.0]);
        assert_eq!(h.len(), HIST_BINS);
        assert_eq!(h[0].count, 1);
        assert_eq!(h[HIST_BINS - 1].count, 1);
        assert_eq!(h[40].count, 2);
        assert!((h[40].bin_left - 0.0).abs() < 1e-12);
    }

    #[test]
    fn full_memory_limit_is_not_isotropic() {
        let cfg = ExperimentConfig::new(vec![1.0], vec![400], 20_000, 4);
        let report = run_clt(&cfg, SamplerKind::Counts).unwrap();
        let row = &report.rows[0];
        assert!((row.var_x - 0.5).abs() < 0.03 && (row.var_y - 0.5).abs() < 0.03);
        // Mixture of N(0, 1) and N(0, 1/4) in x: far from N(0, 1/2).
        assert!(row.ks_x > row.ks_critical, "{row:?}");
        assert!(report.checks.iter().all(|c| !c.name.starts_with("ks_")));
    }

    #[test]
    fn small_lln_run() {
        let cfg = ExperimentConfig::new(vec![0.5], vec![100, 1000], 2000, 4);
        let report = run_lln(&cfg, SamplerKind::Counts).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(
            report.checks.iter().all(|c| c.passed),
            "{:?}",
            report.checks
        );
    }

    #[test]
    fn small_clt_run_has_half_variances() {
        let cfg = ExperimentConfig::new(vec![0.0, 0.7], vec![400], 4000, 4);
        let report = run_clt(&cfg, SamplerKind::Counts).unwrap();
        for row in &report.rows {
            // 4000 samples: standard error of a variance near 0.5 is ~0.011.
            assert!((row.var_x - 0.5).abs() < 0.05, "{row:?}");
            assert!((row.var_y - 0.5).abs() < 0.05, "{row:?}");
        }
        assert_eq!(report.cross_p.len(), 1);
    }
}
