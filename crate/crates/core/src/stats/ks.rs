//! Kolmogorov–Smirnov tests.
//!
//! Rejection uses the asymptotic critical value `c(α) = sqrt(-ln(α/2)/2)`
//! scaled by `1/sqrt(m)` (one sample) or `sqrt((m+n)/(mn))` (two samples).
//! For the sample sizes used here (10⁴ and up) the asymptotic law is close;
//! at small sizes the test is slightly conservative.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Smallest sample accepted by [`ks_gaussian_test`].
pub const MIN_KS_SAMPLE: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    /// Rejection threshold on `statistic`.
    pub critical: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
    pub reject: bool,
}

/// `c(α)` in `D > c(α)/sqrt(m)`.
pub fn ks_critical_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Survival function of the Kolmogorov distribution,
/// `P(K > λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2k²λ²)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // The alternating series converges slowly here and the value is 1
        // to double precision.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sample KS statistic against an arbitrary continuous CDF.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let xs = sorted(sample);
    let m = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / m - f;
        let below = f - i as f64 / m;
        d.max(above).max(below)
    })
}

/// One-sample KS test of `sample` against `N(0, sigma²)`.
pub fn ks_gaussian_test(sample: &[f64], sigma: f64, alpha: f64) -> Result<KsOutcome> {
    if sample.len() < MIN_KS_SAMPLE {
        return Err(Error::SampleTooSmall {
            got: sample.len(),
            need: MIN_KS_SAMPLE,
        });
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    let normal = Normal::new(0.0, sigma).map_err(|_| Error::InvalidSigma(sigma))?;
    let statistic = ks_statistic(sample, |x| normal.cdf(x));
    let m = sample.len() as f64;
    let critical = ks_critical_coefficient(alpha) / m.sqrt();
    Ok(KsOutcome {
        statistic,
        critical,
        p_value: kolmogorov_sf(statistic * m.sqrt()),
        reject: statistic > critical,
    })
}

/// Two-sample KS test. Ties are handled by stepping over equal values
/// together before comparing the empirical CDFs.
pub fn ks_two_sample_test(a: &[f64], b: &[f64], alpha: f64) -> Result<KsOutcome> {
    for s in [a, b] {
        if s.len() < MIN_KS_SAMPLE {
            return Err(Error::SampleTooSmall {
                got: s.len(),
                need: MIN_KS_SAMPLE,
            });
        }
    }
    let (xa, xb) = (sorted(a), sorted(b));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] == x {
            i += 1;
        }
        while j < xb.len() && xb[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let scale = ((na + nb) / (na * nb)).sqrt();
    let critical = ks_critical_coefficient(alpha) * scale;
    Ok(KsOutcome {
        statistic: d,
        critical,
        p_value: kolmogorov_sf(d / scale),
        reject: d > critical,
    })
}
