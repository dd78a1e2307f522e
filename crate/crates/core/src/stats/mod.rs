//! Test statistics used by the experiment harness.

mod chisq;
mod ks;

pub use chisq::{chi_square_gof, chi_square_independence, ChiSquareOutcome, MIN_EXPECTED};
pub use ks::{
    kolmogorov_sf, ks_critical_coefficient, ks_gaussian_test, ks_statistic, ks_two_sample_test,
    KsOutcome, MIN_KS_SAMPLE,
};

/// Running sums for means, variances and covariance of paired samples.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments2 {
    pub count: u64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl Moments2 {
    pub fn push(&mut self, x: f64, y: f64) {
        self.count += 1;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut m = Moments2::default();
        for (x, y) in pairs {
            m.push(x, y);
        }
        m
    }

    pub fn mean(&self) -> (f64, f64) {
        let n = self.count as f64;
        (self.sx / n, self.sy / n)
    }

    /// Unbiased sample variances.
    pub fn variances(&self) -> (f64, f64) {
        let n = self.count as f64;
        let (mx, my) = self.mean();
        (
            (self.sxx - n * mx * mx) / (n - 1.0),
            (self.syy - n * my * my) / (n - 1.0),
        )
    }

    /// Unbiased sample covariance.
    pub fn covariance(&self) -> f64 {
        let n = self.count as f64;
        let (mx, my) = self.mean();
        (self.sxy - n * mx * my) / (n - 1.0)
    }

    /// Ratio of the smaller to the larger eigenvalue of the sample
    /// covariance matrix; 1 for an isotropic sample.
    pub fn isotropy(&self) -> f64 {
        let (a, c) = self.variances();
        let b = self.covariance();
        let half_trace = 0.5 * (a + c);
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let (lo, hi) = (half_trace - disc, half_trace + disc);
        if hi > 0.0 {
            lo / hi
        } else {
            1.0
        }
    }
}

/// Mean and standard error of a sample.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Lag-`k` sample autocorrelation of a ±1 (or any real) sequence.
pub fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    if lag >= n {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let denom: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    if denom == 0.0 {
        return 0.0;
    }
    let num: f64 = xs
        .windows(lag + 1)
        .map(|w| (w[0] - mean) * (w[lag] - mean))
        .sum();
    num / denom
}
