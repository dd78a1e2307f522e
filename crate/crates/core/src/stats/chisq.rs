//! Pearson chi-square tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Cells with a smaller expected count are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    /// Number of cells after pooling.
    pub cells: usize,
    pub critical: f64,
    pub p_value: f64,
    pub reject: bool,
}

impl ChiSquareOutcome {
    fn from_statistic(statistic: f64, df: usize, cells: usize, alpha: f64) -> Self {
        if df == 0 {
            return ChiSquareOutcome {
                statistic,
                degrees_of_freedom: 0,
                cells,
                critical: f64::INFINITY,
                p_value: 1.0,
                reject: false,
            };
        }
        let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
        let critical = dist.inverse_cdf(1.0 - alpha);
        let p_value = if statistic.is_finite() {
            dist.sf(statistic)
        } else {
            0.0
        };
        ChiSquareOutcome {
            statistic,
            degrees_of_freedom: df,
            cells,
            critical,
            p_value,
            reject: statistic > critical,
        }
    }
}

/// Goodness of fit of `observed` counts to `expected_probs`.
///
/// Cells whose expected count `total·q` is below [`MIN_EXPECTED`] are pooled
/// into one cell; if that pooled cell is itself too small it is merged into
/// the smallest remaining cell. Observations in a cell of probability zero
/// make the statistic infinite.
pub fn chi_square_gof(
    observed: &[u64],
    expected_probs: &[f64],
    total: u64,
    alpha: f64,
) -> Result<ChiSquareOutcome> {
    if observed.len() != expected_probs.len() {
        return Err(Error::DegenerateExpected(format!(
            "{} observed cells but {} probabilities",
            observed.len(),
            expected_probs.len()
        )));
    }
    if expected_probs.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
        return Err(Error::DegenerateExpected(
            "negative or non-finite probability".into(),
        ));
    }
    let mass: f64 = expected_probs.iter().sum();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::DegenerateExpected(format!(
            "probabilities sum to {mass}"
        )));
    }
    if total == 0 || observed.iter().sum::<u64>() != total {
        return Err(Error::DegenerateExpected(
            "observed counts do not sum to total".into(),
        ));
    }

    let t = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    let mut impossible = false;
    for (&o, &q) in observed.iter().zip(expected_probs) {
        if q == 0.0 {
            impossible |= o > 0;
            continue;
        }
        let e = t * q;
        if e < MIN_EXPECTED {
            pooled_obs += o as f64;
            pooled_exp += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pooled_exp > 0.0 {
        if pooled_exp >= MIN_EXPECTED || cells.is_empty() {
            cells.push((pooled_obs, pooled_exp));
        } else {
            let smallest = cells
                .iter_mut()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty");
            smallest.0 += pooled_obs;
            smallest.1 += pooled_exp;
        }
    }
    if cells.len() < 2 {
        // A single cell carries no information beyond the total.
        let statistic = if impossible { f64::INFINITY } else { 0.0 };
        let mut out = ChiSquareOutcome::from_statistic(statistic, 0, cells.len(), alpha);
        out.reject = impossible;
        out.p_value = if impossible { 0.0 } else { 1.0 };
        return Ok(out);
    }
    let statistic = if impossible {
        f64::INFINITY
    } else {
        cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum()
    };
    Ok(ChiSquareOutcome::from_statistic(
        statistic,
        cells.len() - 1,
        cells.len(),
        alpha,
    ))
}

/// Pearson test of independence on a contingency table. Rows and columns
/// with zero margin are dropped; a table that collapses to one row or one
/// column is never rejected.
pub fn chi_square_independence(table: &[Vec<u64>], alpha: f64) -> Result<ChiSquareOutcome> {
    let cols = table.first().map_or(0, Vec::len);
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::DegenerateExpected("ragged contingency table".into()));
    }
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols)
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let total: f64 = row_sums.iter().sum();
    if total == 0.0 {
        return Err(Error::DegenerateExpected("empty contingency table".into()));
    }
    let live_rows: Vec<usize> = (0..table.len()).filter(|&i| row_sums[i] > 0.0).collect();
    let live_cols: Vec<usize> = (0..cols).filter(|&j| col_sums[j] > 0.0).collect();
    let mut statistic = 0.0;
    for &i in &live_rows {
        for &j in &live_cols {
            let e = row_sums[i] * col_sums[j] / total;
            let o = table[i][j] as f64;
            statistic += (o - e) * (o - e) / e;
        }
    }
    let df = live_rows.len().saturating_sub(1) * live_cols.len().saturating_sub(1);
    Ok(ChiSquareOutcome::from_statistic(
        statistic,
        df,
        live_rows.len() * live_cols.len(),
        alpha,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_observation_scores_zero() {
        let out = chi_square_gof(&[25, 50, 25], &[0.25, 0.5, 0.25], 100, 1e-3).unwrap();
        assert_eq!(out.statistic, 0.0);
        assert!(!out.reject);
        assert_eq!(out.degrees_of_freedom, 2);
    }

    #[test]
    fn sixty_forty() {
        let out = chi_square_gof(&[60, 40], &[0.5, 0.5], 100, 1e-3).unwrap();
        assert!((out.statistic - 4.0).abs() < 1e-12);
        assert!(!out.reject);
        // Critical value of chi2(1) at 1e-3 is 10.828.
        assert!((out.critical - 10.828).abs() < 1e-3);
        let out = chi_square_gof(&[60, 40], &[0.5, 0.5], 100, 0.05).unwrap();
        assert!(out.reject);
    }

    #[test]
    fn small_cells_are_pooled() {
        // Expected counts 90, 4, 3, 3: the last three pool to 10.
        let out = chi_square_gof(&[90, 4, 3, 3], &[0.9, 0.04, 0.03, 0.03], 100, 1e-3).unwrap();
        assert_eq!(out.cells, 2);
        assert_eq!(out.statistic, 0.0);
    }

    #[test]
    fn observation_in_impossible_cell_rejects() {
        let out = chi_square_gof(&[50, 49, 1], &[0.5, 0.5, 0.0], 100, 1e-3).unwrap();
        assert!(out.statistic.is_infinite());
        assert!(out.reject);
        let out = chi_square_gof(&[50, 50, 0], &[0.5, 0.5, 0.0], 100, 1e-3).unwrap();
        assert!(!out.reject);
    }

    #[test]
    fn degenerate_expected_is_an_error() {
        assert!(chi_square_gof(&[1, 1], &[0.7, 0.7], 2, 1e-3).is_err());
        assert!(chi_square_gof(&[1, 1], &[-0.5, 1.5], 2, 1e-3).is_err());
        assert!(chi_square_gof(&[1], &[0.5, 0.5], 1, 1e-3).is_err());
        assert!(chi_square_gof(&[1, 1], &[0.5, 0.5], 3, 1e-3).is_err());
    }

    #[test]
    fn independence_examples() {
        let out = chi_square_independence(&[vec![10, 20], vec![30, 60]], 1e-3).unwrap();
        assert!(out.statistic.abs() < 1e-12);
        assert_eq!(out.degrees_of_freedom, 1);
        let out = chi_square_independence(&[vec![100, 0], vec![0, 100]], 1e-3).unwrap();
        assert!(out.reject);
        let out = chi_square_independence(&[vec![40, 0, 0], vec![60, 0, 0]], 1e-3).unwrap();
        assert_eq!(out.degrees_of_freedom, 0);
        assert!(!out.reject);
    }
}
