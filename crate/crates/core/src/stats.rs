//! Goodness-of-fit statistics used by the experiment harness and tests.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Two-sided Kolmogorov-Smirnov statistic of a sample against N(mean, var).
///
/// Returns `None` for a degenerate reference (`var <= 0`) or an empty sample.
pub fn ks_statistic_normal(sample: &[f64], mean: f64, var: f64) -> Option<f64> {
    if sample.is_empty() || var.is_nan() || var <= 0.0 {
        return None;
    }
    let normal = Normal::new(mean, var.sqrt()).ok()?;
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = normal.cdf(x);
        sup = sup
            .max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs());
    }
    Some(sup)
}

/// Asymptotic Kolmogorov critical value: `D_crit = c(alpha) / sqrt(n)` with
/// `c(alpha) = sqrt(-ln(alpha/2) / 2)`.
pub fn ks_critical_value(alpha: f64, n: usize) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Result of a chi-square goodness-of-fit test on equiprobable bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    /// Critical value at the significance used to build the test.
    pub critical: f64,
}

impl ChiSquareTest {
    pub fn passed(&self) -> bool {
        self.statistic <= self.critical
    }
}

/// Chi-square test of a sample against equiprobable bins delimited by the
/// given interior quantile edges (`edges.len() + 1` bins).
pub fn chi_square_equiprobable(sample: &[f64], edges: &[f64], significance: f64) -> ChiSquareTest {
    let bins = edges.len() + 1;
    let mut counts = vec![0usize; bins];
    for &x in sample {
        let idx = edges.partition_point(|&e| e < x);
        counts[idx] += 1;
    }
    let expected = sample.len() as f64 / bins as f64;
    let statistic = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = bins - 1;
    let critical = ChiSquared::new(dof as f64)
        .expect("valid dof")
        .inverse_cdf(1.0 - significance);
    ChiSquareTest {
        statistic,
        dof,
        critical,
    }
}

/// Sample mean and unbiased variance.
pub fn mean_and_variance(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = if sample.len() > 1 {
        sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}
