//! Two-sided paired significance tests.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

/// Largest sample size that uses the exact signed-rank distribution.
pub const EXACT_MAX_N: usize = 20;

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum StatsError {
    #[error("every paired difference is zero")]
    AllZeroDifferences,
    #[error("need at least two pairs, got {0}")]
    TooFew(usize),
    #[error("the differences have zero variance")]
    ZeroVariance,
    #[error("non-finite value in the input")]
    NonFinite,
}

impl StatsError {
    pub fn code(&self) -> &'static str {
        match self {
            StatsError::AllZeroDifferences => "ALL_ZERO_DIFFERENCES",
            StatsError::TooFew(_) => "TOO_FEW",
            StatsError::ZeroVariance => "ZERO_VARIANCE",
            StatsError::NonFinite => "NON_FINITE",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of the positive differences.
    pub w_plus: f64,
    /// Nonzero differences used.
    pub n: usize,
    pub p_value: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
    pub mean_difference: f64,
}

fn differences(pairs: &[(f64, f64)]) -> Result<Vec<f64>, StatsError> {
    if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(pairs.iter().map(|(x, y)| x - y).collect())
}

/// Average ranks of `values` (ascending), doubled so ties stay integral.
fn doubled_ranks(values: &[f64]) -> Vec<u64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 averaged, times two.
        let doubled = (i + 1 + j + 1) as u64;
        for &k in &idx[i..=j] {
            ranks[k] = doubled;
        }
        i = j + 1;
    }
    ranks
}

/// Wilcoxon signed-rank test on `x - y`, two-sided. Zero differences are
/// dropped. Up to [`EXACT_MAX_N`] nonzero differences the null distribution
/// is counted over all sign patterns; above that a normal approximation with
/// tie correction is used.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<WilcoxonResult, StatsError> {
    let d: Vec<f64> = differences(pairs)?.into_iter().filter(|d| *d != 0.0).collect();
    if d.is_empty() {
        return Err(StatsError::AllZeroDifferences);
    }
    let n = d.len();
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let ranks = doubled_ranks(&abs);
    let w2: u64 = ranks.iter().zip(&d).filter(|(_, x)| **x > 0.0).map(|(r, _)| *r).sum();
    let w_plus = w2 as f64 / 2.0;

    if n <= EXACT_MAX_N {
        // counts[s] = number of sign patterns whose positive doubled-rank sum is s.
        let total: u64 = ranks.iter().sum();
        let mut counts = vec![0f64; total as usize + 1];
        counts[0] = 1.0;
        let mut reach = 0usize;
        for &r in &ranks {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] != 0.0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let patterns = 2f64.powi(n as i32);
        let lower: f64 = counts[..=w2 as usize].iter().sum::<f64>() / patterns;
        let upper: f64 = counts[w2 as usize..].iter().sum::<f64>() / patterns;
        let p = (2.0 * lower.min(upper)).min(1.0);
        return Ok(WilcoxonResult { w_plus, n, p_value: p, exact: true });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = abs.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|v| **v == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = (w_plus - mean) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let p = (2.0 * normal.cdf(-z.abs())).min(1.0);
    Ok(WilcoxonResult { w_plus, n, p_value: p, exact: false })
}

/// Paired t-test on `x - y`, two-sided, `n - 1` degrees of freedom.
pub fn paired_t_test(pairs: &[(f64, f64)]) -> Result<TTestResult, StatsError> {
    let d = differences(pairs)?;
    let n = d.len();
    if n < 2 {
        return Err(StatsError::TooFew(n));
    }
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    // Rounding noise on constant differences counts as zero.
    if var <= (f64::EPSILON * mean).powi(2) * nf {
        return Err(StatsError::ZeroVariance);
    }
    let t = mean / (var / nf).sqrt();
    let df = nf - 1.0;
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let p = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(TTestResult { t, df, p_value: p, mean_difference: mean })
}

/// Both tests below the significance level.
pub fn significant(wilcoxon_p: f64, t_p: f64) -> bool {
    wilcoxon_p < SIGNIFICANCE_LEVEL && t_p < SIGNIFICANCE_LEVEL
}
