use alloc::vec;
use alloc::vec::Vec;

use super::rank::rank_ascending;
use super::special::{normal_cdf, normal_sf, t_two_sided};
use super::{Side, TestReport};
use crate::error::{Error, Result};
use crate::eval::mean_sd;
use crate::math::{abs, sqrt};

/// Exact null distribution is enumerated up to this many nonzero pairs.
const WILCOXON_EXACT_MAX: usize = 25;

/// Direction of a significant paired t-test, from the first argument's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    Better,
    Worse,
    NoDifference,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairedTTest {
    pub report: TestReport,
    pub mean_difference: f64,
    pub verdict: Verdict,
}

fn check_pairs(a: &[f64], b: &[f64], min: usize) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.len() < min {
        return Err(Error::InvalidParameter(alloc::format!(
            "need at least {min} pairs, got {}",
            a.len()
        )));
    }
    Ok(())
}

/// Two-sided paired t-test on `a − b`.
///
/// Zero-variance differences are handled by convention: all zero gives
/// p = 1, a nonzero constant gives p = 0 and an infinite statistic.
pub fn paired_t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<PairedTTest> {
    check_pairs(a, b, 2)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len();
    let (mean, sd) = mean_sd(&diffs);
    let df = (n - 1) as f64;
    let (t, p) = if sd == 0.0 {
        if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (mean.signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = mean / (sd / sqrt(n as f64));
        (t, t_two_sided(t, df))
    };
    let verdict = if p < alpha && mean > 0.0 {
        Verdict::Better
    } else if p < alpha && mean < 0.0 {
        Verdict::Worse
    } else {
        Verdict::NoDifference
    };
    Ok(PairedTTest {
        report: TestReport::new("paired-t", t, p, Side::TwoSided, n, 2).with_df(df, None),
        mean_difference: mean,
        verdict,
    })
}

/// Wilcoxon signed-rank test on `a − b`. The statistic is the sum of ranks
/// of positive differences; zero differences are dropped and tied absolute
/// differences share average ranks.
///
/// Up to 25 nonzero pairs the p-value comes from the exact permutation
/// distribution of the (possibly tied) ranks. Beyond that a normal
/// approximation with the tie-corrected variance is used, without
/// continuity correction.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], side: Side) -> Result<TestReport> {
    check_pairs(a, b, 1)?;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|&d| d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(TestReport::new("wilcoxon", 0.0, 1.0, side, 0, 2));
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| abs(*d)).collect();
    let ranks = rank_ascending(&magnitudes);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();

    let (p_greater, p_less) = if n <= WILCOXON_EXACT_MAX {
        exact_tails(&ranks, w_plus)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut ties = 0.0;
        let mut sorted = ranks.clone();
        sorted.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < n {
            let mut j = i + 1;
            while j < n && sorted[j] == sorted[i] {
                j += 1;
            }
            let t = (j - i) as f64;
            ties += t * t * t - t;
            i = j;
        }
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
        let z = (w_plus - mean) / sqrt(var);
        (normal_sf(z), normal_cdf(z))
    };
    let p = match side {
        Side::Greater => p_greater,
        Side::Less => p_less,
        Side::TwoSided => (2.0 * p_greater.min(p_less)).min(1.0),
    };
    Ok(TestReport::new("wilcoxon", w_plus, p, side, n, 2))
}

// Counts sign assignments by their doubled positive-rank sum; average ranks
// are multiples of one half, so doubling makes every rank an integer.
fn exact_tails(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r) as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let total: f64 = counts.iter().sum();
    let observed = (2.0 * w_plus) as usize;
    let at_least: f64 = counts[observed..].iter().sum();
    let at_most: f64 = counts[..=observed].iter().sum();
    (at_least / total, at_most / total)
}
