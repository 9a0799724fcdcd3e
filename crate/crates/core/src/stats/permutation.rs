//! Simultaneous bounds on per-method statistics under the hypothesis that
//! all methods perform equally well.
//!
//! Each replicate shuffles the method labels independently within every
//! dataset row, recomputes the per-method statistic and records the largest
//! and smallest value. The upper bound is the 97.5th percentile of the
//! maxima, the lower bound the 2.5th percentile of the minima.
//!
//! Replicate `i` draws from ChaCha8 stream `i` of the seed, so a set of
//! replicates can be computed in any order or split across workers.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::rank::rank_descending;
use crate::error::{Error, Result};
use crate::eval::AccuracyMatrix;
use crate::math::floor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BoundStatistic {
    MeanAccuracy,
    MeanRank,
}

impl BoundStatistic {
    /// Rows whose column means give the statistic: accuracies or ranks.
    pub fn base_rows(self, matrix: &AccuracyMatrix) -> Vec<Vec<f64>> {
        match self {
            Self::MeanAccuracy => matrix.means().to_vec(),
            Self::MeanRank => matrix.means().iter().map(|r| rank_descending(r)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PermutationBounds {
    pub statistic: BoundStatistic,
    pub n_perm: usize,
    pub seed: u64,
    pub lower: f64,
    pub upper: f64,
    pub methods: Vec<String>,
    pub observed: Vec<f64>,
    pub outside: Vec<bool>,
}

fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let k = rows.first().map_or(0, Vec::len);
    let n = rows.len() as f64;
    (0..k).map(|m| rows.iter().map(|r| r[m]).sum::<f64>() / n).collect()
}

/// `(max, min)` of the per-method statistic for replicate `replicate`.
pub fn permutation_replicate(base: &[Vec<f64>], seed: u64, replicate: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    let k = base.first().map_or(0, Vec::len);
    let mut sums = alloc::vec![0.0; k];
    let mut row = Vec::with_capacity(k);
    for r in base {
        row.clear();
        row.extend_from_slice(r);
        row.shuffle(&mut rng);
        for (s, v) in sums.iter_mut().zip(&row) {
            *s += v;
        }
    }
    let n = base.len() as f64;
    sums.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), s| {
        let v = s / n;
        (hi.max(v), lo.min(v))
    })
}

// Linear interpolation between order statistics at position q·(len − 1).
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn check(matrix: &AccuracyMatrix, n_perm: usize) -> Result<()> {
    if matrix.methods().len() < 2 {
        return Err(Error::TooFewMethods(matrix.methods().len()));
    }
    if matrix.datasets().is_empty() {
        return Err(Error::TooFewDatasets(0));
    }
    if n_perm == 0 {
        return Err(Error::InvalidParameter("need at least one permutation".into()));
    }
    Ok(())
}

/// Turns replicate `(max, min)` pairs into bounds for `matrix`. The pairs
/// may arrive in any order.
pub fn summarize_replicates(
    matrix: &AccuracyMatrix,
    statistic: BoundStatistic,
    seed: u64,
    replicates: &[(f64, f64)],
) -> Result<PermutationBounds> {
    check(matrix, replicates.len())?;
    let mut maxima: Vec<f64> = replicates.iter().map(|r| r.0).collect();
    let mut minima: Vec<f64> = replicates.iter().map(|r| r.1).collect();
    maxima.sort_by(f64::total_cmp);
    minima.sort_by(f64::total_cmp);
    let upper = percentile(&maxima, 0.975);
    let lower = percentile(&minima, 0.025);
    let observed = column_means(&statistic.base_rows(matrix));
    let outside = observed.iter().map(|&v| v > upper || v < lower).collect();
    Ok(PermutationBounds {
        statistic,
        n_perm: replicates.len(),
        seed,
        lower,
        upper,
        methods: matrix.methods().to_vec(),
        observed,
        outside,
    })
}

/// Sequential bounds from `n_perm` replicates.
pub fn permutation_bounds(
    matrix: &AccuracyMatrix,
    statistic: BoundStatistic,
    n_perm: usize,
    seed: u64,
) -> Result<PermutationBounds> {
    check(matrix, n_perm)?;
    let base = statistic.base_rows(matrix);
    let replicates: Vec<(f64, f64)> = (0..n_perm as u64).map(|i| permutation_replicate(&base, seed, i)).collect();
    summarize_replicates(matrix, statistic, seed, &replicates)
}
