//! Classifier-comparison statistics over an [`AccuracyMatrix`].
//!
//! [`AccuracyMatrix`]: crate::eval::AccuracyMatrix

mod binomial;
mod omnibus;
mod paired;
mod permutation;
mod rank;
pub mod special;

use alloc::string::String;

pub use binomial::binomial_tail;
pub use omnibus::{friedman_test, iman_davenport, quade_test};
pub use paired::{paired_t_test, wilcoxon_signed_rank, PairedTTest, Verdict};
pub use permutation::{
    permutation_bounds, permutation_replicate, summarize_replicates, BoundStatistic, PermutationBounds,
};
pub use rank::{mean_rank_z_test, mean_ranks, rank_descending, RankTable};

/// Alternative hypothesis. One-sided alternatives are stated for the first
/// argument of the test: `Greater` means "a tends to exceed b".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Side {
    TwoSided,
    Greater,
    Less,
}

/// Outcome of one hypothesis test.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub side: Side,
    /// Datasets (omnibus tests) or nonzero pairs (paired tests).
    pub n: usize,
    /// Methods compared.
    pub k: usize,
    pub df1: Option<f64>,
    pub df2: Option<f64>,
}

impl TestReport {
    pub(crate) fn new(name: &str, statistic: f64, p_value: f64, side: Side, n: usize, k: usize) -> Self {
        Self {
            name: name.into(),
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            side,
            n,
            k,
            df1: None,
            df2: None,
        }
    }

    pub(crate) fn with_df(mut self, df1: f64, df2: Option<f64>) -> Self {
        self.df1 = Some(df1);
        self.df2 = df2;
        self
    }
}
