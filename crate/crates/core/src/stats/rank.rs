use alloc::string::String;
use alloc::vec::Vec;

use super::special::normal_cdf;
use super::{Side, TestReport};
use crate::error::{Error, Result};
use crate::eval::AccuracyMatrix;
use crate::math::sqrt;

/// Ranks with 1 for the largest value; tied values share the average rank.
pub fn rank_descending(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    average_ranks(values, &order)
}

/// Ranks with 1 for the smallest value, ties averaged.
pub(crate) fn rank_ascending(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    average_ranks(values, &order)
}

fn average_ranks(values: &[f64], order: &[usize]) -> Vec<f64> {
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Within-dataset ranks, 1 = most accurate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankTable {
    pub datasets: Vec<String>,
    pub methods: Vec<String>,
    pub ranks: Vec<Vec<f64>>,
}

impl RankTable {
    pub fn from_rows(datasets: Vec<String>, methods: Vec<String>, rows: &[Vec<f64>]) -> Self {
        Self {
            datasets,
            methods,
            ranks: rows.iter().map(|r| rank_descending(r)).collect(),
        }
    }

    pub fn num_methods(&self) -> usize {
        self.methods.len()
    }

    pub fn num_datasets(&self) -> usize {
        self.datasets.len()
    }

    /// Column means.
    pub fn mean_ranks(&self) -> Vec<f64> {
        let n = self.ranks.len() as f64;
        (0..self.methods.len())
            .map(|m| self.ranks.iter().map(|r| r[m]).sum::<f64>() / n)
            .collect()
    }

    pub fn method_index(&self, method: &str) -> Result<usize> {
        self.methods
            .iter()
            .position(|m| m == method)
            .ok_or_else(|| Error::UnknownMethod(method.into()))
    }
}

/// Ranks every dataset row of the matrix's mean accuracies.
pub fn mean_ranks(matrix: &AccuracyMatrix) -> RankTable {
    RankTable::from_rows(matrix.datasets().to_vec(), matrix.methods().to_vec(), matrix.means())
}

/// One-sided test that `target` ranks better (lower) than the `(k+1)/2`
/// expected under equal performance.
///
/// Each dataset contributes variance `v_j = Σ_i (rank − (k+1)/2)² / k`; the
/// mean rank over `N` datasets is compared against a normal with standard
/// deviation `√(Σ v_j) / N`.
pub fn mean_rank_z_test(table: &RankTable, target: &str) -> Result<TestReport> {
    let k = table.num_methods();
    let n = table.num_datasets();
    if k < 2 {
        return Err(Error::TooFewMethods(k));
    }
    if n == 0 {
        return Err(Error::TooFewDatasets(n));
    }
    let t = table.method_index(target)?;
    let centre = (k as f64 + 1.0) / 2.0;
    let total_var: f64 = table
        .ranks
        .iter()
        .map(|row| row.iter().map(|r| (r - centre) * (r - centre)).sum::<f64>() / k as f64)
        .sum();
    let s = sqrt(total_var) / n as f64;
    if s == 0.0 {
        return Err(Error::Undefined("mean-rank z-test with all ranks tied"));
    }
    let observed = table.ranks.iter().map(|r| r[t]).sum::<f64>() / n as f64;
    let z = (observed - centre) / s;
    Ok(TestReport::new("mean-rank-z", z, normal_cdf(z), Side::Less, n, k))
}
