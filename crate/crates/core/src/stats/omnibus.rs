use alloc::vec::Vec;

use super::rank::{rank_ascending, rank_descending};
use super::special::{chi2_sf, f_sf};
use super::{Side, TestReport};
use crate::error::{Error, Result};
use crate::eval::AccuracyMatrix;

fn shape(matrix: &AccuracyMatrix) -> Result<(usize, usize)> {
    let n = matrix.datasets().len();
    let k = matrix.methods().len();
    if k < 2 {
        return Err(Error::TooFewMethods(k));
    }
    if n < 2 {
        return Err(Error::TooFewDatasets(n));
    }
    Ok((n, k))
}

// Σ (t³ − t) over groups of equal values in one row.
fn tie_term(row: &[f64]) -> f64 {
    let mut sorted = row.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        total += t * t * t - t;
        start = end;
    }
    total
}

/// Friedman's χ² over within-dataset ranks, corrected for ties. When every
/// row is fully tied the corrected statistic is 0/0; it is reported as 0
/// with p = 1.
pub fn friedman_test(matrix: &AccuracyMatrix) -> Result<TestReport> {
    let (n, k) = shape(matrix)?;
    let (nf, kf) = (n as f64, k as f64);
    let mut rank_sums = alloc::vec![0.0; k];
    let mut ties = 0.0;
    for row in matrix.means() {
        for (s, r) in rank_sums.iter_mut().zip(rank_descending(row)) {
            *s += r;
        }
        ties += tie_term(row);
    }
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * rank_sums.iter().map(|r| r * r).sum::<f64>() - 3.0 * nf * (kf + 1.0);
    let correction = 1.0 - ties / (nf * kf * (kf * kf - 1.0));
    let df = kf - 1.0;
    let report = if correction <= 0.0 {
        TestReport::new("friedman", 0.0, 1.0, Side::TwoSided, n, k)
    } else {
        let chi = (raw / correction).max(0.0);
        TestReport::new("friedman", chi, chi2_sf(chi, df), Side::TwoSided, n, k)
    };
    Ok(report.with_df(df, None))
}

/// F-distributed refinement of a Friedman result,
/// `F = (N−1)χ² / (N(k−1) − χ²)` on `(k−1, (k−1)(N−1))` degrees of freedom.
pub fn iman_davenport(friedman: &TestReport) -> Result<TestReport> {
    let (n, k) = (friedman.n as f64, friedman.k as f64);
    let chi = friedman.statistic;
    let denom = n * (k - 1.0) - chi;
    if denom <= 0.0 {
        return Err(Error::Undefined("Iman-Davenport statistic when χ² = N(k−1)"));
    }
    let f = (n - 1.0) * chi / denom;
    let (d1, d2) = (k - 1.0, (k - 1.0) * (n - 1.0));
    Ok(TestReport::new("iman-davenport", f, f_sf(f, d1, d2), Side::TwoSided, friedman.n, friedman.k).with_df(d1, Some(d2)))
}

/// Quade's test: within-dataset ranks weighted by the rank of each
/// dataset's accuracy range (ties averaged in both rankings).
pub fn quade_test(matrix: &AccuracyMatrix) -> Result<TestReport> {
    let (n, k) = shape(matrix)?;
    let (nf, kf) = (n as f64, k as f64);
    let ranges: Vec<f64> = matrix
        .means()
        .iter()
        .map(|row| {
            let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .collect();
    let q = rank_ascending(&ranges);
    let centre = (kf + 1.0) / 2.0;
    let mut a2 = 0.0;
    let mut col = alloc::vec![0.0; k];
    for (row, qi) in matrix.means().iter().zip(&q) {
        for (c, r) in col.iter_mut().zip(rank_ascending(row)) {
            let s = qi * (r - centre);
            a2 += s * s;
            *c += s;
        }
    }
    let b = col.iter().map(|s| s * s).sum::<f64>() / nf;
    let (d1, d2) = (kf - 1.0, (kf - 1.0) * (nf - 1.0));
    if a2 - b <= 0.0 {
        if b == 0.0 {
            return Ok(TestReport::new("quade", 0.0, 1.0, Side::TwoSided, n, k).with_df(d1, Some(d2)));
        }
        return Err(Error::Undefined("Quade statistic when A = B"));
    }
    let f = (nf - 1.0) * b / (a2 - b);
    Ok(TestReport::new("quade", f, f_sf(f, d1, d2), Side::TwoSided, n, k).with_df(d1, Some(d2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::String;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn matrix(rows: Vec<Vec<f64>>) -> AccuracyMatrix {
        let k = rows[0].len();
        let ds: Vec<String> = (0..rows.len()).map(|i| format!("d{i}")).collect();
        let ms: Vec<String> = (0..k).map(|i| format!("m{i}")).collect();
        AccuracyMatrix::new(ds, ms, rows).unwrap()
    }

    #[test]
    fn identical_methods() {
        let m = matrix(vec![vec![0.8, 0.8, 0.8]; 5]);
        let f = friedman_test(&m).unwrap();
        assert_eq!((f.statistic, f.p_value), (0.0, 1.0));
        let id = iman_davenport(&f).unwrap();
        assert_eq!(id.statistic, 0.0);
        assert_relative_eq!(id.p_value, 1.0);
        assert_eq!(quade_test(&m).unwrap().p_value, 1.0);
    }

    #[test]
    fn perfect_agreement_by_hand() {
        // Same ordering on all 4 datasets: rank sums 4, 8, 12, χ² = N(k−1) = 8.
        let m = matrix(vec![vec![0.9, 0.8, 0.7], vec![0.6, 0.5, 0.4], vec![0.95, 0.5, 0.1], vec![0.3, 0.2, 0.1]]);
        let f = friedman_test(&m).unwrap();
        assert_relative_eq!(f.statistic, 8.0, epsilon = 1e-12);
        assert_relative_eq!(f.p_value, (-4.0f64).exp(), max_relative = 1e-10);
        assert!(matches!(iman_davenport(&f), Err(Error::Undefined(_))));
    }

    #[test]
    fn friedman_tie_correction_by_hand() {
        // Rows: (1,2,3) order, and one row with a two-way tie at the top.
        // Rank sums: m0 = 1+1.5 = 2.5, m1 = 2+1.5 = 3.5, m2 = 6.
        // raw = 12/(2·3·4)·(6.25+12.25+36) − 3·2·4 = 3.25; ties = 6;
        // correction = 1 − 6/(2·3·8) = 0.875.
        let m = matrix(vec![vec![3.0, 2.0, 1.0], vec![5.0, 5.0, 1.0]]);
        let f = friedman_test(&m).unwrap();
        assert_relative_eq!(f.statistic, 3.25 / 0.875, epsilon = 1e-12);
        assert_eq!(f.df1, Some(2.0));
    }

    #[test]
    fn monotone_row_transform_is_invisible() {
        let rows = vec![vec![0.1, 0.5, 0.3], vec![0.9, 0.2, 0.4], vec![0.6, 0.6, 0.1], vec![0.3, 0.8, 0.7]];
        let warped: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| crate::math::exp(5.0 * v) - 3.0).collect()).collect();
        assert_eq!(friedman_test(&matrix(rows)).unwrap().statistic, friedman_test(&matrix(warped)).unwrap().statistic);
    }

    #[test]
    fn shape_errors() {
        assert_eq!(friedman_test(&matrix(vec![vec![1.0], vec![2.0]])), Err(Error::TooFewMethods(1)));
        assert_eq!(quade_test(&matrix(vec![vec![1.0, 2.0]])), Err(Error::TooFewDatasets(1)));
    }
}
