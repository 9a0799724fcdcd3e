//! Statistical comparison of the methods in an accuracy matrix.

use std::fmt::Write as _;

use serde::Serialize;

use lcwnb_core::eval::AccuracyMatrix;
use lcwnb_core::stats::{
    binomial_tail, friedman_test, iman_davenport, mean_rank_z_test, mean_ranks, paired_t_test, quade_test,
    wilcoxon_signed_rank, BoundStatistic, PermutationBounds, RankTable, Side, TestReport, Verdict,
};

use crate::error::{Error, Result};
use crate::harness::permutation_bounds_parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Friedman,
    ImanDavenport,
    Quade,
    Wilcoxon,
    TTest,
    Ranks,
    ZTest,
    Permutation,
    RankCounts,
}

impl TestKind {
    pub const ALL: [TestKind; 9] = [
        TestKind::Friedman,
        TestKind::ImanDavenport,
        TestKind::Quade,
        TestKind::Wilcoxon,
        TestKind::TTest,
        TestKind::Ranks,
        TestKind::ZTest,
        TestKind::Permutation,
        TestKind::RankCounts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Friedman => "friedman",
            TestKind::ImanDavenport => "id",
            TestKind::Quade => "quade",
            TestKind::Wilcoxon => "wilcoxon",
            TestKind::TTest => "ttest",
            TestKind::Ranks => "ranks",
            TestKind::ZTest => "ztest",
            TestKind::Permutation => "permutation",
            TestKind::RankCounts => "rank-counts",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|t| t.name()).collect();
                Error::Usage(format!("unknown test `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub tests: Vec<TestKind>,
    /// Method for the mean-rank z-test; the first method when `None`.
    pub target: Option<String>,
    /// Reference method for paired tests; the first method when `None`.
    pub baseline: Option<String>,
    pub alpha: f64,
    pub permutations: usize,
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            tests: vec![TestKind::Friedman, TestKind::ImanDavenport, TestKind::Quade, TestKind::Ranks],
            target: None,
            baseline: None,
            alpha: 0.05,
            permutations: 9999,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRank {
    pub method: String,
    pub mean_rank: f64,
}

/// One-sided Wilcoxon test that the baseline beats `other` on dataset means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedComparison {
    pub baseline: String,
    pub other: String,
    pub report: TestReport,
}

/// Paired t-tests of the baseline against one method on every dataset,
/// tallied from the baseline's side. A non-significant zero mean difference
/// counts half to each marginal category.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TTestTally {
    pub baseline: String,
    pub other: String,
    pub significantly_worse: f64,
    pub marginally_worse: f64,
    pub marginally_better: f64,
    pub significantly_better: f64,
    /// Pr(Binomial(N, 1/2) ≥ ⌈better⌉): chance of the baseline doing at
    /// least this well if each dataset were a fair coin.
    pub sign_p_value: f64,
    pub per_dataset: Vec<(String, Verdict, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCount {
    pub method: String,
    /// `counts[r]`: datasets on which the method has rank exactly `r + 1`.
    pub counts: Vec<usize>,
    /// Datasets with a fractional (tied) rank.
    pub tied: usize,
    /// `p_values[r]` is `Pr(Binomial(N, 1/k) ≥ counts[r])`.
    pub p_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub datasets: usize,
    pub methods: Vec<String>,
    pub mean_ranks: Option<Vec<MeanRank>>,
    pub tests: Vec<TestReport>,
    pub wilcoxon: Vec<PairedComparison>,
    pub ttest: Vec<TTestTally>,
    pub permutation: Vec<PermutationBounds>,
    pub rank_counts: Option<Vec<RankCount>>,
}

fn pick(option: &Option<String>, matrix: &AccuracyMatrix) -> Result<String> {
    let name = option.clone().unwrap_or_else(|| matrix.methods()[0].clone());
    matrix.method_index(&name)?;
    Ok(name)
}

pub fn compare(matrix: &AccuracyMatrix, options: &CompareOptions) -> Result<CompareReport> {
    let k = matrix.methods().len();
    if k < 2 {
        return Err(lcwnb_core::Error::TooFewMethods(k).into());
    }
    let has = |t: TestKind| options.tests.contains(&t);
    let ranks = mean_ranks(matrix);
    let mut report = CompareReport {
        datasets: matrix.datasets().len(),
        methods: matrix.methods().to_vec(),
        mean_ranks: None,
        tests: Vec::new(),
        wilcoxon: Vec::new(),
        ttest: Vec::new(),
        permutation: Vec::new(),
        rank_counts: None,
    };

    if has(TestKind::Ranks) {
        report.mean_ranks = Some(
            ranks
                .methods
                .iter()
                .zip(ranks.mean_ranks())
                .map(|(m, r)| MeanRank {
                    method: m.clone(),
                    mean_rank: r,
                })
                .collect(),
        );
    }
    if has(TestKind::Friedman) || has(TestKind::ImanDavenport) {
        let f = friedman_test(matrix)?;
        if has(TestKind::ImanDavenport) {
            let id = iman_davenport(&f)?;
            if has(TestKind::Friedman) {
                report.tests.push(f);
            }
            report.tests.push(id);
        } else {
            report.tests.push(f);
        }
    }
    if has(TestKind::Quade) {
        report.tests.push(quade_test(matrix)?);
    }
    if has(TestKind::ZTest) {
        let target = pick(&options.target, matrix)?;
        report.tests.push(mean_rank_z_test(&ranks, &target)?);
    }
    if has(TestKind::Wilcoxon) || has(TestKind::TTest) {
        let baseline = pick(&options.baseline, matrix)?;
        let base_col = matrix.column(&baseline)?;
        for other in matrix.methods().iter().filter(|m| **m != baseline) {
            if has(TestKind::Wilcoxon) {
                let col = matrix.column(other)?;
                report.wilcoxon.push(PairedComparison {
                    baseline: baseline.clone(),
                    other: other.clone(),
                    report: wilcoxon_signed_rank(&base_col, &col, Side::Greater)?,
                });
            }
            if has(TestKind::TTest) {
                report.ttest.push(ttest_tally(matrix, &baseline, other, options.alpha)?);
            }
        }
    }
    if has(TestKind::Permutation) {
        for stat in [BoundStatistic::MeanAccuracy, BoundStatistic::MeanRank] {
            report
                .permutation
                .push(permutation_bounds_parallel(matrix, stat, options.permutations, options.seed)?);
        }
    }
    if has(TestKind::RankCounts) {
        report.rank_counts = Some(rank_counts(&ranks)?);
    }
    Ok(report)
}

fn ttest_tally(matrix: &AccuracyMatrix, baseline: &str, other: &str, alpha: f64) -> Result<TTestTally> {
    let mut tally = TTestTally {
        baseline: baseline.into(),
        other: other.into(),
        significantly_worse: 0.0,
        marginally_worse: 0.0,
        marginally_better: 0.0,
        significantly_better: 0.0,
        sign_p_value: 1.0,
        per_dataset: Vec::new(),
    };
    for d in matrix.datasets() {
        let (Some(a), Some(b)) = (matrix.fold_values(d, baseline)?, matrix.fold_values(d, other)?) else {
            return Err(Error::Usage(
                "the ttest needs fold-level accuracies (use --fold-results)".into(),
            ));
        };
        let t = paired_t_test(a, b, alpha)?;
        match t.verdict {
            Verdict::Better => tally.significantly_better += 1.0,
            Verdict::Worse => tally.significantly_worse += 1.0,
            Verdict::NoDifference if t.mean_difference > 0.0 => tally.marginally_better += 1.0,
            Verdict::NoDifference if t.mean_difference < 0.0 => tally.marginally_worse += 1.0,
            Verdict::NoDifference => {
                tally.marginally_better += 0.5;
                tally.marginally_worse += 0.5;
            }
        }
        tally.per_dataset.push((d.clone(), t.verdict, t.report.p_value));
    }
    let n = matrix.datasets().len() as u64;
    let better = (tally.marginally_better + tally.significantly_better).ceil() as u64;
    tally.sign_p_value = binomial_tail(n, 0.5, better.min(n))?;
    Ok(tally)
}

pub fn rank_counts(ranks: &RankTable) -> Result<Vec<RankCount>> {
    let k = ranks.num_methods();
    let n = ranks.num_datasets() as u64;
    (0..k)
        .map(|m| {
            let mut counts = vec![0usize; k];
            let mut tied = 0;
            for row in &ranks.ranks {
                let r = row[m];
                if r.fract() == 0.0 {
                    counts[r as usize - 1] += 1;
                } else {
                    tied += 1;
                }
            }
            let p_values = counts
                .iter()
                .map(|&c| binomial_tail(n, 1.0 / k as f64, c as u64))
                .collect::<lcwnb_core::Result<Vec<_>>>()?;
            Ok(RankCount {
                method: ranks.methods[m].clone(),
                counts,
                tied,
                p_values,
            })
        })
        .collect()
}

/// Per-dataset ranks as TSV, one column per method.
pub fn ranks_tsv(ranks: &RankTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dataset\t{}", ranks.methods.join("\t"));
    for (d, row) in ranks.datasets.iter().zip(&ranks.ranks) {
        let cells: Vec<String> = row.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(out, "{d}\t{}", cells.join("\t"));
    }
    out
}

fn test_line(out: &mut String, t: &TestReport) {
    let _ = write!(out, "{:<16} statistic {:>10.4}  p {:.4e}", t.name, t.statistic, t.p_value);
    match (t.df1, t.df2) {
        (Some(a), Some(b)) => {
            let _ = write!(out, "  df ({a}, {b})");
        }
        (Some(a), None) => {
            let _ = write!(out, "  df {a}");
        }
        _ => {}
    }
    let _ = writeln!(out, "  N {} k {}", t.n, t.k);
}

pub fn render_text(report: &CompareReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} datasets, {} methods: {}", report.datasets, report.methods.len(), report.methods.join(", "));
    if let Some(ranks) = &report.mean_ranks {
        let _ = writeln!(out, "\nmean ranks");
        for r in ranks {
            let _ = writeln!(out, "  {:<12} {:.4}", r.method, r.mean_rank);
        }
    }
    if !report.tests.is_empty() {
        let _ = writeln!(out, "\ntests");
        for t in &report.tests {
            out.push_str("  ");
            test_line(&mut out, t);
        }
    }
    if !report.wilcoxon.is_empty() {
        let _ = writeln!(out, "\nwilcoxon signed-rank, one-sided (baseline better)");
        for w in &report.wilcoxon {
            let _ = writeln!(
                out,
                "  {} vs {:<12} W+ {:>8.1}  p {:.4e}",
                w.baseline, w.other, w.report.statistic, w.report.p_value
            );
        }
    }
    if !report.ttest.is_empty() {
        let _ = writeln!(out, "\npaired t-tests per dataset (s.w. / m.w. / m.b. / s.b.)");
        for t in &report.ttest {
            let _ = writeln!(
                out,
                "  {} vs {:<12} {} / {} / {} / {}  sign p {:.4e}",
                t.baseline,
                t.other,
                t.significantly_worse,
                t.marginally_worse,
                t.marginally_better,
                t.significantly_better,
                t.sign_p_value
            );
        }
    }
    for b in &report.permutation {
        let name = match b.statistic {
            BoundStatistic::MeanAccuracy => "mean accuracy",
            BoundStatistic::MeanRank => "mean rank",
        };
        let _ = writeln!(
            out,
            "\n95% simultaneous bounds for {name} ({} permutations, seed {}): [{:.4}, {:.4}]",
            b.n_perm, b.seed, b.lower, b.upper
        );
        for ((m, v), o) in b.methods.iter().zip(&b.observed).zip(&b.outside) {
            let _ = writeln!(out, "  {:<12} {:.4}{}", m, v, if *o { "  outside" } else { "" });
        }
    }
    if let Some(counts) = &report.rank_counts {
        let _ = writeln!(out, "\nrank counts (datasets at each rank, tied, binomial p)");
        for c in counts {
            let cells: Vec<String> = c.counts.iter().zip(&c.p_values).map(|(n, p)| format!("{n} ({p:.3e})")).collect();
            let _ = writeln!(out, "  {:<12} {}  tied {}", c.method, cells.join("  "), c.tied);
        }
    }
    out
}
