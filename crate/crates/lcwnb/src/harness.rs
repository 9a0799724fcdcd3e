//! Loading, method selection and parallel evaluation.
//!
//! Work is split into (dataset, method, fold) items and farmed out with
//! rayon. Results are assembled in item order, so output never depends on
//! the worker count.

use std::path::Path;

use rayon::prelude::*;

use lcwnb_core::eval::{evaluate_fold, stratified_folds, AccuracyMatrix, Classifier, EvalResult, FoldPlan};
use lcwnb_core::lcwnb::{Kappa, Lcwnb};
use lcwnb_core::nb::NaiveBayes;
use lcwnb_core::stats::{permutation_replicate, summarize_replicates, BoundStatistic, PermutationBounds};
use lcwnb_core::Dataset;

use crate::arff::parse_arff;
use crate::csv_input::{parse_csv, CsvOptions};
use crate::error::{Error, Result};
use crate::preprocess::{preprocess, PreprocessOptions, PreprocessReport};
use crate::raw::RawDataset;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LCWNB_THREADS";

/// Parses `nb`, `lcwnb:<κ>` or `lcwnb:auto`.
pub fn parse_method(spec: &str) -> Result<Box<dyn Classifier>> {
    let spec = spec.trim();
    if spec == "nb" {
        return Ok(Box::new(NaiveBayes));
    }
    let Some(k) = spec.strip_prefix("lcwnb:") else {
        return Err(Error::Usage(format!(
            "unknown method `{spec}` (expected nb, lcwnb:<kappa> or lcwnb:auto)"
        )));
    };
    if k == "auto" {
        return Ok(Box::new(Lcwnb::new(Kappa::Auto)));
    }
    match k.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Box::new(Lcwnb::new(Kappa::Fixed(v)))),
        _ => Err(Error::Usage(format!("kappa must be a positive number, got `{k}`"))),
    }
}

/// Reads an ARFF or CSV file (chosen by extension; `.tsv` is tab-separated
/// CSV). `class` overrides the class column.
pub fn read_raw(path: &Path, csv: &CsvOptions, class: Option<&str>) -> Result<RawDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let located = |e: Error| match e {
        Error::Parse { line, message } => Error::Ingest(format!("{}:{line}: {message}", path.display())),
        Error::Ingest(m) => Error::Ingest(format!("{}: {m}", path.display())),
        other => other,
    };
    let mut raw = match ext.as_str() {
        "arff" => parse_arff(&text).map_err(located)?,
        "csv" | "tsv" => {
            let mut opts = csv.clone();
            if ext == "tsv" {
                opts.delimiter = b'\t';
            }
            if let Some(c) = class {
                opts.class_column = Some(c.to_string());
            }
            parse_csv(&text, &opts).map_err(located)?
        }
        _ => {
            return Err(Error::Ingest(format!(
                "{}: unrecognised extension (expected .arff, .csv or .tsv)",
                path.display()
            )))
        }
    };
    if let (Some(c), "arff") = (class, ext.as_str()) {
        raw.set_class(c).map_err(located)?;
    }
    Ok(raw)
}

/// A dataset ready for evaluation, named after its file stem.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub name: String,
    pub data: Dataset,
    pub report: PreprocessReport,
}

pub fn load_dataset(
    path: &Path,
    csv: &CsvOptions,
    class: Option<&str>,
    options: &PreprocessOptions,
) -> Result<LoadedDataset> {
    let raw = read_raw(path, csv, class)?;
    let (data, report) = preprocess(&raw, options)?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    Ok(LoadedDataset { name, data, report })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvConfig {
    pub folds: usize,
    pub runs: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 10,
            runs: 10,
            seed: 1,
        }
    }
}

/// Cross-validates every method on every dataset. All methods see the same
/// folds of a dataset, so fold accuracies are paired. Results come back
/// ordered by dataset, then method.
pub fn evaluate(
    datasets: &[(&str, &Dataset)],
    methods: &[&dyn Classifier],
    config: CvConfig,
) -> Result<Vec<EvalResult>> {
    let plans: Vec<Vec<FoldPlan>> = datasets
        .iter()
        .map(|(name, d)| {
            stratified_folds(d, config.folds, config.runs, config.seed)
                .map_err(|e| Error::Ingest(format!("{name}: {e}")))
        })
        .collect::<Result<_>>()?;
    let items: Vec<(usize, usize, usize)> = plans
        .iter()
        .enumerate()
        .flat_map(|(d, p)| (0..methods.len()).flat_map(move |m| (0..p.len()).map(move |f| (d, m, f))))
        .collect();
    let outcomes: Vec<_> = items
        .par_iter()
        .map(|&(d, m, f)| evaluate_fold(methods[m], datasets[d].1, &plans[d][f]))
        .collect();

    let mut results = Vec::with_capacity(datasets.len() * methods.len());
    let mut outcomes = outcomes.into_iter();
    for (d, (name, _)) in datasets.iter().enumerate() {
        for method in methods {
            let folds = outcomes
                .by_ref()
                .take(plans[d].len())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Ingest(format!("{name}: {e}")))?;
            results.push(EvalResult::from_folds(method.id(), *name, folds));
        }
    }
    Ok(results)
}

/// Same bounds as [`lcwnb_core::stats::permutation_bounds`], with
/// replicates computed in parallel.
pub fn permutation_bounds_parallel(
    matrix: &AccuracyMatrix,
    statistic: BoundStatistic,
    n_perm: usize,
    seed: u64,
) -> Result<PermutationBounds> {
    let base = statistic.base_rows(matrix);
    let replicates: Vec<(f64, f64)> = (0..n_perm as u64)
        .into_par_iter()
        .map(|i| permutation_replicate(&base, seed, i))
        .collect();
    Ok(summarize_replicates(matrix, statistic, seed, &replicates)?)
}

/// Runs `f` on a pool sized by [`THREADS_ENV`], or rayon's default.
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => return Err(Error::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Threads(e.to_string()))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lcwnb_core::stats::permutation_bounds;
    use lcwnb_core::{AttributeSchema, ClassSchema, Instance};

    fn toy() -> Dataset {
        let rows = [(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1), (0, 0, 0), (1, 1, 1), (0, 1, 1), (1, 0, 0)];
        Dataset::try_new(
            vec![AttributeSchema::new("a", ["0", "1"]), AttributeSchema::new("b", ["0", "1"])],
            ClassSchema::new(["p", "q"]),
            rows.iter().map(|&(a, b, y)| Instance::labeled(vec![a, b], y)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn method_specs() {
        assert_eq!(parse_method("nb").unwrap().id(), "nb");
        assert_eq!(parse_method("lcwnb:5").unwrap().id(), "lcwnb:5");
        assert_eq!(parse_method("lcwnb:auto").unwrap().id(), "lcwnb:auto");
        for bad in ["knn", "lcwnb:", "lcwnb:0", "lcwnb:-1", "lcwnb:inf"] {
            assert!(matches!(parse_method(bad), Err(Error::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let d = toy();
        let nb = parse_method("nb").unwrap();
        let lc = parse_method("lcwnb:2").unwrap();
        let cfg = CvConfig { folds: 4, runs: 3, seed: 9 };
        let par = evaluate(&[("toy", &d)], &[nb.as_ref(), lc.as_ref()], cfg).unwrap();
        let plans = stratified_folds(&d, 4, 3, 9).unwrap();
        let seq = lcwnb_core::eval::cross_validate(lc.as_ref(), "toy", &d, &plans).unwrap();
        assert_eq!(par[1], seq);
        assert_eq!(par[0].method, "nb");
        assert_eq!(par[0].folds.len(), 12);
    }

    #[test]
    fn too_many_folds_is_reported() {
        let d = toy();
        let nb = parse_method("nb").unwrap();
        let err = evaluate(&[("toy", &d)], &[nb.as_ref()], CvConfig { folds: 20, runs: 1, seed: 1 }).unwrap_err();
        assert!(err.to_string().contains("k > n"), "{err}");
    }

    #[test]
    fn parallel_bounds_match() {
        let m = AccuracyMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![0.1, 0.5, 0.9], vec![0.3, 0.2, 0.8], vec![0.6, 0.4, 0.5]],
        )
        .unwrap();
        for stat in [BoundStatistic::MeanAccuracy, BoundStatistic::MeanRank] {
            assert_eq!(
                permutation_bounds_parallel(&m, stat, 300, 5).unwrap(),
                permutation_bounds(&m, stat, 300, 5).unwrap()
            );
        }
    }
}
