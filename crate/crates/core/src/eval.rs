//! Stratified k-fold cross-validation and the accuracy tables it feeds.
//!
//! Run `r` shuffles each class with a ChaCha8 stream seeded by `seed + r`
//! and deals the shuffled instances round-robin into folds, continuing the
//! deal across class boundaries so fold sizes stay within one of each other.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::model::Dataset;

/// A trained (or, for lazy methods, merely bound) classifier.
pub trait Predictor {
    fn predict(&self, x: &[usize]) -> Result<usize>;
}

/// Anything the harness can evaluate. Lazy methods return a predictor that
/// borrows the training set; eager ones precompute a model.
pub trait Classifier: Sync {
    fn id(&self) -> String;
    fn fit<'a>(&self, train: &'a Dataset) -> Result<Box<dyn Predictor + 'a>>;
}

/// Test-set membership for one fold of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldPlan {
    pub run: usize,
    pub fold: usize,
    pub seed: u64,
    pub test: Vec<usize>,
}

impl FoldPlan {
    /// Indices `0..n` not in the test set, ascending.
    pub fn train_indices(&self, n: usize) -> Vec<usize> {
        let mut in_test = vec![false; n];
        for &j in &self.test {
            in_test[j] = true;
        }
        (0..n).filter(|&j| !in_test[j]).collect()
    }
}

/// `runs` independent stratified `k`-fold partitions, ordered by (run, fold).
pub fn stratified_folds(dataset: &Dataset, k: usize, runs: usize, seed: u64) -> Result<Vec<FoldPlan>> {
    let n = dataset.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {k}")));
    }
    if runs == 0 {
        return Err(Error::InvalidParameter("need at least one run".into()));
    }
    if k > n {
        return Err(Error::TooManyFolds { k, n });
    }

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.num_classes()];
    for (j, inst) in dataset.instances.iter().enumerate() {
        let y = inst
            .label
            .ok_or_else(|| Error::InvalidParameter(format!("instance {j} is unlabeled")))?;
        by_class[y].push(j);
    }

    let mut plans = Vec::with_capacity(k * runs);
    for run in 0..runs {
        let run_seed = seed.wrapping_add(run as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
        let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
        let mut slot = 0;
        for members in &by_class {
            let mut members = members.clone();
            members.shuffle(&mut rng);
            for j in members {
                folds[slot % k].push(j);
                slot += 1;
            }
        }
        for (fold, mut test) in folds.into_iter().enumerate() {
            test.sort_unstable();
            plans.push(FoldPlan {
                run,
                fold,
                seed: run_seed,
                test,
            });
        }
    }
    Ok(plans)
}

/// Accuracy of one fold.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldAccuracy {
    pub run: usize,
    pub fold: usize,
    pub correct: usize,
    pub tested: usize,
    pub accuracy: f64,
}

/// Trains on the complement of `plan.test` and scores the test part.
pub fn evaluate_fold(method: &dyn Classifier, dataset: &Dataset, plan: &FoldPlan) -> Result<FoldAccuracy> {
    let wrap = |e: Error| Error::Fold {
        run: plan.run,
        fold: plan.fold,
        source: Box::new(e),
    };
    if plan.test.is_empty() {
        return Err(wrap(Error::InvalidParameter("empty test fold".into())));
    }
    let train = dataset.subset(&plan.train_indices(dataset.len()));
    let predictor = method.fit(&train).map_err(wrap)?;
    let mut correct = 0;
    for &j in &plan.test {
        let inst = &dataset.instances[j];
        if predictor.predict(&inst.values).map_err(wrap)? == dataset.label(j) {
            correct += 1;
        }
    }
    Ok(FoldAccuracy {
        run: plan.run,
        fold: plan.fold,
        correct,
        tested: plan.test.len(),
        accuracy: correct as f64 / plan.test.len() as f64,
    })
}

/// Per-fold accuracies of one method on one dataset with their summary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalResult {
    pub method: String,
    pub dataset: String,
    pub folds: Vec<FoldAccuracy>,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for a single fold.
    pub sd: f64,
}

impl EvalResult {
    /// Sorts folds by (run, fold) and recomputes the summary.
    pub fn from_folds(method: impl Into<String>, dataset: impl Into<String>, mut folds: Vec<FoldAccuracy>) -> Self {
        folds.sort_by_key(|f| (f.run, f.fold));
        let values: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
        let (mean, sd) = mean_sd(&values);
        Self {
            method: method.into(),
            dataset: dataset.into(),
            folds,
            mean,
            sd,
        }
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.accuracy).collect()
    }
}

pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, sqrt(ss / (n - 1) as f64))
}

/// Runs every fold of `plans` sequentially.
pub fn cross_validate(
    method: &dyn Classifier,
    dataset_id: &str,
    dataset: &Dataset,
    plans: &[FoldPlan],
) -> Result<EvalResult> {
    let folds = plans
        .iter()
        .map(|p| evaluate_fold(method, dataset, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalResult::from_folds(method.id(), dataset_id, folds))
}

/// Datasets × methods table of accuracies. Cells always carry a mean; fold
/// level vectors are present when the table was built from live runs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AccuracyMatrix {
    datasets: Vec<String>,
    methods: Vec<String>,
    means: Vec<Vec<f64>>,
    folds: Option<Vec<Vec<Vec<f64>>>>,
}

fn check_unique(ids: &[String]) -> Result<()> {
    for (k, id) in ids.iter().enumerate() {
        if ids[..k].contains(id) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

impl AccuracyMatrix {
    pub fn new(datasets: Vec<String>, methods: Vec<String>, means: Vec<Vec<f64>>) -> Result<Self> {
        check_unique(&datasets)?;
        check_unique(&methods)?;
        if means.len() != datasets.len() || means.iter().any(|row| row.len() != methods.len()) {
            return Err(Error::Ragged);
        }
        Ok(Self {
            datasets,
            methods,
            means,
            folds: None,
        })
    }

    /// `folds[d][m]` holds the per-fold accuracies; means are derived.
    pub fn from_folds(datasets: Vec<String>, methods: Vec<String>, folds: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if folds.len() != datasets.len() || folds.iter().any(|row| row.len() != methods.len()) {
            return Err(Error::Ragged);
        }
        let means = folds
            .iter()
            .map(|row| row.iter().map(|cell| mean_sd(cell).0).collect())
            .collect();
        let mut out = Self::new(datasets, methods, means)?;
        out.folds = Some(folds);
        Ok(out)
    }

    /// Rows in the order results first mention each dataset, columns in the
    /// order they first mention each method.
    pub fn from_results(results: &[EvalResult]) -> Result<Self> {
        let mut datasets: Vec<String> = Vec::new();
        let mut methods: Vec<String> = Vec::new();
        for r in results {
            if !datasets.contains(&r.dataset) {
                datasets.push(r.dataset.clone());
            }
            if !methods.contains(&r.method) {
                methods.push(r.method.clone());
            }
        }
        let mut folds: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; methods.len()]; datasets.len()];
        for r in results {
            let d = datasets.iter().position(|x| *x == r.dataset).unwrap_or_default();
            let m = methods.iter().position(|x| *x == r.method).unwrap_or_default();
            if folds[d][m].is_some() {
                return Err(Error::DuplicateId(format!("{}/{}", r.dataset, r.method)));
            }
            folds[d][m] = Some(r.accuracies());
        }
        let folds = folds
            .into_iter()
            .map(|row| row.into_iter().collect::<Option<Vec<_>>>().ok_or(Error::Ragged))
            .collect::<Result<Vec<_>>>()?;
        Self::from_folds(datasets, methods, folds)
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn has_folds(&self) -> bool {
        self.folds.is_some()
    }

    pub fn method_index(&self, method: &str) -> Result<usize> {
        self.methods
            .iter()
            .position(|m| m == method)
            .ok_or_else(|| Error::UnknownMethod(method.into()))
    }

    pub fn dataset_index(&self, dataset: &str) -> Result<usize> {
        self.datasets
            .iter()
            .position(|d| d == dataset)
            .ok_or_else(|| Error::UnknownDataset(dataset.into()))
    }

    /// Mean accuracies of one method, one entry per dataset.
    pub fn column(&self, method: &str) -> Result<Vec<f64>> {
        let m = self.method_index(method)?;
        Ok(self.means.iter().map(|row| row[m]).collect())
    }

    pub fn fold_values(&self, dataset: &str, method: &str) -> Result<Option<&[f64]>> {
        let d = self.dataset_index(dataset)?;
        let m = self.method_index(method)?;
        Ok(self.folds.as_ref().map(|f| f[d][m].as_slice()))
    }

    /// Sub-table with the given methods, in the given order.
    pub fn select_methods<S: AsRef<str>>(&self, methods: &[S]) -> Result<Self> {
        let idx = methods
            .iter()
            .map(|m| self.method_index(m.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let pick = |row: &Vec<f64>| idx.iter().map(|&i| row[i]).collect::<Vec<_>>();
        let mut out = Self::new(
            self.datasets.clone(),
            idx.iter().map(|&i| self.methods[i].clone()).collect(),
            self.means.iter().map(pick).collect(),
        )?;
        out.folds = self
            .folds
            .as_ref()
            .map(|f| f.iter().map(|row| idx.iter().map(|&i| row[i].clone()).collect()).collect());
        Ok(out)
    }

    /// Appends a column of means. The result carries no fold-level data.
    pub fn with_column(&self, method: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.datasets.len() {
            return Err(Error::Ragged);
        }
        let mut methods = self.methods.clone();
        methods.push(method.into());
        let means = self
            .means
            .iter()
            .zip(values)
            .map(|(row, v)| {
                let mut row = row.clone();
                row.push(v);
                row
            })
            .collect();
        Self::new(self.datasets.clone(), methods, means)
    }
}
