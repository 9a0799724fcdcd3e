//! Laplace-smoothed naive Bayes, and a weighted relative-frequency estimator
//! for arbitrary cell weights.
//!
//! [`weighted_nb_oracle`] sums over the observed frequency table directly and
//! takes the weight as an opaque callback. It shares no counting code with
//! [`crate::lcwnb`], which makes it usable as a reference for that module.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eval::{Classifier, Predictor};
use crate::math::ln;
use crate::model::{ClassScores, Dataset};

/// Class counts `n_y` and conditional counts `c(i, v, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NbModel {
    class_counts: Vec<usize>,
    cardinalities: Vec<usize>,
    offsets: Vec<usize>,
    counts: Vec<usize>,
}

impl NbModel {
    pub fn num_instances(&self) -> usize {
        self.class_counts.iter().sum()
    }

    pub fn num_classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    /// `#{training instances with X_i = v and Y = y}`.
    pub fn count(&self, attribute: usize, value: usize, class: usize) -> usize {
        let r = self.class_counts.len();
        self.counts[self.offsets[attribute] + value * r + class]
    }

    /// Log of `(1+n_y)/(r+n) · Π_i (1+c(i,x_i,y))/(q_i+n_y)` per class.
    pub fn predict(&self, x: &[usize]) -> ClassScores {
        debug_assert_eq!(x.len(), self.cardinalities.len());
        let r = self.class_counts.len();
        let n = self.num_instances() as f64;
        let log_prior_denominator = ln(r as f64 + n);
        let scores = (0..r)
            .map(|y| {
                let ny = self.class_counts[y] as f64;
                let mut s = ln(1.0 + ny) - log_prior_denominator;
                for (i, (&v, &q)) in x.iter().zip(&self.cardinalities).enumerate() {
                    s += ln(1.0 + self.count(i, v, y) as f64) - ln(q as f64 + ny);
                }
                s
            })
            .collect();
        ClassScores::from_log_scores(scores)
    }
}

/// Tabulates class and conditional counts.
pub fn fit_nb(train: &Dataset) -> Result<NbModel> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let r = train.num_classes();
    let cardinalities = train.cardinalities();
    let mut offsets = Vec::with_capacity(cardinalities.len());
    let mut total = 0;
    for &q in &cardinalities {
        offsets.push(total);
        total += q * r;
    }
    let mut class_counts = vec![0usize; r];
    let mut counts = vec![0usize; total];
    for inst in &train.instances {
        let y = inst.label.ok_or(Error::InvalidParameter(
            "naive Bayes needs labeled training instances".into(),
        ))?;
        class_counts[y] += 1;
        for (i, &v) in inst.values.iter().enumerate() {
            counts[offsets[i] + v * r + y] += 1;
        }
    }
    Ok(NbModel {
        class_counts,
        cardinalities,
        offsets,
        counts,
    })
}

/// Convenience wrapper: `fit_nb(train)?.predict(x)` with schema checks on `x`.
pub fn predict_nb(model: &NbModel, x: &[usize]) -> Result<ClassScores> {
    if x.len() != model.num_attributes() {
        return Err(Error::LengthMismatch {
            expected: model.num_attributes(),
            found: x.len(),
        });
    }
    Ok(model.predict(x))
}

/// Naive Bayes as a [`Classifier`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NaiveBayes;

impl Predictor for NbModel {
    fn predict(&self, x: &[usize]) -> Result<usize> {
        predict_nb(self, x).map(|s| s.prediction)
    }
}

impl Classifier for NaiveBayes {
    fn id(&self) -> String {
        "nb".into()
    }

    fn fit<'a>(&self, train: &'a Dataset) -> Result<Box<dyn Predictor + 'a>> {
        Ok(Box::new(fit_nb(train)?))
    }
}

/// Unsmoothed weighted estimates at a query point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedEstimates {
    /// Weighted class mass `Σ_x f(x,y) w(x,y)`.
    pub class_mass: Vec<f64>,
    /// `Pr_w(Y = y)`.
    pub class_probs: Vec<f64>,
    /// `Pr_w(X_i = x*_i | Y = y)` indexed `[y][i]`; `None` when class `y` has
    /// zero weighted mass.
    pub conditional: Vec<Vec<Option<f64>>>,
    /// `Pr_w(Y=y) · Π_i Pr_w(X_i=x*_i|Y=y)`, zero for massless classes.
    pub scores: Vec<f64>,
}

/// Weighted relative-frequency estimates for the query `x`, summing
/// `f(x,y)·w(x,y)` over the distinct cells observed in `train`.
pub fn weighted_nb_oracle<W>(train: &Dataset, weight: W, x: &[usize]) -> Result<WeightedEstimates>
where
    W: Fn(&[usize], usize) -> f64,
{
    let m = train.num_attributes();
    let r = train.num_classes();
    if x.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: x.len(),
        });
    }

    let mut frequency: BTreeMap<(&[usize], usize), usize> = BTreeMap::new();
    for inst in &train.instances {
        let y = inst.label.ok_or(Error::InvalidParameter(
            "weighted estimates need labeled training instances".into(),
        ))?;
        *frequency.entry((inst.values.as_slice(), y)).or_insert(0) += 1;
    }

    let mut class_mass = vec![0.0; r];
    let mut matching_mass = vec![vec![0.0; m]; r];
    for (&(cell, y), &f) in &frequency {
        let w = weight(cell, y);
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeight(w));
        }
        let fw = f as f64 * w;
        class_mass[y] += fw;
        for i in 0..m {
            if cell[i] == x[i] {
                matching_mass[y][i] += fw;
            }
        }
    }

    let total: f64 = class_mass.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateWeight);
    }

    let class_probs: Vec<f64> = class_mass.iter().map(|&s| s / total).collect();
    let conditional: Vec<Vec<Option<f64>>> = (0..r)
        .map(|y| {
            (0..m)
                .map(|i| (class_mass[y] > 0.0).then(|| matching_mass[y][i] / class_mass[y]))
                .collect()
        })
        .collect();
    let scores = (0..r)
        .map(|y| {
            conditional[y]
                .iter()
                .fold(class_probs[y], |acc, p| acc * p.unwrap_or(0.0))
        })
        .collect();

    Ok(WeightedEstimates {
        class_mass,
        class_probs,
        conditional,
        scores,
    })
}
