//! Lazy cell-weighted naive Bayes.
//!
//! For a test instance `x*`, a training instance `(x, y)` gets weight
//! `γ_y^H(x, x*)`, with `0⁰ = 1`. Each class picks its own `γ_y` so that the
//! expected number of class-`y` instances surviving acceptance-rejection
//! sampling, `S_y = Σ_ℓ V_ℓ(y) γ_y^ℓ`, lands as close as possible to a
//! target `κ`. Weights are then rescaled by `ρ` (total weight over total
//! squared weight) and plugged into Laplace estimators.
//!
//! Per test instance the cost is `O(mn + rmK)`: two linear scans over the
//! training set plus `K` bisection steps per class.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eval::{Classifier, Predictor};
use crate::math::ln;
use crate::model::{hamming_unchecked, ClassScores, Dataset};

/// Bisection steps used when none are given; resolves `γ` to `2⁻⁴⁰`.
pub const DEFAULT_ITERATIONS: usize = 40;

/// `V[y][ℓ]`: number of class-`y` training instances at Hamming distance `ℓ`
/// from the test instance.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceProfile {
    rows: Vec<Vec<usize>>,
}

impl DistanceProfile {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        Self { rows }
    }

    pub fn row(&self, class: usize) -> &[usize] {
        &self.rows[class]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn num_classes(&self) -> usize {
        self.rows.len()
    }

    /// `n_y = Σ_ℓ V[y][ℓ]`.
    pub fn class_total(&self, class: usize) -> usize {
        self.rows[class].iter().sum()
    }

    pub fn total(&self) -> usize {
        self.rows.iter().flatten().sum()
    }
}

fn check_query(train: &Dataset, x: &[usize]) -> Result<()> {
    train.check_query(x)
}

/// Counts training instances per (class, distance) in one pass.
pub fn distance_profile(train: &Dataset, x: &[usize]) -> Result<DistanceProfile> {
    check_query(train, x)?;
    let (profile, _) = profile_with_distances(train, x);
    Ok(profile)
}

fn profile_with_distances(train: &Dataset, x: &[usize]) -> (DistanceProfile, Vec<usize>) {
    let m = train.num_attributes();
    let mut rows = vec![vec![0usize; m + 1]; train.num_classes()];
    let mut distances = Vec::with_capacity(train.len());
    for (j, inst) in train.instances.iter().enumerate() {
        let h = hamming_unchecked(&inst.values, x);
        rows[train.label(j)][h] += 1;
        distances.push(h);
    }
    (DistanceProfile { rows }, distances)
}

/// `Σ_ℓ V[ℓ] γ^ℓ` by Horner's rule, so `expected_size(v, 0.0) == v[0]`.
pub fn expected_size(row: &[usize], gamma: f64) -> f64 {
    row.iter().rev().fold(0.0, |acc, &v| acc * gamma + v as f64)
}

/// Outcome of the per-class `γ` search.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GammaChoice {
    pub gamma: f64,
    /// Achieved `S_y = expected_size(V, γ)`.
    pub size: f64,
    /// The class has no training instances.
    pub empty: bool,
}

/// Picks `γ ∈ [0, 1]` whose expected size is closest to `κ`:
/// the target is `min(max(V[0], κ), Σ V)` and the endpoints are returned
/// exactly, otherwise `γ` is bisected `iterations` times.
pub fn select_gamma(row: &[usize], kappa: f64, iterations: usize) -> Result<GammaChoice> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    if iterations == 0 {
        return Err(Error::InvalidParameter("need at least one bisection step".into()));
    }
    let total: usize = row.iter().sum();
    if total == 0 {
        return Ok(GammaChoice {
            gamma: 1.0,
            size: 0.0,
            empty: true,
        });
    }
    let exact = row.first().copied().unwrap_or(0) as f64;
    let total = total as f64;
    let target = exact.max(kappa).min(total);

    let gamma = if target >= total {
        1.0
    } else if target <= exact {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..iterations {
            let mid = 0.5 * (lo + hi);
            if expected_size(row, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(GammaChoice {
        gamma,
        size: expected_size(row, gamma),
        empty: false,
    })
}

/// `ρ = Σ_k S_k / Σ_k Σ_ℓ V_ℓ(k) γ_k^{2ℓ}`; always at least 1.
pub fn weight_multiplier(profile: &DistanceProfile, gamma: &[f64]) -> Result<f64> {
    if gamma.len() != profile.num_classes() {
        return Err(Error::LengthMismatch {
            expected: profile.num_classes(),
            found: gamma.len(),
        });
    }
    let mut weight = 0.0;
    let mut squared = 0.0;
    for (row, &g) in profile.rows.iter().zip(gamma) {
        weight += expected_size(row, g);
        squared += expected_size(row, g * g);
    }
    if squared <= 0.0 {
        return Err(Error::AllClassesEmpty);
    }
    Ok(weight / squared)
}

/// Per-class `γ_y`, `S_y`, and the shared multiplier `ρ` for one test instance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LocalityParams {
    pub kappa: f64,
    pub gamma: Vec<f64>,
    pub size: Vec<f64>,
    pub empty: Vec<bool>,
    pub rho: f64,
    pub iterations: usize,
}

pub fn locality_params(profile: &DistanceProfile, kappa: f64, iterations: usize) -> Result<LocalityParams> {
    let choices = profile
        .rows
        .iter()
        .map(|row| select_gamma(row, kappa, iterations))
        .collect::<Result<Vec<_>>>()?;
    let gamma: Vec<f64> = choices.iter().map(|c| c.gamma).collect();
    let rho = weight_multiplier(profile, &gamma)?;
    Ok(LocalityParams {
        kappa,
        gamma,
        size: choices.iter().map(|c| c.size).collect(),
        empty: choices.iter().map(|c| c.empty).collect(),
        rho,
        iterations,
    })
}

/// `T(i, y) = Σ_j γ_y^{H(x_j, x*)} · [x_{j,i} = x*_i] · [y_j = y]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedCounts {
    num_classes: usize,
    values: Vec<f64>,
}

impl WeightedCounts {
    pub fn get(&self, attribute: usize, class: usize) -> f64 {
        self.values[attribute * self.num_classes + class]
    }

    pub fn num_attributes(&self) -> usize {
        self.values.len() / self.num_classes.max(1)
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }
}

// γ_y^ℓ for ℓ = 0..=m, row-major by class; 0⁰ = 1.
fn power_table(gamma: &[f64], m: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(gamma.len() * (m + 1));
    for &g in gamma {
        let mut p = 1.0;
        for _ in 0..=m {
            table.push(p);
            p *= g;
        }
    }
    table
}

fn accumulate_counts(train: &Dataset, x: &[usize], gamma: &[f64], distances: &[usize]) -> WeightedCounts {
    let m = train.num_attributes();
    let r = train.num_classes();
    let powers = power_table(gamma, m);
    let mut values = vec![0.0; m * r];
    for (j, inst) in train.instances.iter().enumerate() {
        let y = train.label(j);
        let w = powers[y * (m + 1) + distances[j]];
        if w == 0.0 {
            continue;
        }
        for (i, (&a, &b)) in inst.values.iter().zip(x).enumerate() {
            if a == b {
                values[i * r + y] += w;
            }
        }
    }
    WeightedCounts { num_classes: r, values }
}

pub fn weighted_feature_counts(train: &Dataset, x: &[usize], gamma: &[f64]) -> Result<WeightedCounts> {
    check_query(train, x)?;
    if gamma.len() != train.num_classes() {
        return Err(Error::LengthMismatch {
            expected: train.num_classes(),
            found: gamma.len(),
        });
    }
    if let Some(&g) = gamma.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::InvalidParameter(format!("gamma must lie in [0, 1], got {g}")));
    }
    let distances: Vec<usize> = train
        .instances
        .iter()
        .map(|inst| hamming_unchecked(&inst.values, x))
        .collect();
    Ok(accumulate_counts(train, x, gamma, &distances))
}

/// `log Q(y) = log(1+ρS_y) + Σ_i [log(1+ρT(i,y)) − log(q_i+ρS_y)]`.
///
/// The class-independent factor `1/(r + ρ Σ_k S_k)` is left out, so scores
/// are unnormalized.
pub fn score(params: &LocalityParams, counts: &WeightedCounts, cardinalities: &[usize]) -> ClassScores {
    let rho = params.rho;
    let scores = params
        .size
        .iter()
        .enumerate()
        .map(|(y, &s)| {
            let rs = rho * s;
            let mut q = ln(1.0 + rs);
            for (i, &card) in cardinalities.iter().enumerate() {
                q += ln(1.0 + rho * counts.get(i, y)) - ln(card as f64 + rs);
            }
            q
        })
        .collect();
    ClassScores::from_log_scores(scores)
}

/// Every intermediate of one classification.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trace {
    pub profile: DistanceProfile,
    pub params: LocalityParams,
    pub counts: WeightedCounts,
    pub scores: ClassScores,
}

/// Classifies `x` and keeps the intermediate quantities.
pub fn classify_traced(train: &Dataset, x: &[usize], kappa: f64, iterations: usize) -> Result<Trace> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    check_query(train, x)?;
    let (profile, distances) = profile_with_distances(train, x);
    let params = locality_params(&profile, kappa, iterations)?;
    let counts = accumulate_counts(train, x, &params.gamma, &distances);
    let scores = score(&params, &counts, &train.cardinalities());
    Ok(Trace {
        profile,
        params,
        counts,
        scores,
    })
}

pub fn classify(train: &Dataset, x: &[usize], kappa: f64, iterations: usize) -> Result<ClassScores> {
    classify_traced(train, x, kappa, iterations).map(|t| t.scores)
}

/// `κ` from the attribute count, where `m` includes the class attribute:
/// 20 below 15, 10 at 15 or 16, 5 above.
pub fn auto_kappa(m: usize) -> f64 {
    match m {
        0..=14 => 20.0,
        15 | 16 => 10.0,
        _ => 5.0,
    }
}

/// [`auto_kappa`] for a feature count that excludes the class attribute.
pub fn auto_kappa_for_features(features: usize) -> f64 {
    auto_kappa(features + 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Kappa {
    Fixed(f64),
    /// Chosen per training set with [`auto_kappa_for_features`].
    Auto,
}

impl Kappa {
    pub fn resolve(self, features: usize) -> f64 {
        match self {
            Kappa::Fixed(k) => k,
            Kappa::Auto => auto_kappa_for_features(features),
        }
    }
}

/// LCWNB as a lazy [`Classifier`]: fitting just borrows the training set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lcwnb {
    pub kappa: Kappa,
    pub iterations: usize,
}

impl Lcwnb {
    pub fn new(kappa: Kappa) -> Self {
        Self {
            kappa,
            iterations: DEFAULT_ITERATIONS,
        }
    }
}

struct LazyLcwnb<'a> {
    train: &'a Dataset,
    kappa: f64,
    iterations: usize,
}

impl Predictor for LazyLcwnb<'_> {
    fn predict(&self, x: &[usize]) -> Result<usize> {
        classify(self.train, x, self.kappa, self.iterations).map(|s| s.prediction)
    }
}

impl Classifier for Lcwnb {
    fn id(&self) -> String {
        match self.kappa {
            Kappa::Fixed(k) => format!("lcwnb:{k}"),
            Kappa::Auto => "lcwnb:auto".into(),
        }
    }

    fn fit<'a>(&self, train: &'a Dataset) -> Result<Box<dyn Predictor + 'a>> {
        if train.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let kappa = self.kappa.resolve(train.num_attributes());
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Box::new(LazyLcwnb {
            train,
            kappa,
            iterations: self.iterations,
        }))
    }
}
