//! Categorical datasets, interned to dense indices, and the Hamming distance.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A categorical attribute and its ordered value domain.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AttributeSchema {
    pub name: String,
    pub domain: Vec<String>,
}

impl AttributeSchema {
    pub fn new<S: Into<String>>(name: impl Into<String>, domain: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            domain: domain.into_iter().map(Into::into).collect(),
        }
    }

    /// Number of possible values, `q_i`.
    pub fn cardinality(&self) -> usize {
        self.domain.len()
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }
}

/// Ordered class labels.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassSchema {
    pub labels: Vec<String>,
}

impl ClassSchema {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self {
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|v| v == label)
    }
}

/// One row: attribute-value indices plus an optional class index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Instance {
    pub values: Vec<usize>,
    pub label: Option<usize>,
}

impl Instance {
    pub fn labeled(values: Vec<usize>, label: usize) -> Self {
        Self {
            values,
            label: Some(label),
        }
    }

    pub fn unlabeled(values: Vec<usize>) -> Self {
        Self {
            values,
            label: None,
        }
    }
}

/// A training table. Build with [`Dataset::try_new`] to enforce the schema
/// invariants, or [`Dataset::from_parts`] and check later with [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    pub attributes: Vec<AttributeSchema>,
    pub classes: ClassSchema,
    pub instances: Vec<Instance>,
}

impl Dataset {
    pub fn from_parts(
        attributes: Vec<AttributeSchema>,
        classes: ClassSchema,
        instances: Vec<Instance>,
    ) -> Self {
        Self {
            attributes,
            classes,
            instances,
        }
    }

    pub fn try_new(
        attributes: Vec<AttributeSchema>,
        classes: ClassSchema,
        instances: Vec<Instance>,
    ) -> Result<Self> {
        let dataset = Self::from_parts(attributes, classes, instances);
        validate(&dataset).map_err(Error::InvalidDataset)?;
        Ok(dataset)
    }

    /// Number of instances, `n`.
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Number of feature attributes, `m` (the class column is not counted).
    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    /// Number of classes, `r`.
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Attribute cardinalities `q_1..q_m`.
    pub fn cardinalities(&self) -> Vec<usize> {
        self.attributes.iter().map(AttributeSchema::cardinality).collect()
    }

    /// Class index of instance `j`. Panics on unlabeled instances, which a
    /// validated dataset never contains.
    pub fn label(&self, j: usize) -> usize {
        self.instances[j]
            .label
            .expect("training instance must be labeled")
    }

    /// Copy of the rows at `indices`, sharing the schema.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            attributes: self.attributes.clone(),
            classes: self.classes.clone(),
            instances: indices.iter().map(|&j| self.instances[j].clone()).collect(),
        }
    }

    /// Checks that `x` has one in-domain value index per attribute.
    pub fn check_query(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.attributes.len() {
            return Err(Error::LengthMismatch {
                expected: self.attributes.len(),
                found: x.len(),
            });
        }
        for (i, (&v, attr)) in x.iter().zip(&self.attributes).enumerate() {
            if v >= attr.cardinality() {
                return Err(Error::InvalidParameter(alloc::format!(
                    "value index {v} out of domain for attribute {i} (q = {})",
                    attr.cardinality()
                )));
            }
        }
        Ok(())
    }
}

/// Number of positions at which `a` and `b` differ.
pub fn hamming_distance(a: &[usize], b: &[usize]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(hamming_unchecked(a, b))
}

#[inline]
pub(crate) fn hamming_unchecked(a: &[usize], b: &[usize]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// A broken dataset invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Violation {
    EmptyDomain { attribute: usize },
    DuplicateDomainValue { attribute: usize, value: String },
    TooFewClasses { found: usize },
    DuplicateClassLabel { label: String },
    WrongArity { instance: usize, expected: usize, found: usize },
    ValueOutOfDomain { instance: usize, attribute: usize, value: usize, cardinality: usize },
    UnlabeledTrainingInstance { instance: usize },
    LabelOutOfRange { instance: usize, label: usize, classes: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyDomain { attribute } => write!(f, "attribute {attribute} has an empty domain"),
            Self::DuplicateDomainValue { attribute, value } => {
                write!(f, "attribute {attribute} declares `{value}` more than once")
            }
            Self::TooFewClasses { found } => write!(f, "need at least 2 classes, found {found}"),
            Self::DuplicateClassLabel { label } => write!(f, "class label `{label}` appears more than once"),
            Self::WrongArity { instance, expected, found } => {
                write!(f, "instance {instance}: expected {expected} values, found {found}")
            }
            Self::ValueOutOfDomain { instance, attribute, value, cardinality } => write!(
                f,
                "instance {instance}: value out of domain (attribute {attribute}, index {value}, q = {cardinality})"
            ),
            Self::UnlabeledTrainingInstance { instance } => {
                write!(f, "instance {instance}: unlabeled training instance")
            }
            Self::LabelOutOfRange { instance, label, classes } => {
                write!(f, "instance {instance}: class index {label} out of range (r = {classes})")
            }
        }
    }
}

/// Checks every dataset invariant and reports all violations found.
pub fn validate(dataset: &Dataset) -> core::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();

    for (i, attr) in dataset.attributes.iter().enumerate() {
        if attr.domain.is_empty() {
            out.push(Violation::EmptyDomain { attribute: i });
        }
        for (k, v) in attr.domain.iter().enumerate() {
            if attr.domain[..k].contains(v) {
                out.push(Violation::DuplicateDomainValue {
                    attribute: i,
                    value: v.clone(),
                });
            }
        }
    }

    let labels = &dataset.classes.labels;
    if labels.len() < 2 {
        out.push(Violation::TooFewClasses { found: labels.len() });
    }
    for (k, l) in labels.iter().enumerate() {
        if labels[..k].contains(l) {
            out.push(Violation::DuplicateClassLabel { label: l.to_string() });
        }
    }

    let m = dataset.attributes.len();
    for (j, inst) in dataset.instances.iter().enumerate() {
        if inst.values.len() != m {
            out.push(Violation::WrongArity {
                instance: j,
                expected: m,
                found: inst.values.len(),
            });
        }
        for (i, (&v, attr)) in inst.values.iter().zip(&dataset.attributes).enumerate() {
            if v >= attr.cardinality() {
                out.push(Violation::ValueOutOfDomain {
                    instance: j,
                    attribute: i,
                    value: v,
                    cardinality: attr.cardinality(),
                });
            }
        }
        match inst.label {
            None => out.push(Violation::UnlabeledTrainingInstance { instance: j }),
            Some(y) if y >= labels.len() => out.push(Violation::LabelOutOfRange {
                instance: j,
                label: y,
                classes: labels.len(),
            }),
            Some(_) => {}
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Relative gap below which two log scores are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Per-class unnormalized log posterior scores and the winning class.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassScores {
    pub log_scores: Vec<f64>,
    pub prediction: usize,
}

impl ClassScores {
    /// Ties go to the lowest class index. Scores within a relative
    /// [`TIE_TOLERANCE`] of the current best count as tied, so the same
    /// real-valued tie reached through different rounding paths resolves
    /// the same way.
    pub fn from_log_scores(log_scores: Vec<f64>) -> Self {
        let mut best = 0;
        for (y, &s) in log_scores.iter().enumerate() {
            let b = log_scores[best];
            if s > b + TIE_TOLERANCE * libm::fabs(b).max(1.0) {
                best = y;
            }
        }
        Self {
            log_scores,
            prediction: best,
        }
    }
}
