use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("schema error: expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid dataset: {} violation(s), first: {}", .0.len(), .0[0])]
    InvalidDataset(Vec<Violation>),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("total cell weight is zero")]
    DegenerateWeight,

    #[error("cell weight must be finite and nonnegative, got {0}")]
    InvalidWeight(f64),

    #[error("every class is empty; weight multiplier is undefined")]
    AllClassesEmpty,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("k > n: cannot split {n} instances into {k} folds")]
    TooManyFolds { k: usize, n: usize },

    #[error("run {run} fold {fold}: {source}")]
    Fold {
        run: usize,
        fold: usize,
        source: Box<Error>,
    },

    #[error("need ≥ 2 methods, got {0}")]
    TooFewMethods(usize),

    #[error("need ≥ 2 datasets, got {0}")]
    TooFewDatasets(usize),

    #[error("unknown method id `{0}`")]
    UnknownMethod(String),

    #[error("unknown dataset id `{0}`")]
    UnknownDataset(String),

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("accuracy matrix is not rectangular")]
    Ragged,

    #[error("{0} is undefined for this data")]
    Undefined(&'static str),
}
