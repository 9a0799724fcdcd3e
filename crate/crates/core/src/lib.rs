//! Lazy cell-weighted naive Bayes (LCWNB) and the machinery needed to
//! benchmark it: a Laplace-smoothed naive Bayes baseline, a brute-force
//! weighted naive Bayes estimator, stratified cross-validation planning, and
//! nonparametric classifier-comparison statistics.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the parallel evaluation harness live in the `lcwnb` companion crate.
//!
//! All hot-path computation works on dense value indices: attribute values
//! and class labels are interned when a [`Dataset`] is built.
//!
//! ```
//! use lcwnb_core::{lcwnb, AttributeSchema, ClassSchema, Dataset, Instance};
//!
//! let attrs = vec![AttributeSchema::new("colour", ["red", "blue"])];
//! let classes = ClassSchema::new(["a", "b"]);
//! let rows = [(0, 0), (0, 0), (1, 0), (0, 1), (1, 1), (1, 1), (1, 1)];
//! let instances = rows
//!     .iter()
//!     .map(|&(v, y)| Instance::labeled(vec![v], y))
//!     .collect();
//! let train = Dataset::try_new(attrs, classes, instances).unwrap();
//!
//! let scores = lcwnb::classify(&train, &[0], 2.0, lcwnb::DEFAULT_ITERATIONS).unwrap();
//! assert_eq!(scores.prediction, 0);
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod eval;
pub mod lcwnb;
mod math;
pub mod model;
pub mod nb;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    hamming_distance, validate, AttributeSchema, ClassSchema, ClassScores, Dataset, Instance,
    Violation,
};
