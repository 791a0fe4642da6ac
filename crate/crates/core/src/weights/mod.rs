// SPDX-License-Identifier: Apache-2.0

//! Branching weight sequences, their classification into types I/II/III, and
//! the associated tilted and size-biased offspring laws.

mod family;
mod file;
mod law;
pub mod series;

pub use family::{Family, Radius, Weight, WeightSequence};
pub use file::{parse_weight_file, read_weight_file};
pub use law::{classify, classify_with, size_biased, ClassifyOptions, OffspringLaw, SizeBiasedLaw, Tail, WeightType};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("invalid weights: {0}")]
    Invalid(String),
    #[error("unknown weight family `{0}`")]
    UnknownFamily(String),
    #[error("precision failure: {0}")]
    Precision(String),
    #[error("weight file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
