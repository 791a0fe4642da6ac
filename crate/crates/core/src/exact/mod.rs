// SPDX-License-Identifier: Apache-2.0

//! Exact finite-n probabilities through the balls-in-boxes partition function,
//! in rational, big-float or extended-double arithmetic, plus brute-force
//! oracles for tiny trees.

mod enumerate;
mod probs;
mod sampling;
mod scalar;
mod selftest;
mod table;

pub use enumerate::{brute_event_prob, brute_forest_prob, brute_root_degree, enumerate_trees, tree_weight, MAX_ENUMERATE};
pub use probs::{forest_count_prob, FringeEvent, Threshold};
pub use sampling::{sample_sequence, SequenceMethod, SequenceSampler};
pub use scalar::{rational_to_f64, ExactScalar, Ext, Hp, Scalar};
pub use selftest::{selftest, selftest_events, selftest_families, SelfTestReport};
pub use table::{Column, PartitionTable, TableLayout, TableOptions};

use num_rational::BigRational;
use thiserror::Error;

use crate::weights::WeightSequence;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("weights of `{0}` are not rational; use a floating-point mode")]
    NotRational(String),
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("unsupported pattern: {0}")]
    UnsupportedPattern(String),
    #[error("zero-probability conditioning: {0}")]
    ZeroProbability(String),
    #[error("enumeration is limited to n ≤ {max}, got {n}")]
    SizeGuard { n: usize, max: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Default big-float working precision in bits.
pub const DEFAULT_PRECISION: usize = 128;

/// `SGT_PRECISION` if set to a valid bit count, else the default.
pub fn precision_from_env() -> usize {
    std::env::var("SGT_PRECISION").ok().and_then(|s| s.trim().parse().ok()).filter(|&p| p >= 16).unwrap_or(DEFAULT_PRECISION)
}

/// Arithmetic used for a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Rational,
    /// Big floats with the given mantissa bits.
    HighPrecision(usize),
    /// Extended-range doubles.
    Double,
}

impl Mode {
    /// Largest `n` for which [`Mode::auto`] picks rationals: beyond it the
    /// numerators and denominators of non-uniform weights grow too fast.
    pub const AUTO_RATIONAL_N: usize = 64;

    /// Rational when the weights allow it and `n` is small, big floats otherwise.
    pub fn auto(w: &WeightSequence, n: usize, precision: usize, opts: &TableOptions) -> Mode {
        if w.is_rational() && n <= opts.max_rational_n.min(Self::AUTO_RATIONAL_N) {
            Mode::Rational
        } else {
            Mode::HighPrecision(precision)
        }
    }
}

/// A partition table in any arithmetic mode.
#[derive(Debug)]
pub enum AnyTable {
    Rational(PartitionTable<BigRational>),
    Hp(PartitionTable<Hp>),
    Ext(PartitionTable<Ext>),
}

macro_rules! each {
    ($self:expr, $t:ident => $body:expr) => {
        match $self {
            AnyTable::Rational($t) => $body,
            AnyTable::Hp($t) => $body,
            AnyTable::Ext($t) => $body,
        }
    };
}

impl AnyTable {
    pub fn build(w: &WeightSequence, n: usize, mode: Mode, opts: TableOptions) -> Result<Self, ExactError> {
        Ok(match mode {
            Mode::Rational => AnyTable::Rational(PartitionTable::build(w, n, (), opts)?),
            Mode::HighPrecision(p) => AnyTable::Hp(PartitionTable::build(w, n, p, opts)?),
            Mode::Double => AnyTable::Ext(PartitionTable::build(w, n, (), opts)?),
        })
    }

    pub fn n(&self) -> usize {
        each!(self, t => t.n())
    }

    pub fn mode(&self) -> Mode {
        match self {
            AnyTable::Rational(_) => Mode::Rational,
            AnyTable::Hp(t) => Mode::HighPrecision(t.ctx()),
            AnyTable::Ext(_) => Mode::Double,
        }
    }

    pub fn z(&self, m: usize, j: usize) -> Result<ExactScalar, ExactError> {
        each!(self, t => t.z(m, j).map(|(v, e)| v.to_exact(e)))
    }

    pub fn total_tree_weight(&self) -> Result<ExactScalar, ExactError> {
        each!(self, t => t.total_tree_weight())
    }

    pub fn prefix_prob(&self, d: &[u32]) -> Result<ExactScalar, ExactError> {
        each!(self, t => t.prefix_prob(d))
    }

    pub fn fringe_event_prob(&self, ev: &FringeEvent) -> Result<ExactScalar, ExactError> {
        each!(self, t => t.fringe_event_prob(ev))
    }

    pub fn root_degree_dist(&self) -> Result<Vec<ExactScalar>, ExactError> {
        each!(self, t => t.root_degree_dist())
    }

    pub fn dtilde_dist(&self, omega: u32) -> Result<Vec<(usize, ExactScalar)>, ExactError> {
        each!(self, t => t.dtilde_dist(omega))
    }

    pub fn sampler(&self, method: SequenceMethod) -> Result<SequenceSampler, ExactError> {
        each!(self, t => SequenceSampler::new(t, method))
    }
}
