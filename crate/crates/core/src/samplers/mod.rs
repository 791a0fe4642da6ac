// SPDX-License-Identifier: Apache-2.0

//! Random generation of conditioned simply generated trees, unconditioned
//! Galton–Watson trees, and windowed views of the local limit objects.

mod limit;
mod modified;
mod offspring;

pub use limit::{gw_window, LimitSampler, Regime, TbarVariant};
pub use modified::{sample_modified_gw, ModifiedGw, ModifiedGwSampler};
pub use offspring::{Draw, OffspringSampler};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Ext;
use crate::exact::{ExactError, PartitionTable, SequenceMethod, SequenceSampler, TableOptions};
use crate::par::Exec;
use crate::tree::{cycle_shift, PlaneTree};
use crate::weights::{classify, OffspringLaw, WeightError, WeightSequence, WeightType};

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("no tree of size {n} has positive weight (sizes must be 1 mod {span})")]
    Inadmissible { n: usize, span: usize },
    #[error("rejection sampling gave up after {attempts} attempts; use the exact-sequential or divide-conquer strategy")]
    RetryCap { attempts: u64 },
    #[error("{0}")]
    StrategyUnavailable(String),
    #[error("this construction needs a type {expected} law, got type {got}")]
    WrongRegime { expected: &'static str, got: WeightType },
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Weights(#[from] WeightError),
}

/// How a conditioned tree `T_n` is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Rejection for type I laws, divide-and-conquer otherwise.
    #[default]
    Auto,
    /// `n` i.i.d. draws from `π`, retried until they sum to `n − 1`, then
    /// cyclically shifted. Needs a tilted law (types I and II).
    #[serde(alias = "rejection")]
    RejectionCycle,
    /// Exact slot-by-slot draw from a full partition table (`O(n²)` memory).
    #[serde(alias = "sequential")]
    ExactSequential,
    /// Exact draw by recursive halving from `O(log n)` table columns.
    #[serde(alias = "dc")]
    DivideConquer,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "rejection" | "rejection-cycle" => Ok(Strategy::RejectionCycle),
            "sequential" | "exact-sequential" => Ok(Strategy::ExactSequential),
            "divide-conquer" | "dc" => Ok(Strategy::DivideConquer),
            _ => Err(format!("unknown strategy '{s}' (auto, rejection, sequential, divide-conquer)")),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Auto => "auto",
            Strategy::RejectionCycle => "rejection",
            Strategy::ExactSequential => "sequential",
            Strategy::DivideConquer => "divide-conquer",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SamplerOptions {
    pub max_attempts: u64,
    /// Used while building partition tables.
    pub exec: Exec,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions { max_attempts: 10_000_000, exec: Exec::default() }
    }
}

#[derive(Clone, Debug)]
enum Inner {
    Rejection { draw: OffspringSampler, max_attempts: u64 },
    Table(SequenceSampler),
}

/// Reusable sampler for `T_n`, the tree drawn with probability `ω(T)/Σω`.
#[derive(Clone, Debug)]
pub struct TreeSampler {
    n: usize,
    strategy: Strategy,
    inner: Inner,
}

impl TreeSampler {
    pub fn new(w: &WeightSequence, n: usize, strategy: Strategy, opts: SamplerOptions) -> Result<Self, SampleError> {
        let law = match strategy {
            Strategy::Auto | Strategy::RejectionCycle => Some(classify(w)?),
            _ => None,
        };
        Self::build(w, law.as_ref(), n, strategy, opts)
    }

    /// As [`TreeSampler::new`], reusing an already classified law.
    pub fn from_law(law: &OffspringLaw, n: usize, strategy: Strategy, opts: SamplerOptions) -> Result<Self, SampleError> {
        Self::build(law.weights(), Some(law), n, strategy, opts)
    }

    fn build(
        w: &WeightSequence,
        law: Option<&OffspringLaw>,
        n: usize,
        strategy: Strategy,
        opts: SamplerOptions,
    ) -> Result<Self, SampleError> {
        if n == 0 || !w.admits(n) {
            return Err(SampleError::Inadmissible { n, span: w.span() });
        }
        let strategy = match (strategy, law.map(OffspringLaw::kind)) {
            (Strategy::Auto, Some(WeightType::I)) => Strategy::RejectionCycle,
            (Strategy::Auto, _) => Strategy::DivideConquer,
            (s, _) => s,
        };
        let inner = match strategy {
            Strategy::RejectionCycle => {
                let law = law.expect("classified above");
                if law.kind() == WeightType::III {
                    return Err(SampleError::StrategyUnavailable(
                        "type III weights admit no tilted offspring law; use the exact-sequential or divide-conquer strategy".into(),
                    ));
                }
                Inner::Rejection { draw: OffspringSampler::bounded(law, n - 1)?, max_attempts: opts.max_attempts }
            }
            Strategy::ExactSequential | Strategy::DivideConquer => {
                let (layout, method) = if strategy == Strategy::ExactSequential {
                    (TableOptions::default().layout, SequenceMethod::Sequential)
                } else {
                    (TableOptions::columns().layout, SequenceMethod::DivideConquer)
                };
                let tbl = PartitionTable::<Ext>::build(w, n, (), TableOptions { layout, exec: opts.exec, ..Default::default() })?;
                Inner::Table(SequenceSampler::new(&tbl, method)?)
            }
            Strategy::Auto => unreachable!(),
        };
        Ok(TreeSampler { n, strategy, inner })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The resolved strategy (never `Auto`).
    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PlaneTree, SampleError> {
        let seq = match &self.inner {
            Inner::Table(s) => s.sample(rng),
            Inner::Rejection { draw, max_attempts } => rejection(draw, self.n, *max_attempts, rng)?,
        };
        let (t, _) = cycle_shift(&seq).expect("sequences sum to n − 1");
        debug_assert!(crate::tree::check_degrees(t.degrees()).is_ok());
        Ok(t)
    }
}

fn rejection<R: Rng + ?Sized>(draw: &OffspringSampler, n: usize, max_attempts: u64, rng: &mut R) -> Result<Vec<u32>, SampleError> {
    let target = n as u64 - 1;
    let mut seq = vec![0u32; n];
    'attempt: for _ in 0..max_attempts {
        let mut sum = 0u64;
        for slot in seq.iter_mut() {
            match draw.sample(rng) {
                Draw::Finite(k) => {
                    sum += k;
                    if sum > target {
                        continue 'attempt;
                    }
                    *slot = k as u32;
                }
                _ => continue 'attempt,
            }
        }
        if sum == target {
            return Ok(seq);
        }
    }
    Err(SampleError::RetryCap { attempts: max_attempts })
}

/// One exact draw of `T_n`.
pub fn sample_tree<R: Rng + ?Sized>(s: &TreeSampler, rng: &mut R) -> Result<PlaneTree, SampleError> {
    s.sample(rng)
}

/// An unconditioned Galton–Watson tree, or the marker for one abandoned
/// after exceeding the size cap (a censored observation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GwOutcome {
    Tree(PlaneTree),
    Overflow { size_cap: usize },
}

pub const DEFAULT_SIZE_CAP: usize = 1_000_000;

impl OffspringSampler {
    /// A GW tree with this offspring law, generated in DFS order.
    pub fn sample_gw<R: Rng + ?Sized>(&self, rng: &mut R, size_cap: usize) -> GwOutcome {
        let mut degrees = Vec::new();
        let mut need = 1u64;
        while need > 0 {
            let d = self.degree(rng);
            degrees.push(d);
            need = need - 1 + d as u64;
            if degrees.len() as u64 + need > size_cap as u64 {
                return GwOutcome::Overflow { size_cap };
            }
        }
        GwOutcome::Tree(PlaneTree::from_degrees_unchecked(degrees))
    }
}

/// A GW tree with offspring law `law`; builds a fresh alias table per call,
/// so prefer [`OffspringSampler::sample_gw`] in loops.
pub fn sample_gw<R: Rng + ?Sized>(law: &OffspringLaw, rng: &mut R, size_cap: usize) -> Result<GwOutcome, SampleError> {
    if size_cap == 0 {
        return Err(SampleError::InvalidPmf("size cap must be at least 1".into()));
    }
    Ok(OffspringSampler::new(law)?.sample_gw(rng, size_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_vertex_and_two_vertex_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for strategy in [Strategy::RejectionCycle, Strategy::ExactSequential, Strategy::DivideConquer] {
            let s = TreeSampler::new(&WeightSequence::uniform(), 1, strategy, SamplerOptions::default()).unwrap();
            assert_eq!(s.sample(&mut rng).unwrap(), PlaneTree::leaf());
            let s = TreeSampler::new(&WeightSequence::uniform(), 2, strategy, SamplerOptions::default()).unwrap();
            assert_eq!(s.sample(&mut rng).unwrap().degrees(), [1, 0]);
        }
    }

    #[test]
    fn strategy_rules() {
        let f = WeightSequence::factorial(1.0).unwrap();
        let err = TreeSampler::new(&f, 5, Strategy::RejectionCycle, SamplerOptions::default()).unwrap_err();
        assert!(matches!(err, SampleError::StrategyUnavailable(_)));
        assert_eq!(TreeSampler::new(&f, 5, Strategy::Auto, SamplerOptions::default()).unwrap().strategy(), Strategy::DivideConquer);
        let u = WeightSequence::uniform();
        assert_eq!(TreeSampler::new(&u, 5, Strategy::Auto, SamplerOptions::default()).unwrap().strategy(), Strategy::RejectionCycle);
        let b = WeightSequence::binary();
        assert!(matches!(
            TreeSampler::new(&b, 4, Strategy::Auto, SamplerOptions::default()),
            Err(SampleError::Inadmissible { n: 4, span: 2 })
        ));
        let opts = SamplerOptions { max_attempts: 1, ..Default::default() };
        let s = TreeSampler::new(&u, 200, Strategy::RejectionCycle, opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let hit = (0..50).map(|_| s.sample(&mut rng)).filter(|r| matches!(r, Err(SampleError::RetryCap { attempts: 1 }))).count();
        assert!(hit > 40);
    }

    #[test]
    fn gw_small_sizes() {
        let law = classify(&WeightSequence::uniform()).unwrap();
        let s = OffspringSampler::new(&law).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 100_000;
        let (mut one, mut two, mut over) = (0usize, 0usize, 0usize);
        for _ in 0..draws {
            match s.sample_gw(&mut rng, 1000) {
                GwOutcome::Tree(t) if t.len() == 1 => one += 1,
                GwOutcome::Tree(t) if t.len() == 2 => two += 1,
                GwOutcome::Tree(_) => {}
                GwOutcome::Overflow { .. } => over += 1,
            }
        }
        let check = |c: usize, p: f64| {
            let sd = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((c as f64 / draws as f64 - p).abs() < 4.0 * sd, "{c} vs {p}");
        };
        check(one, 0.5);
        check(two, 0.125);
        // Critical GW: Pr{|T| > N} ~ sqrt(2/(π σ² N)).
        assert!(over > 0);
        let iii = classify(&WeightSequence::factorial(1.0).unwrap()).unwrap();
        assert_eq!(sample_gw(&iii, &mut rng, 1).unwrap(), GwOutcome::Tree(PlaneTree::leaf()));
        assert!(sample_gw(&law, &mut rng, 0).is_err());
    }
}
