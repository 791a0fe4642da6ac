// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LabError, OmegaSchedule};
use crate::samplers::Strategy;
use crate::tree::{pointed_at, PlaneTree, PointedTree, Window};
use crate::weights::{read_weight_file, WeightSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Law of the height of the uniform vertex `v_0`.
    HeightDist,
    /// `Δ(T_n)/n` and where the maximum sits.
    MaxDegree,
    /// Frequencies of the configured fringe patterns.
    PatternProbs,
    /// Marginals of `H(T_n, v_0, Ω_n)` against `T̄*_n` (types II/III).
    TvVsLimit,
    /// `H_k(T_n, v_0)` against `H_k(T*, u_0)`.
    TvExtendedFringe,
}

/// A fringe event, given by a small plane tree (DFS outdegrees) and the
/// index of the pointed vertex in it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternSpec {
    /// `H_h(T_n, v_0)` equals the tree, `h` being the depth of the point.
    Exact { tree: String, point: usize },
    /// The tree hangs below `u_{h+1}`, which has at least `left`/`right`
    /// further children on either side.
    AtLeast { tree: String, point: usize, left: u32, right: u32 },
    /// The tree hangs directly below the youngest ancestor with outdegree
    /// above `Ω_n`.
    LargeAncestor { tree: String, point: usize },
    /// `v_0` is the root.
    Root,
}

impl PatternSpec {
    pub fn label(&self) -> String {
        match self {
            PatternSpec::Exact { tree, point } => format!("exact:{tree}@{point}"),
            PatternSpec::AtLeast { tree, point, left, right } => format!("at_least({left},{right}):{tree}@{point}"),
            PatternSpec::LargeAncestor { tree, point } => format!("large_ancestor:{tree}@{point}"),
            PatternSpec::Root => "root".into(),
        }
    }

    /// The pinned pointed tree, if any.
    pub fn pinned(&self) -> Result<Option<PointedTree>, LabError> {
        let (tree, point) = match self {
            PatternSpec::Exact { tree, point } | PatternSpec::AtLeast { tree, point, .. } | PatternSpec::LargeAncestor { tree, point } => {
                (tree, *point)
            }
            PatternSpec::Root => return Ok(None),
        };
        let t: PlaneTree = tree.parse().map_err(|e| LabError::Config(format!("pattern tree '{tree}': {e}")))?;
        if point >= t.len() {
            return Err(LabError::Config(format!("pattern point {point} outside the {}-vertex tree '{tree}'", t.len())));
        }
        Ok(Some(pointed_at(&t, &t.layout(), 0, point, Window::Full)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideSpec {
    Left,
    Right,
}

/// One vertex of a pointed tree, addressed relative to `u_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Probe {
    /// Descendant of `u_0` along 1-based child ranks (empty: `u_0`).
    Center {
        #[serde(default)]
        path: Vec<u32>,
    },
    /// Spine vertex `u_index`.
    Spine { index: usize },
    /// Descendant of the `rank`-th nearest sibling of `u_{index−1}` at `u_index`.
    Sibling {
        index: usize,
        side: SideSpec,
        rank: u32,
        #[serde(default)]
        path: Vec<u32>,
    },
}

impl Probe {
    pub fn label(&self) -> String {
        let p = |path: &[u32]| path.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(".");
        match self {
            Probe::Center { path } => format!("c[{}]", p(path)),
            Probe::Spine { index } => format!("u{index}"),
            Probe::Sibling { index, side, rank, path } => {
                let s = if *side == SideSpec::Left { "L" } else { "R" };
                format!("u{index}{s}{rank}[{}]", p(path))
            }
        }
    }

    /// Smallest window that materializes this vertex whenever it exists.
    pub fn window(&self) -> u32 {
        let depth = |path: &[u32]| path.len() as u32;
        let rank = |path: &[u32]| path.iter().copied().max().unwrap_or(0);
        match self {
            Probe::Center { path } => depth(path).max(rank(path)),
            Probe::Spine { index } => *index as u32,
            Probe::Sibling { index, rank: r, path, .. } => (*index as u32 + 1 + depth(path)).max(*r).max(rank(path)),
        }
    }
}

/// Settings for the two TV statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TvConfig {
    /// Ancestor index of the extended fringe `H_k`.
    pub k: usize,
    /// Window through which `H_k` is encoded (at least `k`).
    pub window: u32,
    /// Window for the marginals of `H(T_n, v_0, Ω_n)`.
    pub marginal_window: u32,
    pub resamples: usize,
    /// Sets of probed vertices; each set's joint outdegrees form one marginal.
    pub address_sets: Vec<Vec<Probe>>,
    /// Degrees above this are reported as "L" in marginals (default `Ω_n`).
    pub degree_cap: Option<u32>,
    /// Draws from the limit side (default: the replication count).
    pub limit_replications: Option<usize>,
    /// Mantissa bits for the `D̃_n` table (default: `SGT_PRECISION` or 128);
    /// 0 selects extended-range doubles.
    pub dtilde_precision: Option<usize>,
}

impl Default for TvConfig {
    fn default() -> Self {
        let c = |path: Vec<u32>| Probe::Center { path };
        let sib = |side| Probe::Sibling { index: 1, side, rank: 1, path: vec![] };
        TvConfig {
            k: 1,
            window: 1,
            marginal_window: 2,
            resamples: super::DEFAULT_RESAMPLES,
            address_sets: vec![
                vec![c(vec![])],
                vec![c(vec![]), c(vec![1]), Probe::Spine { index: 1 }],
                vec![Probe::Spine { index: 1 }, Probe::Spine { index: 2 }],
                vec![c(vec![]), Probe::Spine { index: 1 }, sib(SideSpec::Left), sib(SideSpec::Right)],
            ],
            degree_cap: None,
            limit_replications: None,
            dtilde_precision: None,
        }
    }
}

fn default_exact_cap() -> usize {
    2001
}

/// A Monte Carlo experiment over a grid of sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Weight table file; overrides `family` (which then only labels it).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights_file: Option<String>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub omega: OmegaSchedule,
    #[serde(default)]
    pub patterns: Vec<PatternSpec>,
    pub statistics: Vec<Statistic>,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub tv: TvConfig,
    /// Exact pattern probabilities are computed for `n` up to this size.
    #[serde(default = "default_exact_cap")]
    pub exact_cap: usize,
    /// Worker threads (default: all available).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(family: &str, alpha: Option<f64>, n_grid: Vec<usize>, replications: usize, seed: u64, statistics: Vec<Statistic>) -> Self {
        ExperimentConfig {
            family: family.into(),
            alpha,
            weights_file: None,
            n_grid,
            replications,
            seed,
            omega: OmegaSchedule::default(),
            patterns: Vec::new(),
            statistics,
            strategy: Strategy::Auto,
            tv: TvConfig::default(),
            exact_cap: default_exact_cap(),
            threads: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Config(format!("experiment config: {e}")))
    }

    pub fn weights(&self) -> Result<WeightSequence, LabError> {
        Ok(match &self.weights_file {
            Some(p) => read_weight_file(Path::new(p))?,
            None => WeightSequence::builtin(&self.family, self.alpha)?,
        })
    }

    pub fn wants(&self, s: Statistic) -> bool {
        self.statistics.contains(&s)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if self.replications == 0 {
            return Err(LabError::Config("replications must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(LabError::Config("n_grid must list sizes ≥ 1".into()));
        }
        if self.statistics.is_empty() {
            return Err(LabError::Config("no statistics requested".into()));
        }
        self.omega.validate()?;
        if self.wants(Statistic::PatternProbs) && self.patterns.is_empty() {
            return Err(LabError::Config("pattern_probs needs at least one pattern".into()));
        }
        for p in &self.patterns {
            p.pinned()?;
        }
        let tv = &self.tv;
        if self.wants(Statistic::TvExtendedFringe) && (tv.k as u32) > tv.window {
            return Err(LabError::Config(format!("tv.window = {} cannot show H_k for k = {}", tv.window, tv.k)));
        }
        if self.wants(Statistic::TvVsLimit) {
            if tv.address_sets.is_empty() || tv.address_sets.iter().any(|s| s.is_empty() || s.len() > 4) {
                return Err(LabError::Config("address sets must hold 1 to 4 probes".into()));
            }
            for p in tv.address_sets.iter().flatten() {
                if p.window() > tv.marginal_window {
                    return Err(LabError::Config(format!("probe {} needs marginal_window ≥ {}", p.label(), p.window())));
                }
            }
        }
        Ok(())
    }
}
