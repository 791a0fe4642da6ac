// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::{ExperimentConfig, TvEstimate};
use crate::weights::OffspringLaw;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawSummary {
    pub family: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub tau: f64,
    pub mu: f64,
    pub sigma2: f64,
}

impl LawSummary {
    pub fn of(law: &OffspringLaw) -> Self {
        LawSummary {
            family: law.weights().tag().to_string(),
            kind: law.kind().to_string(),
            tau: law.tau(),
            mu: law.mu(),
            sigma2: law.sigma2(),
        }
    }
}

/// Empirical frequency of one outcome, with a 95% Wilson interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PmfEntry {
    pub value: usize,
    pub count: usize,
    pub freq: f64,
    pub se: f64,
    pub ci: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightStats {
    /// Mass at `h(v_0) = 0`, i.e. `v_0` is the root.
    pub root: PmfEntry,
    /// Law of `h(v_0)` given `h(v_0) ≥ 1`.
    pub pmf: Vec<PmfEntry>,
    pub mean: f64,
    /// Limit pmf on `1..=max` (condensation regimes only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv: Option<TvEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxDegreeStats {
    /// Mean of `Δ(T_n)/n`.
    pub mean_ratio: f64,
    pub se: f64,
    pub ci: [f64; 2],
    /// 10%, 50% and 90% quantiles of `Δ(T_n)/n`.
    pub quantiles: [f64; 3],
    /// Fraction of trees whose root attains the maximum degree.
    pub at_root: f64,
    /// Fraction of samples with a maximum-degree vertex among the strict
    /// ancestors of `v_0`.
    pub on_spine: f64,
    pub limit_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternResult {
    pub label: String,
    pub limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_rel_err: Option<f64>,
    pub hits: usize,
    /// Samples whose window decided the event.
    pub decided: usize,
    pub insufficient_window: usize,
    pub freq: f64,
    pub se: f64,
    pub ci: [f64; 2],
    /// Whether the frequency is within the 99.9% band around the exact value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_exact_ci: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FringeTv {
    pub k: usize,
    pub window: u32,
    pub limit_samples: usize,
    /// Samples where `v_0` has height below `k`.
    pub diamond_finite: usize,
    pub diamond_limit: usize,
    pub tv: TvEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginalTv {
    pub label: String,
    pub tv: TvEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitTv {
    pub window: u32,
    pub degree_cap: u32,
    pub dtilde_mode: String,
    pub dtilde_mean: f64,
    pub limit_samples: usize,
    pub marginals: Vec<MarginalTv>,
}

/// Where the replications went: `total = observed + diamond + gw_overflow`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Censoring {
    pub total: usize,
    pub observed: usize,
    /// No ancestor of `v_0` has outdegree above `Ω_n`.
    pub diamond: usize,
    pub gw_overflow: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeResult {
    pub n: usize,
    pub requested_n: usize,
    pub omega: u32,
    pub replications: usize,
    pub strategy: String,
    pub censoring: Censoring,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<HeightStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<MaxDegreeStats>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub patterns: Vec<PatternResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_extended_fringe: Option<FringeTv>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_vs_limit: Option<LimitTv>,
}

impl SizeResult {
    pub(crate) fn new(n: usize, requested_n: usize, omega: u32, replications: usize, strategy: String) -> Self {
        SizeResult {
            n,
            requested_n,
            omega,
            replications,
            strategy,
            censoring: Censoring::default(),
            height: None,
            max_degree: None,
            patterns: Vec::new(),
            tv_extended_fringe: None,
            tv_vs_limit: None,
        }
    }
}

/// A pass/fail check of a sampled frequency against an exact value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gate {
    pub n: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub law: LawSummary,
    pub results: Vec<SizeResult>,
    pub gates: Vec<Gate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Wall-clock time; left out by default so reports are reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

impl ExperimentReport {
    pub(crate) fn new(config: ExperimentConfig, law: LawSummary) -> Self {
        ExperimentReport { config, law, results: Vec::new(), gates: Vec::new(), warnings: Vec::new(), runtime_seconds: None }
    }

    pub(crate) fn finish_gates(&mut self) {
        self.gates = self
            .results
            .iter()
            .flat_map(|r| {
                r.patterns.iter().filter_map(move |p| {
                    let ok = p.within_exact_ci?;
                    Some(Gate {
                        n: r.n,
                        name: format!("pattern {}", p.label),
                        passed: ok,
                        detail: format!("sampled {:.6} ({} / {}) vs exact {:.6}", p.freq, p.hits, p.decided, p.exact.unwrap_or(f64::NAN)),
                    })
                })
            })
            .collect();
    }

    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    pub fn result(&self, n: usize) -> Option<&SizeResult> {
        self.results.iter().find(|r| r.n == n || r.requested_n == n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One row per scalar: `n,statistic,value,stderr` (stderr may be empty).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,statistic,value,stderr\n");
        let mut row = |n: usize, stat: &str, v: f64, se: Option<f64>| {
            let stat = if stat.contains([',', '"']) { format!("\"{}\"", stat.replace('"', "\"\"")) } else { stat.to_string() };
            out.push_str(&format!("{n},{stat},{v},{}\n", se.map(|x| x.to_string()).unwrap_or_default()));
        };
        for r in &self.results {
            let n = r.n;
            row(n, "omega", r.omega as f64, None);
            row(n, "censored_diamond", r.censoring.diamond as f64 / r.censoring.total.max(1) as f64, None);
            if let Some(h) = &r.height {
                row(n, "height_root_mass", h.root.freq, Some(h.root.se));
                row(n, "height_mean", h.mean, None);
                for e in &h.pmf {
                    row(n, &format!("height_pmf[{}]", e.value), e.freq, Some(e.se));
                }
                if let Some(tv) = &h.tv {
                    row(n, "height_tv", tv.estimate, None);
                }
            }
            if let Some(m) = &r.max_degree {
                row(n, "max_degree_ratio", m.mean_ratio, Some(m.se));
                row(n, "max_degree_at_root", m.at_root, None);
                row(n, "max_degree_on_spine", m.on_spine, None);
                row(n, "max_degree_limit", m.limit_ratio, None);
            }
            for p in &r.patterns {
                row(n, &format!("pattern:{}", p.label), p.freq, Some(p.se));
                row(n, &format!("pattern_limit:{}", p.label), p.limit, None);
                if let Some(x) = p.exact {
                    row(n, &format!("pattern_exact:{}", p.label), x, None);
                }
            }
            if let Some(f) = &r.tv_extended_fringe {
                row(n, &format!("tv_extended_fringe[k={}]", f.k), f.tv.estimate, None);
            }
            if let Some(l) = &r.tv_vs_limit {
                for m in &l.marginals {
                    row(n, &format!("tv_vs_limit:{}", m.label), m.tv.estimate, None);
                }
            }
        }
        out
    }
}
