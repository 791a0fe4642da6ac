// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo experiments comparing finite-n statistics of `(T_n, v_0)`
//! with their limit-law predictions and with exact small-n values.
//!
//! Every replication draws from its own random stream `(seed, n, index)`,
//! and results are collected in index order, so reports do not depend on
//! the thread count.

mod config;
mod omega;
mod report;
mod tv;

pub use config::{ExperimentConfig, PatternSpec, Probe, SideSpec, Statistic, TvConfig};
pub use omega::{omega_schedule, OmegaSchedule};
pub use report::{
    Censoring, ExperimentReport, FringeTv, Gate, HeightStats, LawSummary, LimitTv, MarginalTv, MaxDegreeStats, PatternResult, PmfEntry,
    SizeResult,
};
pub use tv::{tv_counts, tv_plugin, tv_vs_law, TvEstimate, DEFAULT_RESAMPLES};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exact::{precision_from_env, AnyTable, ExactError, FringeEvent, Mode, TableOptions, Threshold};
use crate::par::{self, Exec};
use crate::rng::stream_rng;
use crate::samplers::{LimitSampler, SampleError, SamplerOptions, TbarVariant, TreeSampler};
use crate::tree::{
    ancestor, large_ancestor, pointed_at, pointed_fringe, uniform_vertex, Count, PlaneTree, PointedTree, Subtree, TreeError, Window,
    WindowPattern,
};
use crate::weights::{classify, OffspringLaw, Tail, WeightError, WeightSequence, WeightType};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Two-sided normal quantile at 99.9%.
const Z999: f64 = 3.290_526_731_491_926;
const Z95: f64 = 1.959_963_984_540_054;

/// Limit prediction for a pattern under `law`.
pub fn pattern_limit(law: &OffspringLaw, spec: &PatternSpec) -> Result<f64, LabError> {
    let below = match spec.pinned()? {
        None => return Ok(0.0),
        Some(pt) => pt,
    };
    let (t, _) = below.flatten().expect("pinned trees are full");
    let prod: f64 = t.degrees().iter().map(|&d| law.prob(d as usize)).product();
    Ok(match spec {
        PatternSpec::Exact { .. } | PatternSpec::Root => prod,
        PatternSpec::LargeAncestor { .. } => (1.0 - law.mu()) * prod,
        PatternSpec::AtLeast { left, right, .. } => {
            // u_{h+1} is infinite, or finite with enough room on both sides:
            // Σ_k Pr{ξ̂ = k}·(k − a − b)⁺/k = Σ_k π_k (k − a − b)⁺.
            let s = (*left + *right) as usize;
            let cut = law.truncation();
            let mut finite: f64 = (s + 1..=cut).map(|k| law.prob(k) * (k - s) as f64).sum();
            if !matches!(law.tail(), Tail::None) {
                // Σ_{k>K} π_k (k − s), corrected for K < k ≤ s.
                finite += law.size_biased().tail_mass - s as f64 * law.tail_mass();
                finite += (cut + 1..=s).map(|k| law.prob(k) * (s - k) as f64).sum::<f64>();
            }
            (1.0 - law.mu() + finite.max(0.0)) * prod
        }
    })
}

/// `Pr{h(u_0) = t}` in the condensation limit, `t ≥ 1`.
pub fn height_limit_pmf(mu: f64, t: usize) -> f64 {
    if t == 0 {
        return 0.0;
    }
    t as f64 * (1.0 - mu).powi(2) * mu.powi(t as i32 - 1)
}

pub(crate) fn wilson(k: usize, n: usize, z: f64) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let d = 1.0 + z * z / n;
    let c = (p + z * z / (2.0 * n)) / d;
    let h = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / d;
    [(c - h).max(0.0), (c + h).min(1.0)]
}

pub(crate) fn pmf_entry(value: usize, count: usize, total: usize) -> PmfEntry {
    let p = if total == 0 { 0.0 } else { count as f64 / total as f64 };
    PmfEntry { value, count, freq: p, se: (p * (1.0 - p) / total.max(1) as f64).sqrt(), ci: wilson(count, total, Z95) }
}

/// One pattern prepared for a given `n`.
struct Prepared {
    label: String,
    event: FringeEvent,
    pattern: WindowPattern,
    window: u32,
    limit: f64,
}

fn prepare(specs: &[PatternSpec], law: &OffspringLaw, omega: u32) -> Result<Vec<Prepared>, LabError> {
    specs
        .iter()
        .map(|spec| {
            let event = match (spec, spec.pinned()?) {
                (PatternSpec::Root, _) => FringeEvent::RootIsPointed,
                (PatternSpec::Exact { .. }, Some(pt)) => FringeEvent::Exact(pt),
                (PatternSpec::AtLeast { left, right, .. }, Some(pt)) => {
                    FringeEvent::Threshold { below: pt, threshold: Threshold::AtLeast { left: *left, right: *right } }
                }
                (PatternSpec::LargeAncestor { .. }, Some(pt)) => {
                    FringeEvent::Threshold { below: pt, threshold: Threshold::DegreeAbove(omega) }
                }
                _ => unreachable!(),
            };
            let pattern = event.pattern();
            Ok(Prepared { label: spec.label(), window: pattern.required_window(), pattern, event, limit: pattern_limit(law, spec)? })
        })
        .collect()
}

/// What one replication contributes.
struct Record {
    height: usize,
    max_degree: u32,
    max_at_root: bool,
    max_on_spine: bool,
    diamond: bool,
    hits: Vec<Option<bool>>,
    fringe: Option<String>,
    marginals: Vec<String>,
}

const DIAMOND: &str = "⋄";

fn fmt_degree(d: u32, cap: u32) -> String {
    if d > cap {
        "L".into()
    } else {
        d.to_string()
    }
}

fn fmt_count(c: Count, cap: u32) -> String {
    match c {
        Count::Finite(k) => fmt_degree(k, cap),
        Count::Infinite => "L".into(),
    }
}

/// Outdegree at `path` below the root of `s`: "-" if no such vertex, "?" if
/// it exists outside the materialized part.
fn node_at(s: &Subtree, path: &[u32], cap: u32) -> String {
    let mut p = 0;
    for &r in path {
        let node = s.nodes()[p];
        if r == 0 || r > node.degree {
            return "-".into();
        }
        if r > node.shown {
            return "?".into();
        }
        p = s.child(p, r - 1).expect("materialized child");
    }
    fmt_degree(s.nodes()[p].degree, cap)
}

/// The value a probe reads off a pointed tree.
pub fn probe_value(pt: &PointedTree, probe: &Probe, cap: u32) -> String {
    let record = |index: usize| {
        if index == 0 || index > pt.spine.len() {
            Err(if pt.spine_complete { "-" } else { "?" }.to_string())
        } else {
            Ok(&pt.spine[index - 1])
        }
    };
    match probe {
        Probe::Center { path } => node_at(&pt.center, path, cap),
        Probe::Spine { index } => match record(*index) {
            Ok(rec) => fmt_count(rec.pair.total(), cap),
            Err(s) => s,
        },
        Probe::Sibling { index, side, rank, path } => match record(*index) {
            Err(s) => s,
            Ok(rec) => {
                let (list, count) = match side {
                    SideSpec::Left => (&rec.left, rec.pair.left),
                    SideSpec::Right => (&rec.right, rec.pair.right),
                };
                match list.get(*rank as usize - 1) {
                    Some(s) if *rank >= 1 => node_at(s, path, cap),
                    _ if *rank >= 1 && count.at_least(*rank) => "?".into(),
                    _ => "-".into(),
                }
            }
        },
    }
}

fn marginal_key(pt: Option<&PointedTree>, set: &[Probe], cap: u32) -> String {
    match pt {
        None => DIAMOND.into(),
        Some(pt) => set.iter().map(|p| probe_value(pt, p, cap)).collect::<Vec<_>>().join(";"),
    }
}

fn set_label(set: &[Probe]) -> String {
    set.iter().map(Probe::label).collect::<Vec<_>>().join(";")
}

/// Stream id of replication `i` at size `n`; the top bit marks limit draws.
fn stream(n: usize, i: usize, limit: bool) -> u64 {
    ((limit as u64) << 63) | ((n as u64) << 32) | i as u64
}

fn try_collect<T>(v: Vec<Result<T, LabError>>) -> Result<Vec<T>, LabError> {
    v.into_iter().collect()
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    w: &'a WeightSequence,
    law: &'a OffspringLaw,
}

/// Runs every requested statistic over the grid, sharing one sample set per `n`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    cfg.validate()?;
    let w = cfg.weights()?;
    let law = classify(&w)?;
    if cfg.wants(Statistic::TvVsLimit) && law.kind() == WeightType::I {
        return Err(LabError::Precondition("tv_vs_limit compares against T̄*_n, which needs a type II or III family".into()));
    }
    let ctx = Ctx { cfg, w: &w, law: &law };
    par::with_threads(cfg.threads, || {
        let mut report = ExperimentReport::new(cfg.clone(), LawSummary::of(&law));
        for &requested in &cfg.n_grid {
            let res = run_size(&ctx, requested, &mut report.warnings)?;
            report.results.push(res);
        }
        report.finish_gates();
        Ok(report)
    })
}

fn run_size(ctx: &Ctx, requested: usize, warnings: &mut Vec<String>) -> Result<SizeResult, LabError> {
    let Ctx { cfg, w, law } = *ctx;
    let n = w.round_up_admissible(requested);
    if n != requested {
        warnings.push(format!("n = {requested} is not admissible for span {}; using n = {n}", w.span()));
    }
    let omega = cfg.omega.at(n)?;
    let reps = cfg.replications;
    let opts = SamplerOptions { exec: Exec::default(), ..Default::default() };
    let sampler = TreeSampler::from_law(law, n, cfg.strategy, opts)?;
    let patterns = if cfg.wants(Statistic::PatternProbs) { prepare(&cfg.patterns, law, omega)? } else { Vec::new() };
    let cap = cfg.tv.degree_cap.unwrap_or(omega);
    let want_fringe = cfg.wants(Statistic::TvExtendedFringe);
    let want_marg = cfg.wants(Statistic::TvVsLimit);

    let records = try_collect(par::map_range(Exec::Parallel, reps, |i| {
        let mut rng = stream_rng(cfg.seed, stream(n, i, false));
        let t = sampler.sample(&mut rng)?;
        let v = uniform_vertex(&t, &mut rng);
        Ok(record(&t, v, omega, &patterns, cfg, cap, want_fringe, want_marg))
    }))?;

    let mut res = SizeResult::new(n, requested, omega, reps, sampler.strategy().to_string());
    let diamonds = records.iter().filter(|r| r.diamond).count();
    res.censoring = Censoring { total: reps, observed: reps - diamonds, diamond: diamonds, gw_overflow: 0 };
    let seed_n = cfg.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);

    if cfg.wants(Statistic::HeightDist) {
        res.height = Some(height_stats(law, &records, cfg.tv.resamples, seed_n));
    }
    if cfg.wants(Statistic::MaxDegree) {
        res.max_degree = Some(max_degree_stats(law, &records, n));
    }
    if !patterns.is_empty() {
        res.patterns = pattern_stats(w, n, cfg.exact_cap, &patterns, &records)?;
    }
    if want_fringe {
        let ls = LimitSampler::new(law, cfg.tv.window)?;
        let k = cfg.tv.k;
        let m = cfg.limit_reps();
        let limit: Vec<String> = par::map_range(Exec::Parallel, m, |i| {
            let pt = ls.sample(&mut stream_rng(cfg.seed, stream(n, i, true)));
            if pt.spine.len() >= k {
                pointed_fringe(&pt, k).expect("spine long enough").encode()
            } else {
                DIAMOND.into()
            }
        });
        let finite: Vec<String> = records.iter().map(|r| r.fringe.clone().unwrap_or_else(|| DIAMOND.into())).collect();
        let tv = tv_plugin(&finite, &limit, cfg.tv.resamples, seed_n ^ 1);
        if tv.undersampled {
            warnings.push(format!("n = {n}: H_{k} encodings have {} distinct outcomes; the TV estimate is bias-dominated", tv.support));
        }
        res.tv_extended_fringe = Some(FringeTv {
            k,
            window: cfg.tv.window,
            limit_samples: m,
            diamond_finite: finite.iter().filter(|s| *s == DIAMOND).count(),
            diamond_limit: limit.iter().filter(|s| *s == DIAMOND).count(),
            tv,
        });
    }
    if want_marg {
        res.tv_vs_limit = Some(limit_tv(ctx, n, omega, cap, &records, seed_n, warnings)?);
    }
    Ok(res)
}

impl ExperimentConfig {
    fn limit_reps(&self) -> usize {
        self.tv.limit_replications.unwrap_or(self.replications).max(1)
    }
}

#[allow(clippy::too_many_arguments)]
fn record(
    t: &PlaneTree,
    v: usize,
    omega: u32,
    patterns: &[Prepared],
    cfg: &ExperimentConfig,
    cap: u32,
    fringe: bool,
    marg: bool,
) -> Record {
    let layout = t.layout();
    let max_degree = t.max_degree();
    let mut max_on_spine = false;
    let mut cur = v;
    while let Some(p) = layout.parent(cur) {
        if t.degree(p) == max_degree {
            max_on_spine = true;
            break;
        }
        cur = p;
    }
    let top = large_ancestor(t, &layout, v, omega);
    let mut views: BTreeMap<u32, PointedTree> = BTreeMap::new();
    let hits = patterns
        .iter()
        .map(|p| {
            let pt = views.entry(p.window).or_insert_with(|| pointed_at(t, &layout, 0, v, Window::Truncated(p.window)));
            // None: the window is too small to decide.
            p.pattern.matches(pt).ok()
        })
        .collect();
    let fringe = fringe
        .then(|| ancestor(&layout, v, cfg.tv.k).map(|a| pointed_at(t, &layout, a, v, Window::Truncated(cfg.tv.window)).encode()))
        .flatten();
    let marginals = if marg {
        let pt = top.map(|a| pointed_at(t, &layout, a, v, Window::Truncated(cfg.tv.marginal_window)));
        cfg.tv.address_sets.iter().map(|set| marginal_key(pt.as_ref(), set, cap)).collect()
    } else {
        Vec::new()
    };
    Record {
        height: layout.depth(v),
        max_degree,
        max_at_root: t.degree(0) == max_degree,
        max_on_spine,
        diamond: top.is_none(),
        hits,
        fringe,
        marginals,
    }
}

fn height_stats(law: &OffspringLaw, recs: &[Record], resamples: usize, seed: u64) -> HeightStats {
    let total = recs.len();
    let tmax = recs.iter().map(|r| r.height).max().unwrap_or(0);
    let mut counts = vec![0usize; tmax + 1];
    for r in recs {
        counts[r.height] += 1;
    }
    let positive = total - counts[0];
    let pmf: Vec<PmfEntry> = (1..=tmax).map(|t| pmf_entry(t, counts[t], positive)).collect();
    let mean = recs.iter().map(|r| r.height as f64).sum::<f64>() / total as f64;
    let (limit, tv) = if law.kind() == WeightType::I || positive == 0 {
        (None, None)
    } else {
        let mu = law.mu();
        let lim: Vec<f64> = (1..=tmax).map(|t| height_limit_pmf(mu, t)).collect();
        let c: Vec<u64> = counts[1..].iter().map(|&x| x as u64).collect();
        (Some(lim.clone()), Some(tv_vs_law(&c, &lim, 1.0, resamples, seed ^ 2)))
    };
    HeightStats { root: pmf_entry(0, counts[0], total), pmf, mean, limit, tv }
}

fn max_degree_stats(law: &OffspringLaw, recs: &[Record], n: usize) -> MaxDegreeStats {
    let total = recs.len() as f64;
    let mut ratios: Vec<f64> = recs.iter().map(|r| r.max_degree as f64 / n as f64).collect();
    let mean = ratios.iter().sum::<f64>() / total;
    let var = if recs.len() > 1 { ratios.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (total - 1.0) } else { 0.0 };
    let se = (var / total).sqrt();
    ratios.sort_by(f64::total_cmp);
    let q = |p: f64| ratios[((ratios.len() - 1) as f64 * p).round() as usize];
    MaxDegreeStats {
        mean_ratio: mean,
        se,
        ci: [mean - Z95 * se, mean + Z95 * se],
        quantiles: [q(0.1), q(0.5), q(0.9)],
        at_root: recs.iter().filter(|r| r.max_at_root).count() as f64 / total,
        on_spine: recs.iter().filter(|r| r.max_on_spine).count() as f64 / total,
        limit_ratio: match law.kind() {
            WeightType::I => 0.0,
            _ => 1.0 - law.mu(),
        },
    }
}

fn pattern_stats(
    w: &WeightSequence,
    n: usize,
    exact_cap: usize,
    patterns: &[Prepared],
    recs: &[Record],
) -> Result<Vec<PatternResult>, LabError> {
    let table = if n <= exact_cap {
        let mode = if w.is_rational() && n <= Mode::AUTO_RATIONAL_N { Mode::Rational } else { Mode::Double };
        Some(AnyTable::build(w, n, mode, TableOptions::columns())?)
    } else {
        None
    };
    patterns
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let hits = recs.iter().filter(|r| r.hits[j] == Some(true)).count();
            let decided = recs.iter().filter(|r| r.hits[j].is_some()).count();
            let e = pmf_entry(0, hits, decided);
            let (exact, exact_err, within) = match &table {
                Some(tbl) => {
                    let x = tbl.fringe_event_prob(&p.event)?;
                    let v = x.to_f64();
                    let ok = if decided == 0 {
                        true
                    } else if v <= 0.0 {
                        hits == 0
                    } else {
                        (e.freq - v).abs() <= Z999 * (v * (1.0 - v) / decided as f64).sqrt() + 0.5 / decided as f64
                    };
                    (Some(v), Some(x.rel_err()), Some(ok))
                }
                None => (None, None, None),
            };
            Ok(PatternResult {
                label: p.label.clone(),
                limit: p.limit,
                exact,
                exact_rel_err: exact_err,
                hits,
                decided,
                insufficient_window: recs.len() - decided,
                freq: e.freq,
                se: e.se,
                ci: e.ci,
                within_exact_ci: within,
            })
        })
        .collect()
}

fn limit_tv(
    ctx: &Ctx,
    n: usize,
    omega: u32,
    cap: u32,
    recs: &[Record],
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<LimitTv, LabError> {
    let Ctx { cfg, w, law } = *ctx;
    let bits = cfg.tv.dtilde_precision.unwrap_or_else(precision_from_env);
    let mode = if bits == 0 { Mode::Double } else { Mode::HighPrecision(bits) };
    let table = AnyTable::build(w, n, mode, TableOptions::columns())?;
    let pmf: Vec<(usize, f64)> = table.dtilde_dist(omega)?.into_iter().map(|(k, p)| (k, p.to_f64())).collect();
    let total: f64 = pmf.iter().map(|x| x.1).sum();
    let pmf: Vec<(usize, f64)> = pmf.into_iter().map(|(k, p)| (k, p / total)).collect();
    let ls = LimitSampler::new(law, cfg.tv.marginal_window)?.with_dtilde(&pmf)?;
    let m = cfg.limit_reps();
    let sets = &cfg.tv.address_sets;
    let limit: Vec<Vec<String>> = try_collect(par::map_range(Exec::Parallel, m, |i| {
        let pt = ls.sample_tbar_star_n(&mut stream_rng(cfg.seed, stream(n, i, true)), TbarVariant::Tbar)?;
        Ok(sets.iter().map(|s| marginal_key(Some(&pt), s, cap)).collect())
    }))?;
    let mean_dtilde = pmf.iter().map(|&(k, p)| k as f64 * p).sum::<f64>();
    let marginals = sets
        .iter()
        .enumerate()
        .map(|(j, set)| {
            let a: Vec<&String> = recs.iter().map(|r| &r.marginals[j]).collect();
            let b: Vec<&String> = limit.iter().map(|r| &r[j]).collect();
            let tv = tv_plugin(&a, &b, cfg.tv.resamples, seed ^ (16 + j as u64));
            if tv.undersampled {
                warnings.push(format!(
                    "n = {n}: marginal {} has {} distinct outcomes; the TV estimate is bias-dominated",
                    set_label(set),
                    tv.support
                ));
            }
            MarginalTv { label: set_label(set), tv }
        })
        .collect();
    Ok(LimitTv {
        window: cfg.tv.marginal_window,
        degree_cap: cap,
        dtilde_mode: mode_label(mode),
        dtilde_mean: mean_dtilde,
        limit_samples: m,
        marginals,
    })
}

fn mode_label(m: Mode) -> String {
    match m {
        Mode::Rational => "rational".into(),
        Mode::HighPrecision(b) => format!("high-precision({b})"),
        Mode::Double => "double".into(),
    }
}

fn only(cfg: &ExperimentConfig, s: Statistic) -> ExperimentConfig {
    ExperimentConfig { statistics: vec![s], ..cfg.clone() }
}

/// Law of `h(v_0)` along the grid; needs a type II or III family.
pub fn run_height_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    if classify(&cfg.weights()?)?.kind() == WeightType::I {
        return Err(LabError::Precondition(
            "the height experiment compares with the condensation limit; use a type II or III family".into(),
        ));
    }
    run(&only(cfg, Statistic::HeightDist))
}

pub fn run_max_degree_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    run(&only(cfg, Statistic::MaxDegree))
}

pub fn run_pattern_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    run(&only(cfg, Statistic::PatternProbs))
}

/// `H_k` against the sin-tree for type I, marginals against `T̄*_n` otherwise.
pub fn run_tv_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let s = match classify(&cfg.weights()?)?.kind() {
        WeightType::I => Statistic::TvExtendedFringe,
        _ => Statistic::TvVsLimit,
    };
    run(&only(cfg, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_formulas() {
        assert!((height_limit_pmf(0.75, 2) - 3.0 / 32.0).abs() < 1e-15);
        assert_eq!(height_limit_pmf(0.0, 1), 1.0);
        let geo = classify(&WeightSequence::uniform()).unwrap();
        let cherry = PatternSpec::Exact { tree: "2,0,0".into(), point: 1 };
        assert!((pattern_limit(&geo, &cherry).unwrap() - 1.0 / 32.0).abs() < 1e-15);
        let leaf = PatternSpec::Exact { tree: "0".into(), point: 0 };
        assert_eq!(pattern_limit(&geo, &leaf).unwrap(), 0.5);
        // ≥(0,0) holds for every finite spine vertex: Σ π_k k = μ = 1.
        let any = PatternSpec::AtLeast { tree: "0".into(), point: 0, left: 0, right: 0 };
        assert!((pattern_limit(&geo, &any).unwrap() - 0.5).abs() < 1e-12);
        let pl = classify(&WeightSequence::power_law(3.0).unwrap()).unwrap();
        let la = PatternSpec::LargeAncestor { tree: "0".into(), point: 0 };
        assert!((pattern_limit(&pl, &la).unwrap() - (1.0 - pl.mu()) * pl.prob(0)).abs() < 1e-15);
        let any = PatternSpec::AtLeast { tree: "0".into(), point: 0, left: 0, right: 0 };
        assert!((pattern_limit(&pl, &any).unwrap() - pl.prob(0)).abs() < 1e-9);
        let iii = classify(&WeightSequence::factorial(1.0).unwrap()).unwrap();
        let far = PatternSpec::AtLeast { tree: "0".into(), point: 0, left: 5, right: 5 };
        assert_eq!(pattern_limit(&iii, &far).unwrap(), 1.0);
        assert_eq!(pattern_limit(&iii, &PatternSpec::Root).unwrap(), 0.0);
    }

    #[test]
    fn probes() {
        let t: PlaneTree = "3,1,0,0,2,0,0".parse().unwrap();
        let pt = pointed_at(&t, &t.layout(), 0, 5, Window::Truncated(2));
        let v = |p: Probe| probe_value(&pt, &p, 2);
        assert_eq!(v(Probe::Center { path: vec![] }), "0");
        assert_eq!(v(Probe::Center { path: vec![1] }), "-");
        assert_eq!(v(Probe::Spine { index: 1 }), "2");
        assert_eq!(v(Probe::Spine { index: 2 }), "L");
        assert_eq!(v(Probe::Spine { index: 3 }), "-");
        assert_eq!(v(Probe::Sibling { index: 1, side: SideSpec::Right, rank: 1, path: vec![] }), "0");
        assert_eq!(v(Probe::Sibling { index: 1, side: SideSpec::Left, rank: 1, path: vec![] }), "-");
        assert_eq!(marginal_key(None, &[Probe::Spine { index: 1 }], 3), DIAMOND);
    }

    #[test]
    fn wilson_interval() {
        let [lo, hi] = wilson(50, 100, Z95);
        assert!(lo < 0.5 && hi > 0.5 && (hi - lo - 0.19).abs() < 0.01);
        assert_eq!(wilson(0, 0, Z95), [0.0, 1.0]);
    }
}
