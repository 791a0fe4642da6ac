// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use sgt_core::exact::{
    brute_event_prob, brute_root_degree, enumerate_trees, tree_weight, AnyTable, FringeEvent, Mode, TableOptions, Threshold,
};
use sgt_core::lab::{run, run_tv_experiment, ExperimentConfig, ExperimentReport, PatternSpec, Statistic};
use sgt_core::rng::stream_rng;
use sgt_core::samplers::{SamplerOptions, Strategy, TreeSampler};
use sgt_core::tree::{pointed_at, PlaneTree, PointedTree, Window};
use sgt_core::weights::{classify, WeightSequence};
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = (bool, String);

fn rat(x: &sgt_core::exact::ExactScalar) -> BigRational {
    x.as_rational().expect("rational table").clone()
}

fn pointed_trees(k: usize) -> Vec<PointedTree> {
    let mut out = Vec::new();
    for s in 1..=k {
        for (t, _) in enumerate_trees(&WeightSequence::uniform(), s).unwrap() {
            let layout = t.layout();
            out.extend((0..t.len()).map(|v| pointed_at(&t, &layout, 0, v, Window::Full)));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let fams = [WeightSequence::uniform(), WeightSequence::motzkin(), WeightSequence::binary(), WeightSequence::factorial(1.0).unwrap()];
    let mut events: Vec<FringeEvent> = pointed_trees(4).into_iter().map(FringeEvent::Exact).collect();
    events.push(FringeEvent::RootIsPointed);
    for b in pointed_trees(3) {
        for (l, r) in [(0, 0), (1, 0), (0, 2), (1, 1)] {
            events.push(FringeEvent::Threshold { below: b.clone(), threshold: Threshold::AtLeast { left: l, right: r } });
        }
        for omega in 0..3 {
            events.push(FringeEvent::Threshold { below: b.clone(), threshold: Threshold::DegreeAbove(omega) });
        }
    }
    let (mut checks, mut bad) = (0usize, Vec::new());
    for w in &fams {
        for n in (1..=8).filter(|&n| w.admits(n)) {
            let t = AnyTable::build(w, n, Mode::Rational, TableOptions::default()).unwrap();
            let z = rat(&t.z(n - 1, n).unwrap());
            for (tree, _) in enumerate_trees(w, n).unwrap() {
                checks += 1;
                if rat(&t.prefix_prob(tree.degrees()).unwrap()) != tree_weight(w, &tree).unwrap() / &z {
                    bad.push(format!("{} n={n} prefix {tree}", w.tag()));
                }
            }
            checks += 1;
            let rd: Vec<BigRational> = t.root_degree_dist().unwrap().iter().map(rat).collect();
            if rd != brute_root_degree(w, n).unwrap() {
                bad.push(format!("{} n={n} root degree", w.tag()));
            }
            for ev in &events {
                checks += 1;
                if rat(&t.fringe_event_prob(ev).unwrap()) != brute_event_prob(w, n, ev).unwrap() {
                    bad.push(format!("{} n={n} {ev:?}", w.tag()));
                }
            }
        }
    }
    let el = start.elapsed();
    let ok = bad.is_empty() && el < Duration::from_secs(120);
    (ok, format!("{checks} exact identities, {} mismatches {:?}, {:.1}s (< 120s)", bad.len(), bad.first(), el.as_secs_f64()))
}

/// Pearson statistic over the whole support and the largest one-cell statistic,
/// each against its 99.9% chi-square quantile.
fn chi_square_gate(w: &WeightSequence, n: usize, strategy: Strategy, draws: usize, seed: u64) -> Outcome {
    let trees = enumerate_trees(w, n).unwrap();
    let ws: Vec<f64> = trees.iter().map(|(_, x)| x.to_f64()).collect();
    let total: f64 = ws.iter().sum();
    let law: HashMap<PlaneTree, f64> = trees.into_iter().zip(ws).map(|((t, _), x)| (t, x / total)).collect();
    let s = TreeSampler::new(w, n, strategy, SamplerOptions::default()).unwrap();
    let mut rng = stream_rng(seed, 0);
    let mut counts: HashMap<PlaneTree, usize> = HashMap::new();
    for _ in 0..draws {
        *counts.entry(s.sample(&mut rng).unwrap()).or_default() += 1;
    }
    let outside = counts.keys().filter(|t| !law.contains_key(t)).count();
    let cell = |t: &PlaneTree, p: f64| {
        let e = p * draws as f64;
        (*counts.get(t).unwrap_or(&0) as f64 - e).powi(2) / e
    };
    let pearson: f64 = law.iter().map(|(t, &p)| cell(t, p)).sum();
    let worst = law.iter().map(|(t, &p)| cell(t, p) / (1.0 - p)).fold(0.0, f64::max);
    let crit = ChiSquared::new((law.len() - 1) as f64).unwrap().inverse_cdf(0.999);
    let crit1 = ChiSquared::new(1.0).unwrap().inverse_cdf(0.999);
    let ok = outside == 0 && pearson < crit && worst < crit1;
    (
        ok,
        format!("{} n={n} {}: {} trees, χ²={pearson:.2} (<{crit:.2}), max cell {worst:.2} (<{crit1:.2})", w.tag(), s.strategy(), law.len()),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (a, da) = chi_square_gate(&WeightSequence::uniform(), 4, Strategy::Auto, 1_000_000, 2);
    let (b, db) = chi_square_gate(&WeightSequence::factorial(1.0).unwrap(), 5, Strategy::ExactSequential, 1_000_000, 3);
    let el = start.elapsed();
    (a && b && el < Duration::from_secs(300), format!("{da}; {db}; {:.1}s (< 300s)", el.as_secs_f64()))
}

fn criterion_3() -> Outcome {
    let mut cfg = ExperimentConfig::new("uniform", None, vec![401, 1601], 200_000, 3, vec![Statistic::PatternProbs]);
    cfg.strategy = Strategy::DivideConquer;
    cfg.patterns = vec![PatternSpec::Exact { tree: "0".into(), point: 0 }, PatternSpec::Exact { tree: "2,0,0".into(), point: 1 }];
    let rep = run(&cfg).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for r in &rep.results {
        let (leaf, cherry) = (&r.patterns[0], &r.patterns[1]);
        ok &= (leaf.freq - 0.5).abs() <= 0.01 && (cherry.freq - 1.0 / 32.0).abs() <= 0.005;
        detail.push(format!("n={}: leaf {:.4} (±0.01 of 0.5), cherry {:.5} (±0.005 of 0.03125)", r.n, leaf.freq, cherry.freq));
    }
    (ok, detail.join("; "))
}

fn powerlaw_run() -> ExperimentReport {
    let mut cfg = ExperimentConfig::new(
        "powerlaw",
        Some(3.0),
        vec![2001, 8001],
        50_000,
        4,
        vec![Statistic::HeightDist, Statistic::MaxDegree, Statistic::PatternProbs],
    );
    cfg.patterns = vec![
        PatternSpec::LargeAncestor { tree: "0".into(), point: 0 },
        PatternSpec::LargeAncestor { tree: "1,0".into(), point: 1 },
        PatternSpec::LargeAncestor { tree: "2,0,0".into(), point: 1 },
    ];
    run(&cfg).unwrap()
}

fn criterion_4(rep: &ExperimentReport) -> Outcome {
    let tv: Vec<f64> = rep.results.iter().map(|r| r.height.as_ref().unwrap().tv.as_ref().unwrap().estimate).collect();
    let ok = tv.windows(2).all(|w| w[1] < w[0]) && *tv.last().unwrap() < 0.05;
    (ok, format!("μ={:.4}, TV at n=2001, 8001: {:.4}, {:.4} (decreasing, last < 0.05)", rep.law.mu, tv[0], tv[1]))
}

fn criterion_6(rep: &ExperimentReport) -> Outcome {
    let r = rep.result(8001).unwrap();
    let diamond = r.censoring.diamond as f64 / r.censoring.total as f64;
    let mut ok = diamond < 0.05;
    let mut detail = vec![format!("Ω={}", r.omega)];
    for p in &r.patterns {
        ok &= (p.freq - p.limit).abs() <= 0.01;
        detail.push(format!("{} {:.4} vs {:.4}", p.label, p.freq, p.limit));
    }
    detail.push(format!("⋄ frequency {diamond:.4} (< 0.05)"));
    (ok, detail.join("; "))
}

fn criterion_7(rep: &ExperimentReport) -> Outcome {
    let m = rep.result(8001).unwrap().max_degree.as_ref().unwrap();
    ((m.mean_ratio - m.limit_ratio).abs() <= 0.05, format!("mean Δ/n {:.4} vs 1−μ = {:.4} (±0.05)", m.mean_ratio, m.limit_ratio))
}

fn criterion_5() -> Outcome {
    let mut cfg =
        ExperimentConfig::new("factorial", Some(1.0), vec![201, 501], 20_000, 5, vec![Statistic::HeightDist, Statistic::MaxDegree]);
    cfg.strategy = Strategy::ExactSequential;
    let rep = run(&cfg).unwrap();
    let h1: Vec<f64> = rep
        .results
        .iter()
        .map(|r| {
            let h = r.height.as_ref().unwrap();
            h.pmf.first().filter(|e| e.value == 1).map_or(0, |e| e.count) as f64 / r.replications as f64
        })
        .collect();
    let delta = rep.results[1].max_degree.as_ref().unwrap().mean_ratio;
    let ok = h1[1] >= 0.9 && h1[1] > h1[0] && delta >= 0.9;
    (ok, format!("Pr{{h=1}} at n=201, 501: {:.4}, {:.4} (≥ 0.9, increasing); mean Δ/n at 501: {delta:.4} (≥ 0.9)", h1[0], h1[1]))
}

fn criterion_8() -> Outcome {
    let mut cfg = ExperimentConfig::new("uniform", None, vec![101, 401, 1601], 100_000, 8, vec![]);
    cfg.strategy = Strategy::DivideConquer;
    let rep = run_tv_experiment(&cfg).unwrap();
    let tv: Vec<_> = rep.results.iter().map(|r| r.tv_extended_fringe.as_ref().unwrap().tv.clone()).collect();
    let mono = tv.windows(2).all(|w| w[1].estimate <= w[0].estimate || w[1].ci[0] <= w[0].ci[1]);
    let last = tv.last().unwrap().estimate;
    let shown: Vec<String> = tv.iter().map(|t| format!("{:.4} [{:.4}, {:.4}]", t.estimate, t.ci[0], t.ci[1])).collect();
    (mono && last < 0.05, format!("TV at n=101, 401, 1601: {} (nonincreasing within CI overlap, last < 0.05)", shown.join(", ")))
}

fn criterion_9() -> Outcome {
    let cfg = ExperimentConfig::new("powerlaw", Some(3.0), vec![2001], 50_000, 9, vec![]);
    let rep = run_tv_experiment(&cfg).unwrap();
    let l = rep.results[0].tv_vs_limit.as_ref().unwrap();
    let ok = l.marginals.iter().all(|m| m.tv.estimate < 0.05);
    let shown: Vec<String> = l.marginals.iter().map(|m| format!("{} {:.4}", m.label, m.tv.estimate)).collect();
    (ok, format!("D̃ via {}, Ω={}: {} (each < 0.05)", l.dtilde_mode, rep.results[0].omega, shown.join(", ")))
}

fn main() {
    // `cargo test -- --list` and filters probe test binaries; this suite is a single unit.
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    assert_eq!(classify(&WeightSequence::uniform()).unwrap().mu(), 1.0);
    let mut failed = Vec::new();
    let mut report = |i: usize, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let (ok, detail) = f();
        println!("criterion {i}: {} — {detail} [{:.1}s]", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        if !ok {
            failed.push(i);
        }
    };
    report(1, &criterion_1);
    report(2, &criterion_2);
    report(3, &criterion_3);
    let pl = powerlaw_run();
    report(4, &|| criterion_4(&pl));
    report(5, &criterion_5);
    report(6, &|| criterion_6(&pl));
    report(7, &|| criterion_7(&pl));
    report(8, &criterion_8);
    report(9, &criterion_9);
    if failed.is_empty() {
        println!("acceptance: all 9 criteria PASS");
    } else {
        println!("acceptance: FAILED criteria {failed:?}");
        std::process::exit(1);
    }
}
