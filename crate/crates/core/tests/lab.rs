// Convergence-lab runs at small sizes, checked against exact values.

use sgt_core::lab::{run, run_height_experiment, run_tv_experiment, ExperimentConfig, PatternSpec, Statistic};

fn small(family: &str, alpha: Option<f64>, n: Vec<usize>, stats: Vec<Statistic>) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(family, alpha, n, 20_000, 5, stats);
    c.threads = Some(2);
    c
}

#[test]
fn patterns_agree_with_exact_values() {
    let mut cfg = small("uniform", None, vec![9, 40], vec![Statistic::PatternProbs]);
    cfg.patterns = vec![
        PatternSpec::Exact { tree: "0".into(), point: 0 },
        PatternSpec::Exact { tree: "2,0,0".into(), point: 1 },
        PatternSpec::AtLeast { tree: "0".into(), point: 0, left: 1, right: 0 },
        PatternSpec::Root,
    ];
    let rep = run(&cfg).unwrap();
    assert_eq!(rep.gates.len(), 8);
    assert!(rep.passed(), "{:#?}", rep.gates);
    let r = rep.result(40).unwrap();
    // Pr{v_0 is the root} = 1/n.
    assert!((r.patterns[3].exact.unwrap() - 1.0 / 40.0).abs() < 1e-12);
    assert_eq!(r.patterns[0].limit, 0.5);
}

#[test]
fn reports_do_not_depend_on_threads() {
    let mut cfg = small("powerlaw", Some(3.0), vec![101], vec![Statistic::HeightDist, Statistic::MaxDegree, Statistic::TvVsLimit]);
    cfg.replications = 2000;
    cfg.tv.dtilde_precision = Some(0);
    let a = run(&cfg).unwrap();
    cfg.threads = Some(1);
    let b = run(&cfg).unwrap();
    assert_eq!(a.results, b.results);
    assert!(a.to_json().contains("\"tv_vs_limit\"") && !a.to_json().contains("runtime_seconds"));
    assert!(a.to_csv().starts_with("n,statistic,value,stderr\n"));
    let c = &a.results[0].censoring;
    assert_eq!(c.total, c.observed + c.diamond + c.gw_overflow);
}

#[test]
fn sizes_are_rounded_to_admissible_values() {
    let cfg = small("binary", None, vec![10], vec![Statistic::MaxDegree]);
    let rep = run(&cfg).unwrap();
    assert_eq!((rep.results[0].requested_n, rep.results[0].n), (10, 11));
    assert_eq!(rep.warnings.len(), 1);
    // Full binary trees: Δ = 2.
    assert!((rep.results[0].max_degree.as_ref().unwrap().mean_ratio - 2.0 / 11.0).abs() < 1e-12);
}

#[test]
fn regime_preconditions() {
    let cfg = small("uniform", None, vec![50], vec![]);
    assert!(run_height_experiment(&cfg).is_err());
    let mut t = cfg.clone();
    t.statistics = vec![Statistic::TvVsLimit];
    assert!(run(&t).is_err());
    let mut t = cfg;
    t.replications = 3000;
    let rep = run_tv_experiment(&t).unwrap();
    let f = rep.results[0].tv_extended_fringe.as_ref().unwrap();
    // 3000 draws over hundreds of encodings: flagged as bias-dominated.
    assert!(f.tv.undersampled && f.tv.estimate < 0.3, "{f:?}");
}

#[test]
fn config_round_trips_through_json() {
    let text = r#"{"family":"powerlaw","alpha":3,"n_grid":[201],"replications":10,"seed":1,
        "statistics":["height_dist"],"strategy":"dc","omega":{"name":"user","c":2,"beta":0.3}}"#;
    let cfg = ExperimentConfig::from_json(text).unwrap();
    assert_eq!(ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap(), cfg);
    assert!(ExperimentConfig::from_json(&text.replace("0.3", "1.2")).and_then(|c| c.validate()).is_err());
}
