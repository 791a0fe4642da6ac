// SPDX-License-Identifier: Apache-2.0

//! `sgt`: classify weight sequences, sample conditioned trees and their local
//! limits, compute exact small-n probabilities and run convergence experiments.

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sgt_core::exact::{
    enumerate_trees, precision_from_env, selftest, selftest_families, AnyTable, ExactError, ExactScalar, FringeEvent, Mode, TableOptions,
    Threshold,
};
use sgt_core::lab::{self, ExperimentConfig, LabError, OmegaSchedule};
use sgt_core::par::{self, Exec};
use sgt_core::rng::stream_rng;
use sgt_core::samplers::{LimitSampler, SampleError, SamplerOptions, Strategy, TbarVariant, TreeSampler};
use sgt_core::tree::serial::pointed_to_json;
use sgt_core::tree::{pointed_at, PlaneTree, PointedTree, TreeError, Window};
use sgt_core::weights::{classify, read_weight_file, OffspringLaw, WeightError, WeightSequence, WeightType};

#[derive(Parser)]
#[command(name = "sgt", version, about = "Simply generated random trees: sampling, exact probabilities and local-limit checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Base seed; required for sampling when stdout is not a terminal.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Mantissa bits for big-float arithmetic (default: SGT_PRECISION or 128).
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Write the main output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON even on a terminal.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default 1).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
struct WeightArgs {
    /// uniform, cayley, binary, motzkin, powerlaw or factorial.
    #[arg(long)]
    family: Option<String>,
    /// Exponent for powerlaw and factorial.
    #[arg(long)]
    alpha: Option<f64>,
    /// Weight table file (overrides --family).
    #[arg(long)]
    weights_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Rational,
    Hp,
    Double,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Auto,
    SinTree,
    Condensation,
    Tbar,
}

#[derive(Subcommand)]
enum Cmd {
    /// Type, τ, μ, σ² and span of a weight sequence.
    Classify {
        #[command(flatten)]
        w: WeightArgs,
    },
    /// Draw conditioned trees, one DFS outdegree sequence per line.
    Sample {
        #[command(flatten)]
        w: WeightArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// auto, rejection, sequential or divide-conquer.
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
    },
    /// Draw windows of the local limit objects.
    SampleLimit {
        #[command(flatten)]
        w: WeightArgs,
        #[arg(long, value_enum, default_value = "auto")]
        regime: RegimeArg,
        #[arg(long, default_value_t = 3)]
        window: u32,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Tree size for the finite-n approximation (regime tbar).
        #[arg(long)]
        n: Option<usize>,
        /// Ω schedule for regime tbar: quarter_power, log or user:c,beta.
        #[arg(long, default_value = "quarter_power")]
        omega: String,
        /// Prune the infinite spine vertex to D̃_n − 1 siblings (regime tbar).
        #[arg(long)]
        pruned: bool,
    },
    /// Exact finite-n quantities.
    Exact {
        #[command(subcommand)]
        cmd: ExactCmd,
    },
    /// Run a convergence experiment from a JSON config.
    Converge {
        #[arg(long)]
        config: PathBuf,
        /// Also write the flat CSV report here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Record wall-clock time in the report (breaks byte-identical output).
        #[arg(long)]
        timing: bool,
    },
    /// Exact engine against brute-force enumeration.
    Selftest {
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
}

#[derive(Args, Clone)]
struct ExactArgs {
    #[command(flatten)]
    w: WeightArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
}

#[derive(Subcommand)]
enum ExactCmd {
    /// Σ ω(T) over trees with n vertices.
    Total {
        #[command(flatten)]
        a: ExactArgs,
    },
    /// Probability that T_n's DFS outdegrees start with --degrees.
    Prefix {
        #[command(flatten)]
        a: ExactArgs,
        #[arg(long)]
        degrees: String,
    },
    /// Law of the root outdegree.
    RootDegree {
        #[command(flatten)]
        a: ExactArgs,
    },
    /// Law of D̃_n, the outdegree of the first ancestor above Ω.
    Dtilde {
        #[command(flatten)]
        a: ExactArgs,
        /// Threshold (default: the quarter-power schedule at n).
        #[arg(long)]
        omega: Option<u32>,
    },
    /// All trees with n vertices and their weights (n ≤ 12).
    Enumerate {
        #[command(flatten)]
        a: ExactArgs,
    },
    /// Probability of a fringe event at a uniform vertex.
    Event {
        #[command(flatten)]
        a: ExactArgs,
        /// DFS outdegrees of the pinned tree.
        #[arg(long, required_unless_present = "root")]
        tree: Option<String>,
        /// DFS index of the pointed vertex in --tree.
        #[arg(long, default_value_t = 0)]
        point: usize,
        /// The next ancestor has at least l siblings left and r right: "l,r".
        #[arg(long, conflicts_with = "degree_above")]
        at_least: Option<String>,
        /// The next ancestor has outdegree above this.
        #[arg(long)]
        degree_above: Option<u32>,
        /// The pointed vertex is the root.
        #[arg(long, conflicts_with_all = ["tree", "at_least", "degree_above"])]
        root: bool,
    },
}

/// An error with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(m: impl Into<String>) -> Self {
        Failure { code: 2, kind: "usage", message: m.into() }
    }
    fn invalid(m: impl Into<String>) -> Self {
        Failure { code: 3, kind: "validation", message: m.into() }
    }
    fn guard(m: impl Into<String>) -> Self {
        Failure { code: 4, kind: "resource_guard", message: m.into() }
    }
}

impl From<WeightError> for Failure {
    fn from(e: WeightError) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::ResourceGuard(_) | ExactError::SizeGuard { .. } => Failure::guard(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

impl From<SampleError> for Failure {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::Exact(e) => e.into(),
            SampleError::RetryCap { .. } => Failure::guard(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Exact(e) => e.into(),
            LabError::Sample(e) => e.into(),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::invalid(format!("i/o: {e}"))
    }
}

type Res<T> = Result<T, Failure>;

struct Ctx {
    global: Global,
    tty: bool,
}

impl Ctx {
    fn precision(&self) -> usize {
        self.global.precision.unwrap_or_else(precision_from_env)
    }

    fn threads(&self) -> usize {
        self.global.threads.unwrap_or(1)
    }

    fn machine(&self) -> bool {
        self.global.json || !self.tty || self.global.out.is_some()
    }

    /// The seed, which scripted sampling must state explicitly.
    fn seed(&self) -> Res<u64> {
        match self.global.seed {
            Some(s) => Ok(s),
            None if self.tty && self.global.out.is_none() => {
                let s = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_nanos() as u64).unwrap_or(0);
                eprintln!("using --seed {s}");
                Ok(s)
            }
            None => Err(Failure::usage("--seed is required when output is not a terminal")),
        }
    }

    fn write(&self, text: &str) -> Res<()> {
        match &self.global.out {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    /// JSON on one line for scripts, `key  value` lines on a terminal.
    fn emit(&self, v: &Value) -> Res<()> {
        if self.machine() {
            return self.write(&format!("{v}\n"));
        }
        match v.as_object() {
            Some(obj) if obj.values().all(|x| !x.is_array() && !x.is_object()) => {
                let width = obj.keys().map(|k| k.chars().count()).max().unwrap_or(0);
                let lines: String = obj
                    .iter()
                    .map(|(k, x)| format!("{k:width$}  {}\n", x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string())))
                    .collect();
                self.write(&lines)
            }
            _ => self.write(&format!("{}\n", serde_json::to_string_pretty(v).expect("values serialize"))),
        }
    }
}

fn weights(a: &WeightArgs, default_family: &str) -> Res<WeightSequence> {
    Ok(match &a.weights_file {
        Some(p) => read_weight_file(p)?,
        None => WeightSequence::builtin(a.family.as_deref().unwrap_or(default_family), a.alpha)?,
    })
}

/// Integral values print as integers.
fn num(x: f64) -> Value {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e15 {
        json!(x as i64)
    } else {
        json!(x)
    }
}

fn law_json(law: &OffspringLaw) -> Value {
    let tau = match law.tau_exact() {
        Some(t) => json!(ExactScalar::Rational(t.clone()).to_string()),
        None => num(law.tau()),
    };
    json!({
        "family": law.weights().tag(),
        "type": law.kind().to_string(),
        "tau": tau,
        "mu": num(law.mu()),
        "sigma2": if law.sigma2().is_finite() { num(law.sigma2()) } else { json!("inf") },
        "span": law.weights().span(),
    })
}

fn table(ctx: &Ctx, a: &ExactArgs) -> Res<(WeightSequence, AnyTable)> {
    let w = weights(&a.w, "uniform")?;
    if a.n == 0 {
        return Err(Failure::invalid("n must be at least 1"));
    }
    let opts = if a.n > 1024 { TableOptions::columns() } else { TableOptions::default() };
    let mode = match a.mode {
        ModeArg::Auto => Mode::auto(&w, a.n, ctx.precision(), &opts),
        ModeArg::Rational => Mode::Rational,
        ModeArg::Hp => Mode::HighPrecision(ctx.precision()),
        ModeArg::Double => Mode::Double,
    };
    let t = AnyTable::build(&w, a.n, mode, opts)?;
    Ok((w, t))
}

fn parse_degrees(s: &str) -> Res<Vec<u32>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| Failure::invalid(format!("bad outdegree '{x}'"))))
        .collect()
}

fn exact(ctx: &Ctx, cmd: ExactCmd) -> Res<()> {
    let v = match cmd {
        ExactCmd::Total { a } => json!({"weight": table(ctx, &a)?.1.total_tree_weight()?.to_json()}),
        ExactCmd::Prefix { a, degrees } => {
            let d = parse_degrees(&degrees)?;
            json!({"prob": table(ctx, &a)?.1.prefix_prob(&d)?.to_json()})
        }
        ExactCmd::RootDegree { a } => {
            let dist: Vec<Value> = table(ctx, &a)?.1.root_degree_dist()?.iter().map(ExactScalar::to_json).collect();
            json!({"n": a.n, "dist": dist})
        }
        ExactCmd::Dtilde { a, omega } => {
            let omega = match omega {
                Some(o) => o,
                None => OmegaSchedule::QuarterPower.at(a.n)?,
            };
            let (_, t) = table(ctx, &a)?;
            let dist: Vec<Value> = t.dtilde_dist(omega)?.iter().map(|(k, p)| json!({"k": k, "prob": p.to_json()})).collect();
            json!({"n": a.n, "omega": omega, "dist": dist})
        }
        ExactCmd::Enumerate { a } => {
            let w = weights(&a.w, "uniform")?;
            let trees: Vec<Value> =
                enumerate_trees(&w, a.n)?.iter().map(|(t, x)| json!({"tree": t.to_string(), "weight": x.to_json()})).collect();
            json!({"n": a.n, "count": trees.len(), "trees": trees})
        }
        ExactCmd::Event { a, tree, point, at_least, degree_above, root } => {
            let ev = if root {
                FringeEvent::RootIsPointed
            } else {
                let text = tree.expect("clap requires --tree");
                let t: PlaneTree = text.parse()?;
                if point >= t.len() {
                    return Err(Failure::invalid(format!("--point {point} outside the {}-vertex tree", t.len())));
                }
                let below = pointed_at(&t, &t.layout(), 0, point, Window::Full);
                match (at_least, degree_above) {
                    (Some(s), _) => {
                        let lr = parse_degrees(&s)?;
                        let [left, right] = lr[..] else { return Err(Failure::invalid("--at-least takes l,r")) };
                        FringeEvent::Threshold { below, threshold: Threshold::AtLeast { left, right } }
                    }
                    (None, Some(o)) => FringeEvent::Threshold { below, threshold: Threshold::DegreeAbove(o) },
                    (None, None) => FringeEvent::Exact(below),
                }
            };
            json!({"prob": table(ctx, &a)?.1.fringe_event_prob(&ev)?.to_json()})
        }
    };
    ctx.emit(&v)
}

fn sample(ctx: &Ctx, w: &WeightArgs, n: usize, count: usize, strategy: Strategy) -> Res<()> {
    let seed = ctx.seed()?;
    let w = weights(w, "uniform")?;
    if n == 0 {
        return Err(Failure::invalid("n must be at least 1"));
    }
    let s = TreeSampler::new(&w, n, strategy, SamplerOptions::default())?;
    let trees: Vec<Result<PlaneTree, SampleError>> =
        par::with_threads(Some(ctx.threads()), || par::map_range(Exec::Parallel, count, |i| s.sample(&mut stream_rng(seed, i as u64))));
    let trees = trees.into_iter().collect::<Result<Vec<_>, _>>()?;
    if ctx.global.json {
        let list: Vec<String> = trees.iter().map(PlaneTree::to_string).collect();
        ctx.emit(&json!({"family": w.tag(), "n": n, "seed": seed, "strategy": s.strategy().to_string(), "trees": list}))
    } else {
        ctx.write(&trees.iter().map(|t| format!("{t}\n")).collect::<String>())
    }
}

#[allow(clippy::too_many_arguments)]
fn sample_limit(
    ctx: &Ctx,
    w: &WeightArgs,
    regime: RegimeArg,
    window: u32,
    count: usize,
    n: Option<usize>,
    omega: &str,
    pruned: bool,
) -> Res<()> {
    let seed = ctx.seed()?;
    let w = weights(w, if matches!(regime, RegimeArg::SinTree) { "uniform" } else { "powerlaw" })?;
    let law = classify(&w)?;
    let mut ls = LimitSampler::new(&law, window)?;
    if let RegimeArg::Tbar = regime {
        if law.kind() == WeightType::I {
            return Err(Failure::invalid("regime tbar needs a type II or III family"));
        }
        let n = n.ok_or_else(|| Failure::usage("regime tbar needs --n"))?;
        let om = omega.parse::<OmegaSchedule>()?.at(n)?;
        let t = AnyTable::build(&w, n, Mode::HighPrecision(ctx.precision()), TableOptions::columns())?;
        let pmf: Vec<(usize, f64)> = t.dtilde_dist(om)?.into_iter().map(|(k, p)| (k, p.to_f64())).collect();
        let total: f64 = pmf.iter().map(|x| x.1).sum();
        let pmf: Vec<(usize, f64)> = pmf.into_iter().map(|(k, p)| (k, p / total)).collect();
        ls = ls.with_dtilde(&pmf)?;
    }
    let variant = if pruned { TbarVariant::Pruned } else { TbarVariant::Tbar };
    let draws: Vec<Result<PointedTree, SampleError>> = par::with_threads(Some(ctx.threads()), || {
        par::map_range(Exec::Parallel, count, |i| {
            let rng = &mut stream_rng(seed, i as u64);
            match regime {
                RegimeArg::Auto => Ok(ls.sample(rng)),
                RegimeArg::SinTree => ls.sample_sin_tree(rng),
                RegimeArg::Condensation => ls.sample_condensation_tree(rng),
                RegimeArg::Tbar => ls.sample_tbar_star_n(rng, variant),
            }
        })
    });
    let draws = draws.into_iter().collect::<Result<Vec<_>, _>>()?;
    if ctx.global.json {
        let list: Vec<Value> = draws.iter().map(pointed_to_json).collect();
        ctx.emit(&json!({"family": w.tag(), "type": law.kind().to_string(), "window": window, "seed": seed, "samples": list}))
    } else {
        ctx.write(&draws.iter().map(|p| format!("{}\n", p.encode())).collect::<String>())
    }
}

fn converge(ctx: &Ctx, config: &PathBuf, csv: Option<&PathBuf>, timing: bool) -> Res<ExitCode> {
    let text = std::fs::read_to_string(config).map_err(|e| Failure::invalid(format!("{}: {e}", config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(s) = ctx.global.seed {
        cfg.seed = s;
    }
    cfg.threads = Some(ctx.global.threads.or(cfg.threads).unwrap_or(1));
    if cfg.tv.dtilde_precision.is_none() {
        cfg.tv.dtilde_precision = Some(ctx.precision());
    }
    let start = Instant::now();
    let mut rep = lab::run(&cfg)?;
    if timing {
        rep.runtime_seconds = Some(start.elapsed().as_secs_f64());
    }
    if let Some(p) = csv {
        std::fs::write(p, rep.to_csv())?;
    }
    ctx.write(&format!("{}\n", rep.to_json()))?;
    if rep.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        let failed: Vec<String> = rep.gates.iter().filter(|g| !g.passed).map(|g| format!("n={} {}", g.n, g.name)).collect();
        report(&Failure { code: 1, kind: "gate_failed", message: failed.join("; ") });
        Ok(ExitCode::from(1))
    }
}

fn dispatch(ctx: &Ctx, cmd: Cmd) -> Res<ExitCode> {
    match cmd {
        Cmd::Classify { w } => ctx.emit(&law_json(&classify(&weights(&w, "uniform")?)?))?,
        Cmd::Sample { w, n, count, strategy } => sample(ctx, &w, n, count, strategy)?,
        Cmd::SampleLimit { w, regime, window, count, n, omega, pruned } => sample_limit(ctx, &w, regime, window, count, n, &omega, pruned)?,
        Cmd::Exact { cmd } => exact(ctx, cmd)?,
        Cmd::Converge { config, csv, timing } => return converge(ctx, &config, csv.as_ref(), timing),
        Cmd::Selftest { max_n } => {
            if max_n > 10 {
                return Err(Failure::guard("selftest enumerates every tree; use --max-n ≤ 10"));
            }
            let rep = selftest(&selftest_families(), max_n)?;
            ctx.emit(
                &json!({"passed": rep.passed(), "checks": rep.checks, "max_n": max_n, "families": rep.families, "failures": rep.failures}),
            )?;
            if !rep.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn report(f: &Failure) {
    eprintln!("{}", json!({"error": {"code": f.code, "kind": f.kind, "message": f.message}}));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand)
            {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            report(&Failure::usage(msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    let ctx = Ctx { global: cli.global, tty: std::io::stdout().is_terminal() };
    match dispatch(&ctx, cli.cmd) {
        Ok(code) => code,
        Err(f) => {
            report(&f);
            ExitCode::from(f.code)
        }
    }
}
