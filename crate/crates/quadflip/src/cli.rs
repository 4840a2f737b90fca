//! The `quadflip` command line.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage or input
//! errors. JSON goes to stdout; `simulate` writes CSV by default.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::canonical_paths::{
    audit_congestion, audit_hierarchy, congestion_bound, constants_consistent, enumerate_gamma, expand_translations,
    FiberMap, Hierarchy,
};
use crate::chains::{default_start, parse_state, simulate, ChainKind, Kernel, Observable, SimConfig, DEFAULT_CEILING};
use crate::error::Error;
use crate::flip_paths::{all_labels, audit_flip_congestion, random_label, verify_label, PathKind, PathReport};
use crate::maps::{decode, Decoded};
use crate::schaeffer::{enumerate_pointed, enumerate_rooted, phi, phi_inverse, SignedTree};
use crate::spectral::{
    law_identity_check, log_log_slope, observable_values, rayleigh, spectral_gap, verify_inequalities, SOLVER_AGREEMENT,
};
use crate::trees::{count_formula, enumerate, ColouredTree};

/// Environment variable overriding the default state-space ceiling.
pub const CEILING_VAR: &str = "QUADFLIP_CEILING";

#[derive(Debug, Parser)]
#[command(name = "quadflip", version, about = "Edge flips on quadrangulations and leaf moves on coloured trees")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest state space to enumerate (default 30000, or $QUADFLIP_CEILING).
    #[arg(long, global = true)]
    pub ceiling: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count (and optionally list) trees, labelled trees or quadrangulations.
    Enumerate(EnumerateArgs),
    /// Convert between a labelled tree with a sign and a pointed quadrangulation.
    Convert(ConvertArgs),
    /// Run a chain and record observables.
    Simulate(SimulateArgs),
    /// Spectral gap of an enumerated chain.
    Gap(GapArgs),
    /// Check flip paths, the deletion hierarchy, fibers or replanting paths.
    VerifyPaths(VerifyArgs),
    /// Exact statistics: gap inequalities, the far-set law, Rayleigh quotients.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Trees,
    Labelled,
    Quad,
    QuadPointed,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, value_enum)]
    pub what: Family,
    #[arg(long)]
    pub n: usize,
    /// Colours, for `trees`.
    #[arg(long, default_value_t = 1)]
    pub r: u8,
    /// Also list every code.
    #[arg(long)]
    pub codes: bool,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Labelled tree code, e.g. `(+)(=)`.
    #[arg(long, conflicts_with = "quad", required_unless_present = "quad")]
    pub tree: Option<String>,
    /// Sign of the pointed quadrangulation, with `--tree`.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sign: i8,
    /// Quadrangulation code (`QM v1 ...`).
    #[arg(long)]
    pub quad: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub chain: ChainKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub r: u8,
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated: radius, height, degree, leaves, far.
    #[arg(long, value_delimiter = ',', default_value = "radius")]
    pub observables: Vec<Observable>,
    /// Record every this many steps.
    #[arg(long, default_value_t = 1)]
    pub every: u64,
    /// Starting state code (default: the simplest state of the chain).
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub chain: ChainKind,
    /// Sizes; several give a log-log slope as well.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub r: u8,
    /// Add the kernel checks and the power-iteration cross-check.
    #[arg(long)]
    pub exact_report: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VerifyWhat {
    Flip,
    Congestion,
    Hierarchy,
    Fibers,
    Gamma,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub what: VerifyWhat,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub r: u8,
    /// Every label, for `flip`.
    #[arg(long, conflicts_with = "samples")]
    pub exhaustive: bool,
    /// Random labels, for `flip`.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// List every path report, not only failures.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StatsWhat {
    Inequalities,
    Law,
    Rayleigh,
    Observables,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_enum)]
    pub what: StatsWhat,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "flip")]
    pub chain: ChainKind,
    #[arg(long, default_value_t = 3)]
    pub r: u8,
    #[arg(long, value_delimiter = ',', default_value = "radius")]
    pub observables: Vec<Observable>,
}

/// A run that could not produce output; exits 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<Output, Failure>;

/// Text for stdout, plus whether a check failed.
pub struct Output {
    pub text: String,
    pub failed: bool,
}

fn json_out(v: &impl Serialize, failed: bool) -> Outcome {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))? + "\n";
    Ok(Output { text, failed })
}

fn ceiling(cli: &Cli) -> std::result::Result<usize, Failure> {
    if let Some(c) = cli.ceiling {
        return Ok(c);
    }
    match std::env::var(CEILING_VAR) {
        Ok(s) => s.parse().map_err(|_| Failure::Usage(format!("{CEILING_VAR}={s:?} is not a number"))),
        Err(_) => Ok(DEFAULT_CEILING),
    }
}

fn rat(q: &BigRational) -> String {
    q.to_string()
}

pub fn cmd_enumerate(a: &EnumerateArgs, ceiling: usize) -> Outcome {
    let formula: num_bigint::BigUint = match a.what {
        Family::Trees => count_formula(a.n, a.r),
        Family::Labelled => count_formula(a.n, 3),
        Family::QuadPointed => count_formula(a.n, 3) * 2u32,
        Family::Quad if a.n == 0 => return Err(Failure::Usage("--n must be at least 1 for quad".into())),
        Family::Quad => count_formula(a.n, 3) * 2u32 / (a.n as u32 + 2),
    };
    let name = a.what.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut out = json!({ "what": name, "n": a.n, "count": formula.to_string() });
    if matches!(a.what, Family::Trees) {
        out["r"] = json!(a.r);
    }
    // rooted maps are counted by forgetting the point and deduplicating codes
    let pointed = usize::try_from(count_formula(a.n, 3) * 2u32).unwrap_or(usize::MAX);
    let mut failed = false;
    if matches!(a.what, Family::Quad) && pointed <= ceiling {
        let found = enumerate_rooted(a.n).len();
        failed |= found.to_string() != formula.to_string();
        out["count"] = json!(found.to_string());
        out["formula"] = json!(formula.to_string());
    }
    if a.codes {
        let small = usize::try_from(&formula).map(|c| c <= ceiling).unwrap_or(false);
        if !small {
            return Err(Error::TooLarge(usize::try_from(&formula).unwrap_or(usize::MAX), ceiling).into());
        }
        let codes: Vec<String> = match a.what {
            Family::Trees => enumerate(a.n, a.r).iter().map(ColouredTree::code).collect(),
            Family::Labelled => enumerate(a.n, 3).iter().map(ColouredTree::code).collect(),
            Family::Quad => enumerate_rooted(a.n).into_iter().map(|(c, _)| c).collect(),
            Family::QuadPointed => enumerate_pointed(a.n).iter().map(|(_, q)| q.code()).collect(),
        };
        failed |= codes.len().to_string() != formula.to_string();
        out["codes"] = json!(codes);
    }
    json_out(&out, failed)
}

pub fn cmd_convert(a: &ConvertArgs) -> Outcome {
    if let Some(code) = &a.tree {
        if a.sign != 1 && a.sign != -1 {
            return Err(Failure::Usage(format!("--sign must be 1 or -1, got {}", a.sign)));
        }
        let t = ColouredTree::parse(code, 3)?;
        if t.n() == 0 {
            return Err(Failure::Usage("--tree needs at least one edge".into()));
        }
        let st = SignedTree::new(t, a.sign);
        let q = phi(&st);
        let back = phi_inverse(&q);
        let failed = back != st;
        return json_out(&json!({ "tree": st.tree.code(), "sign": st.eps, "quad": q.code(), "round_trip": !failed }), failed);
    }
    let code = a.quad.as_deref().unwrap_or_default();
    let q = match decode(code)? {
        Decoded::Pointed(p) => p,
        Decoded::Plain(_) => return Err(Failure::Usage("--quad needs a pointed code (point=...)".into())),
    };
    let st = phi_inverse(&q);
    let failed = phi(&st).code() != q.code();
    json_out(&json!({ "tree": st.tree.code(), "sign": st.eps, "quad": q.code(), "round_trip": !failed }), failed)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Outcome {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let start = match &a.start {
        Some(code) => parse_state(a.chain, a.r, code)?,
        None => default_start(a.chain, a.n, a.r)?,
    };
    // evaluate once up front so an observable that does not fit the chain is a usage error
    for o in &a.observables {
        o.eval(&start)?;
    }
    let cfg = SimConfig {
        kind: a.chain,
        n: a.n,
        r: a.r,
        steps: a.steps,
        seed: a.seed,
        observables: a.observables.clone(),
        every: a.every,
    };
    let mut csv = String::new();
    if a.format == Format::Csv {
        csv.push_str("step");
        for o in &a.observables {
            csv.push(',');
            csv.push_str(o.name());
        }
        csv.push('\n');
    }
    let summary = simulate(&cfg, start, |t, values| {
        if a.format == Format::Csv {
            csv.push_str(&t.to_string());
            for v in values {
                csv.push(',');
                csv.push_str(&v.to_string());
            }
            csv.push('\n');
        }
    })?;
    match a.format {
        Format::Csv => Ok(Output { text: csv, failed: false }),
        Format::Json => json_out(&summary, false),
    }
}

pub fn cmd_gap(a: &GapArgs, ceiling: usize) -> Outcome {
    let mut reports = Vec::new();
    let mut failed = false;
    for &n in &a.n {
        let k = Kernel::build(a.chain, n, a.r, ceiling)?;
        let g = spectral_gap(&k)?;
        let mut v = json!({
            "chain": g.chain,
            "n": g.n,
            "states": g.states,
            "gap": g.gap,
            "lambda2": g.lambda2,
            "solver_residual": g.solver_residual,
        });
        if a.chain.colours(a.r) != 3 || matches!(a.chain, ChainKind::Translate | ChainKind::Replant) {
            v["r"] = json!(g.r);
        }
        if a.exact_report {
            let agree = g.power_gap.is_none_or(|p| (p - g.gap).abs() <= SOLVER_AGREEMENT);
            let stochastic = k.rows_stochastic();
            let symmetric = k.is_symmetric();
            let classes = k.class_count();
            failed |= !(agree && stochastic && symmetric && classes == 1);
            v["power_gap"] = json!(g.power_gap);
            v["solvers_agree"] = json!(agree);
            v["top_vector_deviation"] = json!(g.top_vector_deviation);
            v["denominator"] = json!(k.denom);
            v["stochastic"] = json!(stochastic);
            v["symmetric"] = json!(symmetric);
            v["classes"] = json!(classes);
        }
        reports.push((n, g.gap, v));
    }
    if reports.len() == 1 {
        let (_, _, v) = reports.pop().unwrap();
        return json_out(&v, failed);
    }
    let points: Vec<(f64, f64)> = reports.iter().map(|(n, g, _)| (*n as f64, *g)).collect();
    let out = json!({
        "chain": a.chain.name(),
        "gaps": reports.into_iter().map(|(_, _, v)| v).collect::<Vec<_>>(),
        "log_log_slope": log_log_slope(&points),
    });
    json_out(&out, failed)
}

#[derive(Serialize)]
struct FamilySummary {
    labels: usize,
    failures: usize,
    max_length: usize,
    bound: usize,
}

fn verify_flip(a: &VerifyArgs) -> Outcome {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let labels = match (a.exhaustive, a.samples) {
        (_, Some(k)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..k).map(|_| random_label(a.n, &mut rng)).collect()
        }
        (true, None) => all_labels(a.n),
        (false, None) => return Err(Failure::Usage("verify-paths --what flip needs --exhaustive or --samples".into())),
    };
    let reports: Vec<PathReport> = labels.par_iter().map(verify_label).collect();
    let mut families: BTreeMap<PathKind, FamilySummary> = BTreeMap::new();
    for r in &reports {
        let f = families.entry(r.family).or_insert(FamilySummary { labels: 0, failures: 0, max_length: 0, bound: 0 });
        f.labels += 1;
        f.failures += usize::from(!r.ok);
        f.max_length = f.max_length.max(r.length);
        f.bound = f.bound.max(r.bound);
    }
    let failures: Vec<&PathReport> = reports.iter().filter(|r| !r.ok).collect();
    let mut out = json!({
        "n": a.n,
        "mode": if a.samples.is_some() { "samples" } else { "exhaustive" },
        "labels": reports.len(),
        "families": families,
        "failures": failures,
    });
    if a.samples.is_some() {
        out["seed"] = json!(a.seed);
    }
    if a.verbose {
        out["paths"] = json!(reports);
    }
    json_out(&out, !failures.is_empty())
}

fn verify_congestion(a: &VerifyArgs) -> Outcome {
    let audit = audit_flip_congestion(a.n)?;
    json_out(&audit.summary(a.n), false)
}

fn verify_hierarchy(a: &VerifyArgs) -> Outcome {
    let audit = audit_hierarchy(a.n, a.r, 5)?;
    let constants_ok = a.n < 2 || constants_consistent(a.n);
    let failed = !(audit.rows_ok && audit.columns_ok && audit.support_ok && constants_ok);
    let column = BigRational::new(count_formula(a.n, a.r).into(), count_formula(a.n - 1, a.r).into());
    let mut out = serde_json::to_value(&audit).map_err(|e| Failure::Usage(e.to_string()))?;
    out["row_sum"] = json!(if audit.rows_ok { "1".to_string() } else { "mismatch".to_string() });
    out["column_sum"] = json!(if audit.columns_ok { rat(&column) } else { "mismatch".to_string() });
    out["constants_ok"] = json!(constants_ok);
    json_out(&out, failed)
}

fn verify_fibers(a: &VerifyArgs, ceiling: usize) -> Outcome {
    guard_trees(a.n, a.r, ceiling)?;
    let fib = FiberMap::new(a.n, a.r)?;
    let max = fib.max_fiber();
    let bound = 8 * a.r as usize;
    json_out(&json!({ "n": a.n, "r": a.r, "max_fiber": max, "bound": bound }), max > bound)
}

fn guard_trees(n: usize, r: u8, ceiling: usize) -> std::result::Result<(), Failure> {
    let c = usize::try_from(count_formula(n, r)).unwrap_or(usize::MAX);
    if c > ceiling {
        return Err(Error::TooLarge(c, ceiling).into());
    }
    Ok(())
}

fn verify_gamma(a: &VerifyArgs, ceiling: usize) -> Outcome {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    // every pair times every path: keep this to small families
    let c = usize::try_from(count_formula(a.n, a.r)).unwrap_or(usize::MAX);
    if c * c > ceiling {
        return Err(Error::TooLarge(c * c, ceiling).into());
    }
    let h = Hierarchy::new();
    let fib = FiberMap::new(a.n, a.r)?;
    let pairs: Vec<(usize, usize)> = (0..fib.trees.len()).flat_map(|i| (0..fib.trees.len()).map(move |j| (i, j))).collect();
    let results: Vec<std::result::Result<(BigRational, usize), String>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&fib.trees[i], &fib.trees[j]);
            let paths = enumerate_gamma(x, y, &h, &fib).map_err(|e| e.to_string())?;
            let mut total = BigRational::from_integer(0.into());
            for (p, m) in &paths {
                p.validate(&fib).map_err(|e| format!("{} -> {}: {e}", x.code(), y.code()))?;
                let states = p.states();
                let ex = expand_translations(&states).map_err(|e| format!("{} -> {}: {e}", x.code(), y.code()))?;
                if ex.contract() != states {
                    return Err(format!("{} -> {}: contraction differs", x.code(), y.code()));
                }
                total += m;
            }
            Ok((total, paths.len()))
        })
        .collect();
    let mut errors = Vec::new();
    let mut mass_min: Option<BigRational> = None;
    let mut mass_max: Option<BigRational> = None;
    let mut paths = 0;
    for r in results {
        match r {
            Ok((m, k)) => {
                paths += k;
                mass_min = Some(mass_min.map_or(m.clone(), |x| x.min(m.clone())));
                mass_max = Some(mass_max.map_or(m.clone(), |x| x.max(m)));
            }
            Err(e) => errors.push(e),
        }
    }
    let bound = congestion_bound(a.n, a.r);
    let mut congestion = Vec::new();
    for i in 0..=2 * a.n {
        let c = audit_congestion(a.n, i, &h, &fib)?;
        congestion.push(json!({ "position": i, "max": rat(&c), "ok": c <= bound }));
    }
    let one = BigRational::from_integer(1.into());
    let masses_ok = mass_min.as_ref() == Some(&one) && mass_max.as_ref() == Some(&one);
    let congestion_ok = congestion.iter().all(|c| c["ok"] == json!(true));
    let out = json!({
        "n": a.n,
        "r": a.r,
        "pairs": pairs.len(),
        "paths": paths,
        "mass_sum_min": mass_min.as_ref().map(rat),
        "mass_sum_max": mass_max.as_ref().map(rat),
        "congestion_bound": rat(&bound),
        "congestion": congestion,
        "errors": errors,
    });
    json_out(&out, !(masses_ok && congestion_ok && errors.is_empty()))
}

pub fn cmd_verify(a: &VerifyArgs, ceiling: usize) -> Outcome {
    match a.what {
        VerifyWhat::Flip => verify_flip(a),
        VerifyWhat::Congestion => verify_congestion(a),
        VerifyWhat::Hierarchy => verify_hierarchy(a),
        VerifyWhat::Fibers => verify_fibers(a, ceiling),
        VerifyWhat::Gamma => verify_gamma(a, ceiling),
    }
}

pub fn cmd_stats(a: &StatsArgs, ceiling: usize) -> Outcome {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    match a.what {
        StatsWhat::Inequalities => {
            let rep = verify_inequalities(a.n, ceiling)?;
            let failed = !rep.all_ok();
            json_out(&rep, failed)
        }
        StatsWhat::Law => {
            let rep = law_identity_check(a.n);
            let failed = !rep.equal;
            json_out(&rep, failed)
        }
        StatsWhat::Rayleigh => {
            let k = Kernel::build(a.chain, a.n, a.r, ceiling)?;
            let g = spectral_gap(&k)?;
            let mut rows = Vec::new();
            let mut failed = false;
            for &o in &a.observables {
                let f = observable_values(&k, o)?;
                let q = match rayleigh(&k, &f) {
                    Ok(q) => Some(q),
                    Err(Error::ConstantObservable) => None,
                    Err(e) => return Err(e.into()),
                };
                failed |= q.is_some_and(|q| g.gap > q + crate::spectral::TOLERANCE);
                rows.push(json!({ "observable": o.name(), "rayleigh": q }));
            }
            json_out(&json!({ "chain": a.chain.name(), "n": a.n, "gap": g.gap, "quotients": rows }), failed)
        }
        StatsWhat::Observables => {
            let k = Kernel::build(a.chain, a.n, a.r, ceiling)?;
            let mut rows = Vec::new();
            for &o in &a.observables {
                let f = observable_values(&k, o)?;
                let mut hist: BTreeMap<i64, usize> = BTreeMap::new();
                for v in &f {
                    *hist.entry(v.round() as i64).or_default() += 1;
                }
                let mean = f.iter().sum::<f64>() / f.len() as f64;
                rows.push(json!({ "observable": o.name(), "mean": mean, "histogram": hist }));
            }
            json_out(&json!({ "chain": a.chain.name(), "n": a.n, "states": k.len(), "observables": rows }), false)
        }
    }
}

/// Parses `args` and runs; returns the exit code, writing to the given streams.
pub fn run_with(args: impl IntoIterator<Item = String>, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = ceiling(&cli).and_then(|c| match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, c),
        Command::Convert(a) => cmd_convert(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Gap(a) => cmd_gap(a, c),
        Command::VerifyPaths(a) => cmd_verify(a, c),
        Command::Stats(a) => cmd_stats(a, c),
    });
    match result {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            i32::from(o.failed)
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
