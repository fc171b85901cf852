//! `fairpay`: generate instances, solve them, check results and run sweeps.
//!
//! Exit codes: 0 success, 1 a check or sweep point failed, 2 usage or
//! parameter error, 3 only the empty set is feasible.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fairpay_core::forge::{Family, FAMILY_NAMES};
use fairpay_core::format::{InstanceFile, ResultFile};
use fairpay_core::harness::{self, Suite, SweepSpec};
use fairpay_core::reward::{Sampling, StructureCheck};
use fairpay_core::solvers::{ceil_log2, ceil_recip, two_agent_bound};
use fairpay_core::{
    deviating_agents, solve, AgentSet, Contract, Instance, Method, ModeSpec, SolveOptions,
};

const EXIT_FAILED: u8 = 1;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fairpay",
    version,
    about = "Linear team contracts with equal-pay constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Find the best incentive set and contract for an instance.
    Solve(SolveArgs),
    /// Check reward structure, a solved contract's equilibrium, or a bound suite.
    Check(CheckArgs),
    /// Run a parameter sweep and write CSV.
    Sweep(SweepArgs),
    /// Print the two-agent ratio bound and partition guarantee denominators.
    Bound(BoundArgs),
}

#[derive(Args)]
struct GenArgs {
    /// One of geometric, lemma8, lemma9, tight2, random-additive,
    /// random-coverage, random-capped.
    family: String,
    /// Number of groups (geometric).
    #[arg(long)]
    m: Option<u32>,
    /// Payment divisor (geometric).
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Cost scale of the special agent (lemma8).
    #[arg(long = "M")]
    big_m: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Required for random families.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cost_margin: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Unconstrained,
    Nd,
    #[value(alias = "beta_nd")]
    BetaNd,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Defaults to beta-nd when --beta or --delta is given, else unconstrained.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, conflicts_with = "delta")]
    beta: Option<f64>,
    /// Wage ratio n^delta.
    #[arg(long)]
    delta: Option<f64>,
    /// brute, symmetric, two-agent, partition, log-partition,
    /// delta-partition or consecutive-groups.
    #[arg(long, default_value = "brute")]
    method: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "FAIRPAY_WORKERS", default_value_t = 1)]
    workers: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Structure,
    Equilibrium,
    Bounds,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    what: What,
    /// Instance file (structure, equilibrium).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Result file supplying the contract and set (equilibrium).
    #[arg(long)]
    result: Option<PathBuf>,
    /// Sample this many random pairs instead of enumerating (structure).
    #[arg(long)]
    samples: Option<u64>,
    /// Seed for sampling, or for the bound suite's instance pool.
    #[arg(long)]
    seed: Option<u64>,
    /// lemma2, lemma6, remark1 or theorem3 (bounds).
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep description.
    #[arg(long)]
    config: PathBuf,
    /// CSV path; overrides the config's `output`, stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "FAIRPAY_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<(InstanceFile, Instance)> {
    let file = InstanceFile::from_json(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    let inst = file.to_instance()?;
    Ok((file, inst))
}

fn cmd_gen(args: GenArgs) -> Result<u8> {
    let mut params = BTreeMap::new();
    let numeric = [
        ("m", args.m.map(f64::from)),
        ("T", args.t),
        ("n", args.n.map(|n| n as f64)),
        ("M", args.big_m),
        ("epsilon", args.epsilon),
        ("delta", args.delta),
        ("beta", args.beta),
        ("cost_margin", args.cost_margin),
    ];
    for (key, value) in numeric {
        if let Some(v) = value {
            params.insert(key.to_string(), v);
        }
    }
    if !FAMILY_NAMES.contains(&args.family.as_str()) {
        bail!(
            "unknown family '{}', expected one of {}",
            args.family,
            FAMILY_NAMES.join(", ")
        );
    }
    let family = Family::from_params(&args.family, &params, args.seed)?;
    let inst = family.build()?;
    let file = InstanceFile::from_family(&family, &inst);
    write_or_print(args.out.as_deref(), &file.to_json())?;
    let shown: Vec<String> = family
        .params()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .chain(family.seed().map(|s| format!("seed={s}")))
        .collect();
    eprintln!(
        "n={} family={} {}",
        inst.n(),
        family.name(),
        shown.join(" ")
    );
    Ok(0)
}

fn resolve_mode(args: &SolveArgs, n: usize) -> Result<ModeSpec> {
    let beta = match (args.beta, args.delta) {
        (Some(b), _) => Some(b),
        (None, Some(d)) => {
            if !(d > 0.0 && d.is_finite()) {
                bail!("--delta must be positive, got {d}");
            }
            Some((d * (n as f64).ln()).exp())
        }
        (None, None) => None,
    };
    let mode = args.mode.unwrap_or(if beta.is_some() {
        Mode::BetaNd
    } else {
        Mode::Unconstrained
    });
    Ok(match (mode, beta) {
        (Mode::BetaNd, Some(b)) => ModeSpec::beta_nd(b)?,
        (Mode::BetaNd, None) => bail!("--mode beta-nd needs --beta or --delta"),
        (_, Some(_)) => bail!("--beta/--delta only apply to --mode beta-nd"),
        (Mode::Nd, None) => ModeSpec::Nd,
        (Mode::Unconstrained, None) => ModeSpec::Unconstrained,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    let (file, inst) = load_instance(&args.input)?;
    let spec = resolve_mode(&args, inst.n())?;
    let method = match args.method.as_str() {
        "partition" => match spec {
            ModeSpec::Nd => Method::LogPartition,
            ModeSpec::BetaNd { .. } => Method::DeltaPartition,
            ModeSpec::Unconstrained => bail!("--method partition needs --mode nd or beta-nd"),
        },
        other => other.parse().map_err(|e: String| anyhow!(e))?,
    };
    let opts = SolveOptions {
        workers: args.workers,
        base: None,
        delta: args.delta,
        group_sizes: file.family().and_then(|f| f.group_sizes()),
    };
    let started = Instant::now();
    let report = solve(&inst, spec, method, &opts)?;
    let timing_ms = started.elapsed().as_secs_f64() * 1e3;

    let deviators = deviating_agents(&inst, &report.best.payments, &report.best.set)?;
    if !deviators.is_empty() {
        log::warn!("agents {deviators:?} sit on the equilibrium boundary");
    }
    let result = ResultFile::from_report(&report, timing_ms);
    write_or_print(args.out.as_deref(), &result.to_json())?;
    eprintln!(
        "{} via {}: utility {} with {} agents",
        report.spec,
        report.method,
        report.best.utility,
        report.best.set.len()
    );
    Ok(if report.best.set.is_empty() {
        EXIT_DEGENERATE
    } else {
        0
    })
}

fn cmd_check(args: CheckArgs) -> Result<u8> {
    if args.what == What::Bounds {
        let suite: Suite = args
            .suite
            .as_deref()
            .ok_or_else(|| anyhow!("--what bounds needs --suite"))?
            .parse()
            .map_err(|e: String| anyhow!(e))?;
        let report = harness::verify_bounds(suite, args.trials, args.seed.unwrap_or(0))?;
        for failure in &report.failures {
            println!("FAIL trial {}: {}", failure.trial, failure.detail);
            println!("{}", failure.witness);
        }
        println!(
            "{} {}: {} checks, {} failures, worst slack {}",
            if report.passed() { "PASS" } else { "FAIL" },
            suite.name(),
            report.checks,
            report.failures.len(),
            report.worst_slack
        );
        return Ok(if report.passed() { 0 } else { EXIT_FAILED });
    }

    let path = args
        .input
        .as_deref()
        .ok_or_else(|| anyhow!("--in is required"))?;
    let file = InstanceFile::from_json(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    match args.what {
        What::Structure => {
            let reward = file.reward.clone().build()?;
            let opts = StructureCheck {
                sampling: args.samples.map(|samples| Sampling {
                    samples,
                    seed: args.seed.unwrap_or(0),
                }),
                ..StructureCheck::default()
            };
            let report = reward.check_structure(&opts)?;
            let how = if report.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            };
            if let Some(v) = &report.monotone_violation {
                println!("monotone: FAIL f({:?}) > f({:?})", v.s, v.t);
            } else {
                println!("monotone: PASS");
            }
            if let Some(v) = &report.submodular_violation {
                println!(
                    "submodular: FAIL agent {} gains more at {:?} than at {:?}",
                    v.agent, v.t, v.s
                );
            } else {
                println!("submodular: PASS");
            }
            println!("{} checks ({how})", report.checked);
            Ok(if report.passed() { 0 } else { EXIT_FAILED })
        }
        What::Equilibrium => {
            let inst = file.to_instance()?;
            let result_path = args
                .result
                .as_deref()
                .ok_or_else(|| anyhow!("--what equilibrium needs --result"))?;
            let result = ResultFile::from_json(&read(result_path)?)
                .with_context(|| format!("parsing {}", result_path.display()))?;
            if result.payments.len() != inst.n() || result.set.iter().any(|&i| i >= inst.n()) {
                bail!("result does not match the instance's {} agents", inst.n());
            }
            let contract = Contract::new(result.payments.clone())?;
            let set = AgentSet::from_agents(result.set.iter().copied());
            let deviators = deviating_agents(&inst, &contract, &set)?;
            if deviators.is_empty() {
                println!("equilibrium: PASS");
                Ok(0)
            } else {
                println!("equilibrium: FAIL agents {deviators:?} prefer to switch");
                Ok(EXIT_FAILED)
            }
        }
        What::Bounds => unreachable!("handled above"),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<u8> {
    let spec = SweepSpec::from_toml(&read(&args.config)?)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    let workers = args.workers.or(spec.workers).unwrap_or(1);
    let records = harness::run_sweep(&spec, workers)?;
    let mut csv = Vec::new();
    harness::write_csv(&records, &mut csv)?;
    let csv = String::from_utf8(csv).expect("csv output is utf-8");
    let out = args.out.or_else(|| spec.output.clone());
    match &out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    let summary = harness::summarize(&records);
    eprintln!("{summary}");
    Ok(if summary.failures > 0 { EXIT_FAILED } else { 0 })
}

fn cmd_bound(args: BoundArgs) -> Result<u8> {
    if args.beta.is_none() && args.n.is_none() {
        bail!("give --beta and/or --n");
    }
    if let Some(beta) = args.beta {
        println!("two_agent_bound beta={beta}: {}", two_agent_bound(beta)?);
    }
    if let Some(n) = args.n {
        if n == 0 {
            bail!("--n must be at least 1");
        }
        println!(
            "equal_pay n={n}: ceil(log2 n) = {}, partition groups = {}",
            ceil_log2(n),
            ceil_log2(n + 1)
        );
        if let Some(delta) = args.delta {
            if !(delta > 0.0 && delta <= 1.0) {
                bail!("--delta must lie in (0, 1], got {delta}");
            }
            let beta = (delta * (n as f64).ln()).exp();
            println!(
                "wage_ratio n={n} delta={delta}: beta = {beta}, denominator = {}",
                ceil_recip(delta) + 1
            );
        }
    } else if args.delta.is_some() {
        bail!("--delta needs --n");
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Check(a) => cmd_check(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bound(a) => cmd_bound(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
