//! Ratio measurements between unconstrained and (relaxed) equal-pay optima:
//! single points, parameter sweeps written as CSV, and randomized checks of
//! the partition guarantees.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::contract::{Instance, ModeSpec};
use crate::error::{FormatError, HarnessError};
use crate::forge::{
    gen_random_pair, Family, GeometricFamilyParams, RandomKind, DEFAULT_COST_MARGIN,
};
use crate::format::InstanceFile;
use crate::solvers::{
    brute_force, ceil_log2, consecutive_groups_solve, delta_partition, log_partition, solve,
    two_agent_bound, two_agent_solve, Method, SolveOptions,
};
use crate::TOL;

pub const CSV_HEADER: &str =
    "instance_id,n,beta,delta,opt,opt_nd,ratio,method_opt,method_nd,degenerate,error";

/// Rounds to 12 significant digits, the precision kept in CSV output.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodPair {
    /// Solves the unconstrained problem.
    pub opt: Method,
    /// Solves the constrained problem.
    pub nd: Method,
}

impl MethodPair {
    pub fn both(method: Method) -> Self {
        Self {
            opt: method,
            nd: method,
        }
    }
}

/// One measured point. Floats are already rounded to CSV precision so a
/// written record reads back identical. Fields other than the id and
/// methods are empty when the point failed before they were known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub instance_id: String,
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub opt: Option<f64>,
    pub opt_nd: Option<f64>,
    /// Empty when `degenerate`.
    pub ratio: Option<f64>,
    pub method_opt: Method,
    pub method_nd: Method,
    /// The constrained optimum is within tolerance of zero.
    pub degenerate: bool,
    pub error: Option<String>,
}

impl RatioRecord {
    fn failed(id: String, methods: MethodPair, n: Option<usize>, err: &dyn fmt::Display) -> Self {
        Self {
            instance_id: id,
            n,
            beta: None,
            delta: None,
            opt: None,
            opt_nd: None,
            ratio: None,
            method_opt: methods.opt,
            method_nd: methods.nd,
            degenerate: false,
            error: Some(err.to_string()),
        }
    }
}

/// OPT under `methods.opt` and the constrained optimum under `methods.nd`
/// with mode `spec`, and their ratio.
///
/// Partition methods choose their own wage ratio; the recorded `beta` is
/// the one the constrained method actually enforced.
pub fn pond_ratio(
    instance_id: &str,
    inst: &Instance,
    spec: ModeSpec,
    methods: MethodPair,
    opts: &SolveOptions,
) -> Result<RatioRecord, HarnessError> {
    if spec == ModeSpec::Unconstrained {
        return Err(HarnessError::Method(
            "the constrained side needs mode nd or beta_nd".into(),
        ));
    }
    let free = solve(inst, ModeSpec::Unconstrained, methods.opt, opts)?;
    let constrained = solve(inst, spec, methods.nd, opts)?;
    let opt = free.best.utility;
    let opt_nd = constrained.best.utility;
    let degenerate = opt_nd <= TOL;
    Ok(RatioRecord {
        instance_id: instance_id.to_string(),
        n: Some(inst.n()),
        beta: Some(round_sig(constrained.spec.wage_ratio())),
        delta: opts.delta.map(round_sig),
        opt: Some(round_sig(opt)),
        opt_nd: Some(round_sig(opt_nd)),
        ratio: (!degenerate).then(|| round_sig(opt / opt_nd)),
        method_opt: methods.opt,
        method_nd: methods.nd,
        degenerate,
        error: None,
    })
}

pub const GRID_AXES: [&str; 4] = ["beta", "delta", "m", "n"];

fn default_method() -> Method {
    Method::BruteForce
}

/// A sweep over one parameter of a family, read from a TOML file:
///
/// ```toml
/// family = "geometric"
/// method_nd = "brute_force"
/// [params]
/// T = 3
/// [grid]
/// m = [2, 3, 4]
/// ```
///
/// The grid value is also passed to the family as a parameter. The wage
/// ratio of each point comes from a `beta` or `delta` (β = n^δ) axis or
/// parameter, else from the family's own design ratio, else 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub family: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_method")]
    pub method_opt: Method,
    #[serde(default = "default_method")]
    pub method_nd: Method,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub grid: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self, FormatError> {
        let spec: Self = toml::from_str(text)?;
        spec.axis()?;
        Ok(spec)
    }

    /// The single grid axis and its values.
    pub fn axis(&self) -> Result<(&str, &[f64]), FormatError> {
        let mut entries = self.grid.iter();
        let (Some((key, values)), None) = (entries.next(), entries.next()) else {
            return Err(FormatError::Invalid(format!(
                "grid must have exactly one axis among {}",
                GRID_AXES.join(", ")
            )));
        };
        if !GRID_AXES.contains(&key.as_str()) {
            return Err(FormatError::Invalid(format!(
                "unknown grid axis '{key}', expected one of {}",
                GRID_AXES.join(", ")
            )));
        }
        if values.is_empty() {
            return Err(FormatError::Invalid(format!("grid axis '{key}' is empty")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(FormatError::Invalid(format!(
                "grid value {v} is not finite"
            )));
        }
        Ok((key.as_str(), values.as_slice()))
    }

    pub fn methods(&self) -> MethodPair {
        MethodPair {
            opt: self.method_opt,
            nd: self.method_nd,
        }
    }

    fn point(&self, axis: &str, value: f64, inner_workers: usize) -> RatioRecord {
        let mut id = format!("{}-{axis}={value}", self.family);
        if let Some(seed) = self.seed {
            id.push_str(&format!("-seed={seed}"));
        }
        let methods = self.methods();
        let mut params = self.params.clone();
        params.insert(axis.to_string(), value);
        let family = match Family::from_params(&self.family, &params, self.seed) {
            Ok(f) => f,
            Err(e) => return RatioRecord::failed(id, methods, None, &e),
        };
        let inst = match family.build() {
            Ok(i) => i,
            Err(e) => return RatioRecord::failed(id, methods, None, &e),
        };
        let n = inst.n() as f64;
        let delta = params.get("delta").copied();
        let beta = match (params.get("beta"), delta) {
            (Some(&b), _) if axis != "delta" => b,
            (_, Some(d)) => (d * n.ln()).exp(),
            (Some(&b), None) => b,
            (None, None) => family.natural_beta().unwrap_or(1.0),
        };
        let spec = if beta == 1.0 {
            Ok(ModeSpec::Nd)
        } else {
            ModeSpec::beta_nd(beta)
        };
        let opts = SolveOptions {
            workers: inner_workers,
            base: None,
            delta,
            group_sizes: family.group_sizes(),
        };
        spec.map_err(HarnessError::from)
            .and_then(|spec| pond_ratio(&id, &inst, spec, methods, &opts))
            .unwrap_or_else(|e| RatioRecord::failed(id, methods, Some(inst.n()), &e))
    }
}

/// One record per grid value, in grid order. Points run on up to `workers`
/// threads; a point that fails is recorded with its error and the sweep
/// carries on.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<RatioRecord>, HarnessError> {
    let (axis, values) = spec
        .axis()
        .map_err(|e| HarnessError::Method(e.to_string()))?;
    let workers = workers.clamp(1, values.len());
    if workers == 1 {
        return Ok(values.iter().map(|&v| spec.point(axis, v, 1)).collect());
    }
    let chunk = values.len().div_ceil(workers);
    Ok(thread::scope(|scope| {
        let handles: Vec<_> = values
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&v| spec.point(axis, v, 1))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    }))
}

pub fn write_csv<W: Write>(records: &[RatioRecord], out: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RatioRecord>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(FormatError::Invalid(format!(
            "unexpected CSV header '{}'",
            header.join(",")
        )));
    }
    let records: Vec<RatioRecord> = r.deserialize().collect::<Result<_, _>>()?;
    for rec in &records {
        let floats = [rec.beta, rec.delta, rec.opt, rec.opt_nd, rec.ratio];
        if floats.iter().flatten().any(|x| !x.is_finite()) {
            return Err(FormatError::Invalid(format!(
                "record '{}' has a non-finite value",
                rec.instance_id
            )));
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub points: usize,
    pub failures: usize,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
}

pub fn summarize(records: &[RatioRecord]) -> SweepSummary {
    let ratios: Vec<f64> = records.iter().filter_map(|r| r.ratio).collect();
    SweepSummary {
        points: records.len(),
        failures: records.iter().filter(|r| r.error.is_some()).count(),
        min_ratio: ratios.iter().copied().reduce(f64::min),
        max_ratio: ratios.iter().copied().reduce(f64::max),
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: Option<f64>| x.map_or("-".to_string(), |v| v.to_string());
        write!(
            f,
            "points={} failures={} min_ratio={} max_ratio={}",
            self.points,
            self.failures,
            show(self.min_ratio),
            show(self.max_ratio)
        )
    }
}

/// Randomized and structured checks of the ratio guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Best doubling-partition group under equal pay recovers
    /// `g(base)/⌈log2 n⌉`.
    LogPartition,
    /// Best threshold-partition group under wage ratio `n^δ` recovers
    /// `(g(base) − n^{−δ})/(⌈1/δ⌉ + 1)`, for δ ∈ {0.5, 1}.
    DeltaPartition,
    /// Geometric family with wage ratio `n^1.5`: the loss against the
    /// unconstrained optimum stays within `(n−1)·α_max/β`, and the ratio is
    /// at most 1.05 once `n ≥ 255`.
    LargeWageRatio,
    /// Random two-agent instances never exceed `1 + 1/√(β+1)` for
    /// β ∈ {1, 2, 4}.
    TwoAgent,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::LogPartition,
        Suite::DeltaPartition,
        Suite::LargeWageRatio,
        Suite::TwoAgent,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::LogPartition => "lemma2",
            Suite::DeltaPartition => "lemma6",
            Suite::LargeWageRatio => "remark1",
            Suite::TwoAgent => "theorem3",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(Suite::name).collect();
                format!("unknown suite '{s}', expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundFailure {
    pub trial: usize,
    pub detail: String,
    /// The offending instance as an instance file.
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub suite: Suite,
    /// Individual inequality checks performed.
    pub checks: usize,
    pub failures: Vec<BoundFailure>,
    /// Smallest observed `achieved − required` over all checks.
    pub worst_slack: f64,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn new(suite: Suite) -> Self {
        Self {
            suite,
            checks: 0,
            failures: Vec::new(),
            worst_slack: f64::INFINITY,
        }
    }

    fn record(
        &mut self,
        trial: usize,
        slack: f64,
        witness: impl FnOnce() -> String,
        detail: String,
    ) {
        self.checks += 1;
        self.worst_slack = self.worst_slack.min(slack);
        if slack < -TOL {
            self.failures.push(BoundFailure {
                trial,
                detail,
                witness: witness(),
            });
        }
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(trial as u64)
}

/// Seeded random instances cycling through the additive, coverage and
/// capped-additive kinds with `4 ≤ n ≤ 12`.
pub fn instance_pool(trials: usize, seed: u64) -> Vec<Family> {
    (0..trials)
        .map(|t| Family::Random {
            kind: RandomKind::ALL[t % RandomKind::ALL.len()],
            n: 4 + (t / RandomKind::ALL.len()) % 9,
            seed: trial_seed(seed, t),
            cost_margin: DEFAULT_COST_MARGIN,
        })
        .collect()
}

/// Seeded random two-agent instances: the three random kinds plus general
/// explicit tables, in rotation.
pub fn pair_pool(trials: usize, seed: u64) -> Result<Vec<Instance>, HarnessError> {
    (0..trials)
        .map(|t| {
            let s = trial_seed(seed, t);
            Ok(match t % 4 {
                3 => gen_random_pair(s, DEFAULT_COST_MARGIN)?,
                k => crate::forge::gen_random(RandomKind::ALL[k], 2, s, DEFAULT_COST_MARGIN)?,
            })
        })
        .collect()
}

fn witness_of(family: &Family, inst: &Instance) -> String {
    InstanceFile::from_family(family, inst).to_json()
}

/// Runs one suite. `trials` and `seed` drive the random pools; the
/// geometric suite is deterministic and always covers `m = 2..=8`.
pub fn verify_bounds(suite: Suite, trials: usize, seed: u64) -> Result<BoundReport, HarnessError> {
    let mut report = BoundReport::new(suite);
    match suite {
        Suite::LogPartition | Suite::DeltaPartition => {
            for (t, family) in instance_pool(trials, seed).iter().enumerate() {
                let inst = family.build()?;
                let base = brute_force(&inst, ModeSpec::Unconstrained)?.best;
                if base.set.is_empty() {
                    report.record(t, 0.0, String::new, String::new());
                    continue;
                }
                let n = inst.n() as f64;
                if suite == Suite::LogPartition {
                    let part = log_partition(&inst, &base.set)?;
                    let required = base.utility / f64::from(ceil_log2(inst.n()));
                    let got = part.best().utility;
                    report.record(
                        t,
                        got - required,
                        || witness_of(family, &inst),
                        format!("best group {got} < g(base)/ceil(log2 n) = {required}"),
                    );
                } else {
                    for delta in [0.5, 1.0] {
                        let part = delta_partition(&inst, &base.set, delta)?;
                        let groups = f64::from(part.guarantee_denominator);
                        let required = (base.utility - (-delta * n.ln()).exp()) / groups;
                        let got = part.best().utility;
                        report.record(
                            t,
                            got - required,
                            || witness_of(family, &inst),
                            format!("delta {delta}: best group {got} < {required}"),
                        );
                    }
                }
            }
        }
        Suite::LargeWageRatio => {
            for m in 2..=8u32 {
                let family = Family::Geometric(GeometricFamilyParams::new(m, 3.0));
                let inst = family.build()?;
                let sizes = family.group_sizes().expect("geometric layout");
                let n = inst.n() as f64;
                let beta = (1.5 * n.ln()).exp();
                let free = consecutive_groups_solve(&inst, &sizes, ModeSpec::Unconstrained)?.best;
                let relaxed =
                    consecutive_groups_solve(&inst, &sizes, ModeSpec::beta_nd(beta)?)?.best;
                let top = free.payments.payments().iter().copied().fold(0.0, f64::max);
                let allowed = (n - 1.0) * top / beta;
                let gap = free.utility - relaxed.utility;
                let t = m as usize;
                report.record(
                    t,
                    allowed - gap,
                    || witness_of(&family, &inst),
                    format!("m {m}: loss {gap} exceeds (n-1)·α_max/β = {allowed}"),
                );
                if inst.n() >= 255 {
                    let ratio = free.utility / relaxed.utility;
                    report.record(
                        t,
                        1.05 - ratio,
                        || witness_of(&family, &inst),
                        format!("m {m}: ratio {ratio} > 1.05"),
                    );
                }
            }
        }
        Suite::TwoAgent => {
            for (t, inst) in pair_pool(trials, seed)?.iter().enumerate() {
                for beta in [1.0, 2.0, 4.0] {
                    let r = two_agent_solve(inst, beta)?;
                    let opt = r.opt_reference.expect("two-agent solver reports OPT");
                    if r.best.utility <= TOL {
                        continue;
                    }
                    let ratio = opt / r.best.utility;
                    let bound = two_agent_bound(beta)?;
                    report.record(
                        t,
                        bound - ratio,
                        || InstanceFile::from_instance(inst).to_json(),
                        format!("beta {beta}: ratio {ratio} > bound {bound}"),
                    );
                }
            }
        }
    }
    Ok(report)
}
