//! Exact and approximate maximization of principal utility over incentive
//! sets.

mod brute;
mod partition;
mod structured;

pub use brute::{brute_force, BruteForce, BRUTE_FORCE_LIMIT};
pub use partition::{ceil_log2, ceil_recip, delta_partition, log_partition, PartitionResult};
pub use structured::{consecutive_groups_solve, symmetric_solve, two_agent_bound, two_agent_solve};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agents::AgentSet;
use crate::contract::{optimal_contract_for_set, IncentiveOutcome, Instance, ModeSpec};
use crate::error::SolveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "&'static str")]
pub enum Method {
    BruteForce,
    LogPartition,
    DeltaPartition,
    Symmetric,
    TwoAgent,
    /// Intervals of agents starting at a group boundary, for instances laid
    /// out as groups of interchangeable agents.
    ConsecutiveGroups,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::BruteForce => "brute_force",
            Method::LogPartition => "log_partition",
            Method::DeltaPartition => "delta_partition",
            Method::Symmetric => "symmetric",
            Method::TwoAgent => "two_agent",
            Method::ConsecutiveGroups => "consecutive_groups",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.replace('-', "_").as_str() {
            "brute_force" | "brute" => Method::BruteForce,
            "log_partition" => Method::LogPartition,
            "delta_partition" => Method::DeltaPartition,
            "symmetric" => Method::Symmetric,
            "two_agent" => Method::TwoAgent,
            "consecutive_groups" | "structured" => Method::ConsecutiveGroups,
            other => return Err(format!("unknown method '{other}'")),
        })
    }
}

impl TryFrom<String> for Method {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Method> for &'static str {
    fn from(m: Method) -> Self {
        m.name()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub spec: ModeSpec,
    /// Feasible, or the empty set with utility 0.
    pub best: IncentiveOutcome,
    pub method: Method,
    pub candidates_examined: u64,
    /// Unconstrained optimum, when the method computes it alongside.
    pub opt_reference: Option<f64>,
}

/// Keeps whichever of `best` and `candidate` wins the deterministic order.
pub(crate) fn keep_better(best: &mut IncentiveOutcome, candidate: IncentiveOutcome) {
    if candidate.beats(best) {
        *best = candidate;
    }
}

/// Extra inputs some methods need. Defaults: one worker, partition base
/// from brute force (greedy search above the brute-force limit), δ derived
/// from the mode's wage ratio.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveOptions {
    pub workers: usize,
    pub base: Option<AgentSet>,
    pub delta: Option<f64>,
    pub group_sizes: Option<Vec<usize>>,
}

/// Unconstrained local search: keep adding the agent that raises `g` the
/// most until none does. A stand-in for the exact optimizer when `2^n` is
/// out of reach.
pub fn greedy_base(inst: &Instance) -> Result<AgentSet, SolveError> {
    let mut set = AgentSet::empty();
    let mut current = 0.0;
    loop {
        let mut step: Option<(usize, f64)> = None;
        for i in (0..inst.n()).filter(|&i| !set.contains(i)) {
            let out = optimal_contract_for_set(inst, &set.with(i), ModeSpec::Unconstrained)?;
            if out.feasible() && out.utility > step.map_or(current, |(_, u)| u) {
                step = Some((i, out.utility));
            }
        }
        match step {
            Some((i, u)) => {
                set.insert(i);
                current = u;
            }
            None => return Ok(set),
        }
    }
}

/// Runs `method` on `inst` under `spec`.
///
/// Partition methods fix their own mode (equal pay, or wage ratio `n^δ`),
/// which is reported back in [`SolveReport::spec`]; their `opt_reference`
/// is `g(base)`.
pub fn solve(
    inst: &Instance,
    spec: ModeSpec,
    method: Method,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    let brute = BruteForce::with_workers(opts.workers);
    match method {
        Method::BruteForce => brute.solve(inst, spec),
        Method::Symmetric => symmetric_solve(inst, spec),
        Method::ConsecutiveGroups => {
            let sizes = opts.group_sizes.as_deref().ok_or_else(|| {
                SolveError::Unsupported(
                    "consecutive_groups needs a group layout (geometric instances carry one)"
                        .into(),
                )
            })?;
            consecutive_groups_solve(inst, sizes, spec)
        }
        Method::TwoAgent => match spec {
            ModeSpec::Unconstrained => {
                if inst.n() != 2 {
                    return Err(SolveError::WrongSize {
                        expected: 2,
                        got: inst.n(),
                    });
                }
                Ok(SolveReport {
                    method: Method::TwoAgent,
                    ..brute.solve(inst, spec)?
                })
            }
            other => two_agent_solve(inst, other.wage_ratio()),
        },
        Method::LogPartition | Method::DeltaPartition => {
            let base = match &opts.base {
                Some(b) => b.clone(),
                None if inst.n() <= brute.limit => {
                    brute.solve(inst, ModeSpec::Unconstrained)?.best.set
                }
                None => {
                    log::info!("{} agents: partition base from greedy search", inst.n());
                    greedy_base(inst)?
                }
            };
            let result = if method == Method::LogPartition {
                if spec != ModeSpec::Nd {
                    return Err(SolveError::Unsupported(format!(
                        "log_partition solves the nd mode, not {spec}"
                    )));
                }
                log_partition(inst, &base)?
            } else {
                let delta = match (opts.delta, spec) {
                    (Some(d), _) => d,
                    (None, ModeSpec::BetaNd { beta }) if inst.n() > 1 => {
                        beta.ln() / (inst.n() as f64).ln()
                    }
                    _ => {
                        return Err(SolveError::Unsupported(
                            "delta_partition needs --delta or a beta-nd mode on n > 1 agents"
                                .into(),
                        ))
                    }
                };
                delta_partition(inst, &base, delta)?
            };
            Ok(SolveReport {
                spec: result.mode,
                best: result.best(),
                method,
                candidates_examined: result.groups.len() as u64,
                opt_reference: Some(result.base_utility),
            })
        }
    }
}
