//! Linear contracts: payments, principal utility, and equilibrium checks.
//!
//! For an incentive set `S` the cheapest contract pays each member its
//! indifference payment `c_i / f(i | S \ {i})`. The non-discriminatory
//! variant pays every member the largest of these (`α_S`), and the β-relaxed
//! variant pays `max{c_i / f(i | S \ {i}), α_S / β}`. Utility is
//! `(1 − Σ α_i) · f(S)` in every mode.

use std::fmt;

use crate::agents::AgentSet;
use crate::error::ContractError;
use crate::reward::{RewardFunction, Sampling, StructureCheck};
use crate::TOL;

/// Samples drawn when an explicit table is too large for an exhaustive
/// structure check at construction time.
const CONSTRUCTION_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    costs: Vec<f64>,
    reward: RewardFunction,
}

impl Instance {
    pub fn new(costs: Vec<f64>, reward: RewardFunction) -> Result<Self, ContractError> {
        if costs.len() != reward.n() {
            return Err(ContractError::CostCount {
                expected: reward.n(),
                got: costs.len(),
            });
        }
        if let Some((agent, &cost)) = costs
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.is_finite() && **c > 0.0))
        {
            return Err(ContractError::NonPositiveCost { agent, cost });
        }
        if !reward.structured_by_construction() {
            let opts = StructureCheck {
                sampling: Some(Sampling {
                    samples: CONSTRUCTION_SAMPLES,
                    seed: 0,
                }),
                ..StructureCheck::default()
            };
            let report = reward.check_structure(&opts)?;
            if let Some(v) = &report.monotone_violation {
                return Err(ContractError::NotStructured(format!(
                    "not monotone: f({:?}) < f({:?})",
                    v.t, v.s
                )));
            }
            if let Some(v) = &report.submodular_violation {
                return Err(ContractError::NotStructured(format!(
                    "not submodular: f({} | {:?}) > f({} | {:?})",
                    v.agent, v.t, v.agent, v.s
                )));
            }
        }
        Ok(Self { costs, reward })
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn reward(&self) -> &RewardFunction {
        &self.reward
    }
}

/// A linear contract: agent `i` receives share `α_i ∈ [0, 1]` of the reward
/// on success.
#[derive(Debug, Clone, PartialEq)]
pub struct Contract {
    payments: Vec<f64>,
}

impl Contract {
    pub fn new(payments: Vec<f64>) -> Result<Self, ContractError> {
        if let Some((agent, &value)) = payments
            .iter()
            .enumerate()
            .find(|(_, a)| !(0.0..=1.0).contains(*a))
        {
            return Err(ContractError::PaymentOutOfRange { agent, value });
        }
        Ok(Self { payments })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            payments: vec![0.0; n],
        }
    }

    pub fn payments(&self) -> &[f64] {
        &self.payments
    }

    pub fn total(&self) -> f64 {
        self.payments.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeSpec {
    Unconstrained,
    /// Identical payments for every agent exerting effort.
    Nd,
    /// Payments among agents exerting effort within a factor `beta`.
    BetaNd {
        beta: f64,
    },
}

impl ModeSpec {
    pub fn beta_nd(beta: f64) -> Result<Self, ContractError> {
        if beta.is_finite() && beta >= 1.0 {
            Ok(ModeSpec::BetaNd { beta })
        } else {
            Err(ContractError::InvalidBeta(beta))
        }
    }

    /// The wage ratio enforced by this mode; infinite when unconstrained.
    pub fn wage_ratio(&self) -> f64 {
        match self {
            ModeSpec::Unconstrained => f64::INFINITY,
            ModeSpec::Nd => 1.0,
            ModeSpec::BetaNd { beta } => *beta,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModeSpec::Unconstrained => "unconstrained",
            ModeSpec::Nd => "nd",
            ModeSpec::BetaNd { .. } => "beta_nd",
        }
    }
}

impl fmt::Display for ModeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeSpec::BetaNd { beta } => write!(f, "beta_nd(beta={beta})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasibility {
    /// Some member adds nothing to `f` given the others, so no payment
    /// makes it work.
    ZeroMarginal,
    /// Some member would need a share above 1.
    PaymentAboveOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncentiveOutcome {
    pub set: AgentSet,
    pub payments: Contract,
    /// Principal utility; `-inf` when infeasible.
    pub utility: f64,
    pub infeasibility: Option<Infeasibility>,
}

impl IncentiveOutcome {
    pub fn empty(n: usize) -> Self {
        Self {
            set: AgentSet::empty(),
            payments: Contract::zero(n),
            utility: 0.0,
            infeasibility: None,
        }
    }

    fn infeasible(n: usize, set: AgentSet, why: Infeasibility) -> Self {
        Self {
            set,
            payments: Contract::zero(n),
            utility: f64::NEG_INFINITY,
            infeasibility: Some(why),
        }
    }

    pub fn feasible(&self) -> bool {
        self.infeasibility.is_none()
    }

    /// True when `self` should be preferred over `other`: higher utility,
    /// then fewer agents, then the smaller bitmask. Infeasible outcomes
    /// never win.
    pub fn beats(&self, other: &IncentiveOutcome) -> bool {
        match (self.feasible(), other.feasible()) {
            (false, _) => false,
            (true, false) => true,
            (true, true) => {
                self.utility > other.utility
                    || (self.utility == other.utility && self.set.tie_break(&other.set).is_lt())
            }
        }
    }
}

/// `c_i / f(i | S \ {i})`, or `None` when the marginal is not positive.
pub fn indifference_payment(
    inst: &Instance,
    agent: usize,
    set: &AgentSet,
) -> Result<Option<f64>, ContractError> {
    let marginal = inst.reward.marginal(agent, set)?;
    if !set.contains(agent) {
        return Err(ContractError::AgentNotInSet { agent });
    }
    Ok(ratio(inst.costs[agent], marginal))
}

fn ratio(cost: f64, marginal: f64) -> Option<f64> {
    (marginal > TOL).then(|| cost / marginal)
}

/// `α_S = max_{j ∈ S} c_j / f(j | S \ {j})`, or `None` if any member has a
/// non-positive marginal.
pub fn group_payment_nd(inst: &Instance, set: &AgentSet) -> Result<Option<f64>, ContractError> {
    if set.is_empty() {
        return Err(ContractError::EmptySet);
    }
    let (_, marginals) = inst.reward.leave_one_out(set)?;
    Ok(marginals
        .into_iter()
        .map(|(i, m)| ratio(inst.costs[i], m))
        .try_fold(0.0f64, |acc, p| p.map(|p| acc.max(p))))
}

/// The cheapest contract under `spec` that makes exactly `set` exert effort,
/// and the principal's utility under it.
pub fn optimal_contract_for_set(
    inst: &Instance,
    set: &AgentSet,
    spec: ModeSpec,
) -> Result<IncentiveOutcome, ContractError> {
    let n = inst.n();
    if set.is_empty() {
        // still reject out-of-range agents
        inst.reward.eval(set)?;
        return Ok(IncentiveOutcome::empty(n));
    }
    let (value, marginals) = inst.reward.leave_one_out(set)?;
    let mut own = Vec::with_capacity(marginals.len());
    for (i, m) in marginals {
        match ratio(inst.costs[i], m) {
            Some(p) => own.push((i, p)),
            None => {
                return Ok(IncentiveOutcome::infeasible(
                    n,
                    set.clone(),
                    Infeasibility::ZeroMarginal,
                ))
            }
        }
    }
    let top = own.iter().map(|&(_, p)| p).fold(0.0f64, f64::max);
    let mut payments = vec![0.0; n];
    for &(i, p) in &own {
        payments[i] = match spec {
            ModeSpec::Unconstrained => p,
            ModeSpec::Nd => top,
            ModeSpec::BetaNd { beta } => p.max(top / beta),
        };
    }
    if top > 1.0 + TOL {
        return Ok(IncentiveOutcome::infeasible(
            n,
            set.clone(),
            Infeasibility::PaymentAboveOne,
        ));
    }
    for p in &mut payments {
        *p = p.min(1.0);
    }
    let total: f64 = payments.iter().sum();
    Ok(IncentiveOutcome {
        set: set.clone(),
        payments: Contract { payments },
        utility: (1.0 - total) * value,
        infeasibility: None,
    })
}

/// `α_i · f(i | S \ {i}) − c_i` for members and `α_i · f(i | S) − c_i` for
/// the rest: the gain of exerting effort over shirking.
fn effort_gains(
    inst: &Instance,
    contract: &Contract,
    set: &AgentSet,
) -> Result<Vec<f64>, ContractError> {
    let n = inst.n();
    if contract.payments.len() != n {
        return Err(ContractError::ContractLength {
            expected: n,
            got: contract.payments.len(),
        });
    }
    let (value, inside) = inst.reward.leave_one_out(set)?;
    let mut gains = vec![0.0; n];
    for (i, m) in inside {
        gains[i] = contract.payments[i] * m - inst.costs[i];
    }
    for i in (0..n).filter(|&i| !set.contains(i)) {
        let m = inst.reward.eval(&set.with(i))? - value;
        gains[i] = contract.payments[i] * m - inst.costs[i];
    }
    Ok(gains)
}

/// Whether `set` exerting effort is a pure Nash equilibrium under `contract`.
///
/// Members must weakly prefer effort; outsiders must weakly prefer shirking.
/// An outsider exactly indifferent therefore still counts as an equilibrium,
/// even though the effort tie-break would have it join (see
/// [`best_response_step`]).
pub fn is_equilibrium(
    inst: &Instance,
    contract: &Contract,
    set: &AgentSet,
) -> Result<bool, ContractError> {
    Ok(deviating_agents(inst, contract, set)?.is_empty())
}

/// Agents that gain by switching: members who prefer to shirk and
/// outsiders who strictly prefer effort.
pub fn deviating_agents(
    inst: &Instance,
    contract: &Contract,
    set: &AgentSet,
) -> Result<Vec<usize>, ContractError> {
    let gains = effort_gains(inst, contract, set)?;
    Ok(gains
        .iter()
        .enumerate()
        .filter(|&(i, &g)| if set.contains(i) { g < -TOL } else { g > TOL })
        .map(|(i, _)| i)
        .collect())
}

/// One synchronous round of best responses. Every agent exerts effort iff
/// doing so is at least as good as shirking.
pub fn best_response_step(
    inst: &Instance,
    contract: &Contract,
    set: &AgentSet,
) -> Result<AgentSet, ContractError> {
    let gains = effort_gains(inst, contract, set)?;
    Ok(gains
        .iter()
        .enumerate()
        .filter(|(_, &g)| g >= -TOL)
        .map(|(i, _)| i)
        .collect())
}
