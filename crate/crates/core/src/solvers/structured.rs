//! Solvers that exploit instance structure to avoid the `2^n` search.

use super::{keep_better, Method, SolveReport};
use crate::agents::AgentSet;
use crate::contract::{optimal_contract_for_set, IncentiveOutcome, Instance, ModeSpec};
use crate::error::{ContractError, SolveError};
use crate::reward::RewardKind;
use crate::TOL;

/// Utility of incentivizing the special agent (if `with_a`) plus `t`
/// b-agents, or `None` when that set is infeasible.
struct TwoClassCosts {
    f_a: f64,
    f_b: f64,
    pay_a: Option<f64>,
    pay_b: Option<f64>,
}

impl TwoClassCosts {
    fn utility(&self, with_a: bool, t: usize, spec: ModeSpec) -> Option<f64> {
        let mut top: f64 = 0.0;
        if with_a {
            top = top.max(self.pay_a?);
        }
        if t > 0 {
            top = top.max(self.pay_b?);
        }
        if top > 1.0 + TOL {
            return None;
        }
        let each = |own: f64| {
            match spec {
                ModeSpec::Unconstrained => own,
                ModeSpec::Nd => top,
                ModeSpec::BetaNd { beta } => own.max(top / beta),
            }
            .min(1.0)
        };
        let mut total = t as f64 * self.pay_b.map_or(0.0, each);
        let mut value = self.f_b * t as f64;
        if with_a {
            total += self.pay_a.map_or(0.0, each);
            value += self.f_a;
        }
        Some((1.0 - total) * value.clamp(0.0, 1.0))
    }
}

/// Exact solver for the two-class symmetric reward: utility depends only on
/// whether the special agent works and how many b-agents do, so the
/// `2 · (count_b + 1)` candidates `{a?} ∪ {1..=t}` cover every case.
pub fn symmetric_solve(inst: &Instance, spec: ModeSpec) -> Result<SolveReport, SolveError> {
    let RewardKind::SymmetricTwoClass { f_a, f_b, count_b } = *inst.reward().kind() else {
        return Err(SolveError::WrongKind {
            expected: "symmetric_two_class",
            got: inst.reward().kind().name(),
        });
    };
    let costs = inst.costs();
    if costs[1..].windows(2).any(|w| w[0] != w[1]) {
        return Err(SolveError::NonUniformCosts);
    }
    let ratio = |c: f64, m: f64| (m > TOL).then(|| c / m);
    let model = TwoClassCosts {
        f_a,
        f_b,
        pay_a: ratio(costs[0], f_a),
        pay_b: costs.get(1).and_then(|&c| ratio(c, f_b)),
    };

    // (utility, with_a, t); empty set is the baseline
    let mut best = (0.0, false, 0usize);
    let mut examined = 0u64;
    for with_a in [false, true] {
        for t in 0..=count_b {
            examined += 1;
            let Some(u) = model.utility(with_a, t, spec) else {
                continue;
            };
            let size = t + usize::from(with_a);
            let best_size = best.2 + usize::from(best.1);
            // equal size: the set containing agent 0 has the smaller mask
            let wins = u > best.0
                || (u == best.0 && (size < best_size || (size == best_size && with_a && !best.1)));
            if wins {
                best = (u, with_a, t);
            }
        }
    }

    let (_, with_a, t) = best;
    let mut set = AgentSet::range(1, t + 1);
    if with_a {
        set.insert(0);
    }
    let outcome = optimal_contract_for_set(inst, &set, spec)?;
    let best = if outcome.feasible() && !set.is_empty() {
        outcome
    } else {
        IncentiveOutcome::empty(inst.n())
    };
    Ok(SolveReport {
        spec,
        best,
        method: Method::Symmetric,
        candidates_examined: examined,
        opt_reference: None,
    })
}

/// All four incentive sets of a two-agent instance under the β-relaxed
/// contract; the unconstrained optimum over the same sets goes in
/// `opt_reference`.
pub fn two_agent_solve(inst: &Instance, beta: f64) -> Result<SolveReport, SolveError> {
    if inst.n() != 2 {
        return Err(SolveError::WrongSize {
            expected: 2,
            got: inst.n(),
        });
    }
    let spec = ModeSpec::beta_nd(beta)?;
    let mut best = IncentiveOutcome::empty(2);
    let mut free = IncentiveOutcome::empty(2);
    for mask in 1..4u64 {
        let set = AgentSet::from_mask(mask);
        keep_better(&mut best, optimal_contract_for_set(inst, &set, spec)?);
        keep_better(
            &mut free,
            optimal_contract_for_set(inst, &set, ModeSpec::Unconstrained)?,
        );
    }
    Ok(SolveReport {
        spec,
        best,
        method: Method::TwoAgent,
        candidates_examined: 4,
        opt_reference: Some(free.utility),
    })
}

/// Worst-case ratio between the unconstrained and β-relaxed optima over all
/// two-agent submodular instances: `1 + 1/√(β+1)`.
pub fn two_agent_bound(beta: f64) -> Result<f64, SolveError> {
    if beta.is_nan() || beta < 1.0 {
        return Err(ContractError::InvalidBeta(beta).into());
    }
    Ok(1.0 + 1.0 / (beta + 1.0).sqrt())
}

/// Search over agent intervals that start at a group boundary, for
/// instances laid out as consecutive groups of interchangeable agents with
/// the most valuable groups first.
///
/// Under equal pay the principal fills groups in order, so an optimal set
/// is a run of whole groups plus a prefix of the next one. That covers
/// `O(groups · n)` candidates instead of `2^n`.
pub fn consecutive_groups_solve(
    inst: &Instance,
    group_sizes: &[usize],
    spec: ModeSpec,
) -> Result<SolveReport, SolveError> {
    let n = inst.n();
    if group_sizes.iter().sum::<usize>() != n || group_sizes.contains(&0) {
        return Err(SolveError::GroupLayout(format!(
            "sizes {group_sizes:?} do not tile {n} agents"
        )));
    }
    let mut best = IncentiveOutcome::empty(n);
    let mut examined = 1u64;
    let mut start = 0;
    for &size in group_sizes {
        for end in start + 1..=n {
            examined += 1;
            let out = optimal_contract_for_set(inst, &AgentSet::range(start, end), spec)?;
            keep_better(&mut best, out);
        }
        start += size;
    }
    Ok(SolveReport {
        spec,
        best,
        method: Method::ConsecutiveGroups,
        candidates_examined: examined,
        opt_reference: None,
    })
}
