//! Partition a base incentive set by unconstrained payment level and
//! incentivize each part separately under a (relaxed) equal-pay contract.
//! Both schemes come with a guarantee relative to `g(base)`: the best part
//! recovers at least a `1 / guarantee_denominator` fraction of it.

use super::keep_better;
use crate::agents::AgentSet;
use crate::contract::{optimal_contract_for_set, IncentiveOutcome, Instance, ModeSpec};
use crate::error::SolveError;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    /// Nonempty groups in construction order; they partition `base_set`.
    pub groups: Vec<AgentSet>,
    /// One outcome per group, under `mode`.
    pub per_group: Vec<IncentiveOutcome>,
    pub guarantee_denominator: u32,
    pub base_set: AgentSet,
    /// Unconstrained utility `g(base_set)`.
    pub base_utility: f64,
    pub mode: ModeSpec,
}

impl PartitionResult {
    /// Best group outcome, or the empty set when no group has positive
    /// utility.
    pub fn best(&self) -> IncentiveOutcome {
        let n = self
            .per_group
            .first()
            .map_or(0, |o| o.payments.payments().len());
        let mut best = IncentiveOutcome::empty(n);
        for out in &self.per_group {
            keep_better(&mut best, out.clone());
        }
        best
    }

    /// `g(base) / guarantee_denominator`.
    pub fn guaranteed_utility(&self) -> f64 {
        self.base_utility / f64::from(self.guarantee_denominator)
    }
}

/// `⌈log2 x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// `(c_i / f(i | base \ {i}))` for each member of a feasible base, plus
/// `g(base)`.
fn base_payments(inst: &Instance, base: &AgentSet) -> Result<(Vec<(usize, f64)>, f64), SolveError> {
    if base.is_empty() {
        return Err(SolveError::EmptyBase);
    }
    let out = optimal_contract_for_set(inst, base, ModeSpec::Unconstrained)?;
    if let Some(why) = out.infeasibility {
        return Err(SolveError::BaseInfeasible(format!("{why:?}")));
    }
    let pays = base
        .iter()
        .map(|i| (i, out.payments.payments()[i]))
        .collect();
    Ok((pays, out.utility))
}

fn evaluate_groups(
    inst: &Instance,
    groups: Vec<AgentSet>,
    mode: ModeSpec,
) -> Result<(Vec<AgentSet>, Vec<IncentiveOutcome>), SolveError> {
    let groups: Vec<AgentSet> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    let per_group = groups
        .iter()
        .map(|g| optimal_contract_for_set(inst, g, mode))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((groups, per_group))
}

/// Doubling partition under exact non-discrimination.
///
/// Members of `base` are sorted by descending unconstrained payment (ties by
/// ascending index) and cut into groups of sizes 1, 2, 4, … with the
/// remainder forming the last group, `m = ⌈log2(|base| + 1)⌉` groups in all.
/// The count keeps every group no larger than all earlier groups together
/// plus one, which is what bounds a group's equal-pay total by the base's
/// unconstrained total; it equals `⌈log2 |base|⌉` unless `|base|` is a power
/// of two.
pub fn log_partition(inst: &Instance, base: &AgentSet) -> Result<PartitionResult, SolveError> {
    let (mut pays, base_utility) = base_payments(inst, base)?;
    pays.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let order: Vec<usize> = pays.into_iter().map(|(i, _)| i).collect();

    let m = ceil_log2(order.len() + 1);
    let mut groups = Vec::with_capacity(m.max(1) as usize);
    let mut start = 0;
    for k in 1..m {
        let size = 1usize << (k - 1);
        groups.push(order[start..start + size].iter().copied().collect());
        start += size;
    }
    groups.push(order[start..].iter().copied().collect());

    let (groups, per_group) = evaluate_groups(inst, groups, ModeSpec::Nd)?;
    Ok(PartitionResult {
        groups,
        per_group,
        guarantee_denominator: m.max(1),
        base_set: base.clone(),
        base_utility,
        mode: ModeSpec::Nd,
    })
}

/// Threshold partition under the wage ratio `β = n^δ`.
///
/// With `t = ⌈1/δ⌉`, agents with unconstrained payment below `1/n` form the
/// first group, `[1/n, n^{-(t-1)δ})` the second, and each further group
/// spans one more factor of `n^δ`, up to `[n^{-δ}, 1]`. Each group is
/// incentivized separately under β-relaxed equal pay; the guarantee
/// denominator is `t + 1`.
pub fn delta_partition(
    inst: &Instance,
    base: &AgentSet,
    delta: f64,
) -> Result<PartitionResult, SolveError> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(SolveError::InvalidDelta(delta));
    }
    let (pays, base_utility) = base_payments(inst, base)?;
    let n = inst.n() as f64;
    let t = ceil_recip(delta);
    let beta = (delta * n.ln()).exp();
    // upper[j] bounds group j + 1 (0-based) from above, for j >= 1
    let upper: Vec<f64> = (0..=t)
        .map(|j| {
            if j == 0 {
                1.0 / n
            } else {
                (-((t - j) as f64) * delta * n.ln()).exp()
            }
        })
        .collect();

    let mut groups = vec![AgentSet::empty(); t + 1];
    for (i, alpha) in pays {
        let j = upper.iter().position(|&u| alpha < u).unwrap_or(t);
        groups[j].insert(i);
    }
    let mode = ModeSpec::BetaNd { beta };
    let (groups, per_group) = evaluate_groups(inst, groups, mode)?;
    Ok(PartitionResult {
        groups,
        per_group,
        guarantee_denominator: t as u32 + 1,
        base_set: base.clone(),
        base_utility,
        mode,
    })
}

/// `⌈1/δ⌉`, ignoring rounding noise in the reciprocal.
pub fn ceil_recip(delta: f64) -> usize {
    ((1.0 / delta) - 1e-9).ceil().max(1.0) as usize
}
