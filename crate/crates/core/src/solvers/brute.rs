use std::thread;

use super::{keep_better, Method, SolveReport};
use crate::agents::AgentSet;
use crate::contract::{optimal_contract_for_set, IncentiveOutcome, Instance, ModeSpec};
use crate::error::{ContractError, SolveError};

pub const BRUTE_FORCE_LIMIT: usize = 22;

/// Exhaustive search over all `2^n` incentive sets.
///
/// The mask range is split into `workers` contiguous chunks searched
/// independently; the reduction uses the total order of
/// [`IncentiveOutcome::beats`], so the answer does not depend on the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForce {
    pub limit: usize,
    pub workers: usize,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self {
            limit: BRUTE_FORCE_LIMIT,
            workers: 1,
        }
    }
}

impl BruteForce {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers: workers.max(1),
            ..Self::default()
        }
    }

    pub fn solve(&self, inst: &Instance, spec: ModeSpec) -> Result<SolveReport, SolveError> {
        let n = inst.n();
        if n > self.limit.min(63) {
            return Err(SolveError::TooLarge {
                n,
                limit: self.limit,
            });
        }
        let total = 1u64 << n;
        let workers = (self.workers.max(1) as u64).min(total);
        let chunk = total.div_ceil(workers);
        let ranges: Vec<(u64, u64)> = (0..workers)
            .map(|w| (w * chunk, ((w + 1) * chunk).min(total)))
            .filter(|(lo, hi)| lo < hi)
            .collect();

        let partials: Vec<Result<IncentiveOutcome, ContractError>> = if ranges.len() == 1 {
            vec![search_range(inst, spec, ranges[0])]
        } else {
            thread::scope(|scope| {
                let handles: Vec<_> = ranges
                    .iter()
                    .map(|&r| scope.spawn(move || search_range(inst, spec, r)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("brute-force worker panicked"))
                    .collect()
            })
        };

        let mut best = IncentiveOutcome::empty(n);
        for partial in partials {
            keep_better(&mut best, partial?);
        }
        Ok(SolveReport {
            spec,
            best,
            method: Method::BruteForce,
            candidates_examined: total,
            opt_reference: None,
        })
    }
}

fn search_range(
    inst: &Instance,
    spec: ModeSpec,
    (lo, hi): (u64, u64),
) -> Result<IncentiveOutcome, ContractError> {
    let mut best = IncentiveOutcome::empty(inst.n());
    for mask in lo..hi {
        let out = optimal_contract_for_set(inst, &AgentSet::from_mask(mask), spec)?;
        keep_better(&mut best, out);
    }
    Ok(best)
}

/// Single-threaded [`BruteForce`] with the default size limit.
pub fn brute_force(inst: &Instance, spec: ModeSpec) -> Result<SolveReport, SolveError> {
    BruteForce::default().solve(inst, spec)
}
