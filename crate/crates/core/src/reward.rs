//! Success-probability oracles over agent subsets.
//!
//! Every [`RewardFunction`] is normalized (`f(∅) = 0`) and bounded in
//! `[0, 1]`. The additive, coverage, capped-additive and two-class kinds are
//! monotone submodular by construction; explicit tables are not, and must
//! pass [`RewardFunction::check_structure`] before they back an
//! [`Instance`](crate::Instance).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agents::AgentSet;
use crate::error::RewardError;
use crate::TOL;

/// Largest agent count accepted for a full explicit table (2^24 entries).
pub const EXPLICIT_MAX_AGENTS: usize = 24;

/// Default size above which [`RewardFunction::check_structure`] refuses an
/// exhaustive sweep.
pub const EXHAUSTIVE_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub enum RewardKind {
    Additive {
        weights: Vec<f64>,
    },
    /// Agent `i` covers the elements `covers[i]`; `f(S)` is the total weight
    /// of the union.
    Coverage {
        element_weights: Vec<f64>,
        covers: Vec<Vec<usize>>,
    },
    CappedAdditive {
        weights: Vec<f64>,
        cap: f64,
    },
    /// Full table indexed by bitmask.
    Explicit {
        table: Vec<f64>,
    },
    /// One special agent (index 0) worth `f_a` plus `count_b` identical
    /// agents (indices `1..=count_b`) worth `f_b` each, additively.
    SymmetricTwoClass {
        f_a: f64,
        f_b: f64,
        count_b: usize,
    },
}

impl RewardKind {
    pub fn name(&self) -> &'static str {
        match self {
            RewardKind::Additive { .. } => "additive",
            RewardKind::Coverage { .. } => "coverage",
            RewardKind::CappedAdditive { .. } => "capped_additive",
            RewardKind::Explicit { .. } => "explicit",
            RewardKind::SymmetricTwoClass { .. } => "symmetric_two_class",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardFunction {
    kind: RewardKind,
    n: usize,
}

fn check_prob(what: &'static str, v: f64) -> Result<(), RewardError> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(RewardError::InvalidValue { what, value: v })
    }
}

fn check_total(total: f64) -> Result<(), RewardError> {
    if total <= 1.0 + TOL {
        Ok(())
    } else {
        Err(RewardError::TotalAboveOne(total))
    }
}

impl RewardFunction {
    pub fn additive(weights: Vec<f64>) -> Result<Self, RewardError> {
        if weights.is_empty() {
            return Err(RewardError::NoAgents);
        }
        for &w in &weights {
            check_prob("weight", w)?;
        }
        check_total(weights.iter().sum())?;
        let n = weights.len();
        Ok(Self {
            kind: RewardKind::Additive { weights },
            n,
        })
    }

    pub fn coverage(
        element_weights: Vec<f64>,
        mut covers: Vec<Vec<usize>>,
    ) -> Result<Self, RewardError> {
        if covers.is_empty() {
            return Err(RewardError::NoAgents);
        }
        for &w in &element_weights {
            check_prob("element weight", w)?;
        }
        check_total(element_weights.iter().sum())?;
        for (agent, elems) in covers.iter().enumerate() {
            if let Some(&e) = elems.iter().find(|&&e| e >= element_weights.len()) {
                return Err(RewardError::UnknownElement {
                    agent,
                    element: e,
                    elements: element_weights.len(),
                });
            }
        }
        for elems in &mut covers {
            elems.sort_unstable();
            elems.dedup();
        }
        let n = covers.len();
        Ok(Self {
            kind: RewardKind::Coverage {
                element_weights,
                covers,
            },
            n,
        })
    }

    pub fn capped_additive(weights: Vec<f64>, cap: f64) -> Result<Self, RewardError> {
        if weights.is_empty() {
            return Err(RewardError::NoAgents);
        }
        check_prob("cap", cap)?;
        for &w in &weights {
            if !(w.is_finite() && w >= 0.0) {
                return Err(RewardError::InvalidValue {
                    what: "weight",
                    value: w,
                });
            }
        }
        let n = weights.len();
        Ok(Self {
            kind: RewardKind::CappedAdditive { weights, cap },
            n,
        })
    }

    /// A full table of `2^n` values indexed by bitmask. Structure is not
    /// checked here.
    pub fn explicit(n: usize, table: Vec<f64>) -> Result<Self, RewardError> {
        if n == 0 {
            return Err(RewardError::NoAgents);
        }
        if n > EXPLICIT_MAX_AGENTS {
            return Err(RewardError::TooManyAgents {
                n,
                limit: EXPLICIT_MAX_AGENTS,
            });
        }
        if table.len() != 1usize << n {
            return Err(RewardError::TableSize {
                n,
                expected: 1usize << n,
                got: table.len(),
            });
        }
        for &v in &table {
            check_prob("table entry", v)?;
        }
        if table[0] != 0.0 {
            return Err(RewardError::NotNormalized(table[0]));
        }
        Ok(Self {
            kind: RewardKind::Explicit { table },
            n,
        })
    }

    pub fn symmetric_two_class(f_a: f64, f_b: f64, count_b: usize) -> Result<Self, RewardError> {
        check_prob("f_a", f_a)?;
        check_prob("f_b", f_b)?;
        check_total(f_a + f_b * count_b as f64)?;
        Ok(Self {
            kind: RewardKind::SymmetricTwoClass { f_a, f_b, count_b },
            n: count_b + 1,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &RewardKind {
        &self.kind
    }

    /// True for the kinds whose monotonicity and submodularity hold by
    /// construction.
    pub fn structured_by_construction(&self) -> bool {
        !matches!(self.kind, RewardKind::Explicit { .. })
    }

    fn validate(&self, set: &AgentSet) -> Result<(), RewardError> {
        if set.upper_bound() > self.n {
            Err(RewardError::InvalidSubset {
                agent: set.upper_bound() - 1,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    fn validate_agent(&self, agent: usize) -> Result<(), RewardError> {
        if agent >= self.n {
            Err(RewardError::InvalidSubset { agent, n: self.n })
        } else {
            Ok(())
        }
    }

    /// `f(S)`.
    pub fn eval(&self, set: &AgentSet) -> Result<f64, RewardError> {
        self.validate(set)?;
        Ok(self.eval_unchecked(set))
    }

    fn eval_unchecked(&self, set: &AgentSet) -> f64 {
        let v = match &self.kind {
            RewardKind::Additive { weights } => set.iter().map(|i| weights[i]).sum(),
            RewardKind::Coverage {
                element_weights,
                covers,
            } => {
                let mut covered = vec![false; element_weights.len()];
                for i in set.iter() {
                    for &e in &covers[i] {
                        covered[e] = true;
                    }
                }
                covered
                    .iter()
                    .zip(element_weights)
                    .filter(|(c, _)| **c)
                    .map(|(_, w)| w)
                    .sum()
            }
            RewardKind::CappedAdditive { weights, cap } => {
                let total: f64 = set.iter().map(|i| weights[i]).sum();
                total.min(*cap)
            }
            RewardKind::Explicit { table } => {
                // validate() bounds the set below n <= 24
                table[set.as_mask().unwrap_or(0) as usize]
            }
            RewardKind::SymmetricTwoClass { f_a, f_b, .. } => {
                let with_a = set.contains(0);
                let t = set.len() - usize::from(with_a);
                if with_a {
                    f_a + f_b * t as f64
                } else {
                    f_b * t as f64
                }
            }
        };
        v.clamp(0.0, 1.0)
    }

    /// `f(i | S \ {i}) = f(S ∪ {i}) − f(S \ {i})`.
    pub fn marginal(&self, agent: usize, set: &AgentSet) -> Result<f64, RewardError> {
        self.validate_agent(agent)?;
        self.validate(set)?;
        let base = set.without(agent);
        Ok(self.eval_unchecked(&base.with(agent)) - self.eval_unchecked(&base))
    }

    /// `f(S)` together with `f(i | S \ {i})` for every member `i`, in
    /// ascending agent order.
    pub fn leave_one_out(&self, set: &AgentSet) -> Result<(f64, Vec<(usize, f64)>), RewardError> {
        self.validate(set)?;
        let value = self.eval_unchecked(set);
        let marginals = match &self.kind {
            RewardKind::Additive { weights } => set.iter().map(|i| (i, weights[i])).collect(),
            RewardKind::SymmetricTwoClass { f_a, f_b, .. } => set
                .iter()
                .map(|i| (i, if i == 0 { *f_a } else { *f_b }))
                .collect(),
            RewardKind::CappedAdditive { weights, cap } => {
                let total: f64 = set.iter().map(|i| weights[i]).sum();
                let full = total.min(*cap);
                set.iter()
                    .map(|i| (i, full - (total - weights[i]).max(0.0).min(*cap)))
                    .collect()
            }
            RewardKind::Coverage {
                element_weights,
                covers,
            } => {
                let mut multiplicity = vec![0usize; element_weights.len()];
                for i in set.iter() {
                    for &e in &covers[i] {
                        multiplicity[e] += 1;
                    }
                }
                set.iter()
                    .map(|i| {
                        let sole = covers[i]
                            .iter()
                            .filter(|&&e| multiplicity[e] == 1)
                            .map(|&e| element_weights[e])
                            .sum();
                        (i, sole)
                    })
                    .collect()
            }
            RewardKind::Explicit { table } => {
                let mask = set.as_mask().unwrap_or(0);
                set.iter()
                    .map(|i| (i, value - table[(mask & !(1u64 << i)) as usize]))
                    .collect()
            }
        };
        Ok((value, marginals))
    }

    /// Verifies monotonicity and submodularity, exhaustively when `n` is at
    /// most `opts.exhaustive_limit`, otherwise on a seeded sample.
    pub fn check_structure(&self, opts: &StructureCheck) -> Result<StructureReport, RewardError> {
        if self.n <= opts.exhaustive_limit {
            Ok(self.check_exhaustive())
        } else if let Some(sampling) = opts.sampling {
            Ok(self.check_sampled(sampling))
        } else {
            Err(RewardError::TooManyAgents {
                n: self.n,
                limit: opts.exhaustive_limit,
            })
        }
    }

    // Submodularity is checked in its local form f(i|S∪{j}) ≤ f(i|S) for
    // i ≠ j outside S, which is equivalent to the global one.
    fn check_exhaustive(&self) -> StructureReport {
        let n = self.n;
        let table: Vec<f64> = (0..1u64 << n)
            .map(|m| self.eval_unchecked(&AgentSet::from_mask(m)))
            .collect();
        let mut report = StructureReport {
            exhaustive: true,
            ..StructureReport::default()
        };
        for mask in 0..(1u64 << n) {
            for i in (0..n).filter(|i| mask & (1 << i) == 0) {
                let gain = table[(mask | 1 << i) as usize] - table[mask as usize];
                report.checked += 1;
                if report.monotone_violation.is_none() && gain < -TOL {
                    let s = AgentSet::from_mask(mask);
                    report.monotone_violation = Some(Violation {
                        t: s.with(i),
                        s,
                        agent: i,
                    });
                }
                if report.submodular_violation.is_some() {
                    continue;
                }
                for j in (0..n).filter(|&j| j != i && mask & (1 << j) == 0) {
                    let bigger = mask | 1 << j;
                    let later = table[(bigger | 1 << i) as usize] - table[bigger as usize];
                    report.checked += 1;
                    if later > gain + TOL {
                        report.submodular_violation = Some(Violation {
                            s: AgentSet::from_mask(mask),
                            t: AgentSet::from_mask(bigger),
                            agent: i,
                        });
                        break;
                    }
                }
            }
        }
        report
    }

    fn check_sampled(&self, sampling: Sampling) -> StructureReport {
        let n = self.n;
        let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
        let mut report = StructureReport::default();
        for _ in 0..sampling.samples {
            let t: AgentSet = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            if t.len() == n {
                continue;
            }
            let s: AgentSet = t.iter().filter(|_| rng.gen_bool(0.5)).collect();
            let outside: Vec<usize> = (0..n).filter(|&i| !t.contains(i)).collect();
            let i = outside[rng.gen_range(0..outside.len())];
            report.checked += 1;
            let fs = self.eval_unchecked(&s);
            let ft = self.eval_unchecked(&t);
            let gain_s = self.eval_unchecked(&s.with(i)) - fs;
            let gain_t = self.eval_unchecked(&t.with(i)) - ft;
            if report.monotone_violation.is_none() {
                if gain_s < -TOL {
                    report.monotone_violation = Some(Violation {
                        t: s.with(i),
                        s: s.clone(),
                        agent: i,
                    });
                } else if ft < fs - TOL {
                    // S ⊆ T but f(T) < f(S): walk T down to a single-step witness
                    report.monotone_violation = self.single_step_drop(&s, &t);
                }
            }
            if report.submodular_violation.is_none() && gain_t > gain_s + TOL {
                report.submodular_violation = Some(Violation { s, t, agent: i });
            }
        }
        report
    }

    fn single_step_drop(&self, s: &AgentSet, t: &AgentSet) -> Option<Violation> {
        let mut cur = s.clone();
        for i in t.iter().filter(|&i| !s.contains(i)) {
            let next = cur.with(i);
            if self.eval_unchecked(&next) < self.eval_unchecked(&cur) - TOL {
                return Some(Violation {
                    s: cur,
                    t: next,
                    agent: i,
                });
            }
            cur = next;
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureCheck {
    pub exhaustive_limit: usize,
    pub sampling: Option<Sampling>,
}

impl Default for StructureCheck {
    fn default() -> Self {
        Self {
            exhaustive_limit: EXHAUSTIVE_LIMIT,
            sampling: None,
        }
    }
}

/// A triple `(S, T, i)` with `S ⊆ T`. For a monotonicity violation
/// `T = S ∪ {i}` and `f(T) < f(S)`; for a submodularity violation `i ∉ T`
/// and `f(i|T) > f(i|S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub s: AgentSet,
    pub t: AgentSet,
    pub agent: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StructureReport {
    pub monotone_violation: Option<Violation>,
    pub submodular_violation: Option<Violation>,
    /// Number of inequalities evaluated.
    pub checked: u64,
    pub exhaustive: bool,
}

impl StructureReport {
    pub fn monotone(&self) -> bool {
        self.monotone_violation.is_none()
    }

    pub fn submodular(&self) -> bool {
        self.submodular_violation.is_none()
    }

    pub fn passed(&self) -> bool {
        self.monotone() && self.submodular()
    }

    /// Re-evaluates each witness against `f`; true when every witness really
    /// violates its inequality.
    pub fn witnesses_hold(&self, f: &RewardFunction) -> bool {
        let ev = |s: &AgentSet| f.eval(s).unwrap_or(f64::NAN);
        let mono = self
            .monotone_violation
            .as_ref()
            .is_none_or(|v| v.s.is_subset(&v.t) && ev(&v.t) < ev(&v.s));
        let sub = self.submodular_violation.as_ref().is_none_or(|v| {
            v.s.is_subset(&v.t)
                && !v.t.contains(v.agent)
                && ev(&v.t.with(v.agent)) - ev(&v.t) > ev(&v.s.with(v.agent)) - ev(&v.s)
        });
        mono && sub
    }
}
