//! Instance generators: the adversarial families with known optima and
//! seeded random instances for property checks.
//!
//! Agents are laid out group by group in ascending group index, so expected
//! optimal sets can be written down as index ranges.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contract::Instance;
use crate::error::ForgeError;
use crate::reward::RewardFunction;

pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_COST_MARGIN: f64 = 0.9;
const MAX_GEOMETRIC_GROUPS: u32 = 20;
const HALF_CROWD_WARN_BELOW: usize = 1000;

fn invalid(msg: impl Into<String>) -> ForgeError {
    ForgeError::InvalidParam(msg.into())
}

fn require_epsilon(epsilon: f64) -> Result<(), ForgeError> {
    if epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "epsilon must satisfy 0 < epsilon < 1 (costs must be positive), got {epsilon}"
        )))
    }
}

/// Which analysis the geometric family is used for; fixes the minimum
/// payment divisor `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometricContext {
    /// Exact equal pay, `T ≥ 2`.
    EqualPay,
    /// Relaxed pay with wage ratio `n^δ`, `T ≥ 3`.
    RelaxedPay,
}

impl GeometricContext {
    pub fn min_divisor(&self) -> f64 {
        match self {
            GeometricContext::EqualPay => 2.0,
            GeometricContext::RelaxedPay => 3.0,
        }
    }
}

/// `m` groups of sizes `1, 2, 4, …, 2^{m-1}` (so `n = 2^m − 1`). Every
/// agent of group `k` has weight `1/(m·2^{k-1})` and cost
/// `1/(T·m²·4^{k-1})`, so its indifference payment is its weight over `T`
/// and each group contributes `1/m` of the total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricFamilyParams {
    pub groups: u32,
    pub payment_divisor: f64,
    pub context: GeometricContext,
}

impl GeometricFamilyParams {
    pub fn new(groups: u32, payment_divisor: f64) -> Self {
        Self {
            groups,
            payment_divisor,
            context: GeometricContext::EqualPay,
        }
    }

    pub fn n(&self) -> usize {
        (1usize << self.groups) - 1
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        (0..self.groups).map(|k| 1usize << k).collect()
    }
}

pub fn gen_geometric_family(p: &GeometricFamilyParams) -> Result<Instance, ForgeError> {
    if p.groups < 1 || p.groups > MAX_GEOMETRIC_GROUPS {
        return Err(invalid(format!(
            "m must satisfy 1 <= m <= {MAX_GEOMETRIC_GROUPS}, got {}",
            p.groups
        )));
    }
    let min = p.context.min_divisor();
    if !(p.payment_divisor.is_finite() && p.payment_divisor >= min) {
        return Err(invalid(format!(
            "T must satisfy T >= {min}, got {}",
            p.payment_divisor
        )));
    }
    let m = f64::from(p.groups);
    let mut weights = Vec::with_capacity(p.n());
    let mut costs = Vec::with_capacity(p.n());
    for k in 0..p.groups {
        let size = 1usize << k;
        let scale = size as f64;
        let weight = 1.0 / (m * scale);
        let cost = 1.0 / (p.payment_divisor * m * m * scale * scale);
        weights.extend(std::iter::repeat_n(weight, size));
        costs.extend(std::iter::repeat_n(cost, size));
    }
    Ok(Instance::new(costs, RewardFunction::additive(weights)?)?)
}

/// One special agent `a` (index 0) and `n − 1` identical agents `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoClassParams {
    /// `a` is worth 1/2 at cost `1/(2M)`, the crowd shares the other half
    /// at cost `ε/(2(n−1)²)` each. Once `a` is in, the relaxed-pay floor
    /// prices every b-agent out. Requires `M > 3 + 1/ε` and
    /// `n > M^{1/(1−δ)}`.
    Exclusion {
        n: usize,
        big_m: f64,
        epsilon: f64,
        delta: f64,
    },
    /// `a` is worth `√2/4` at cost `(√2−1)/4`, the crowd shares 1/4 at cost
    /// `ε/(4(n−1)²)` each. With wage ratio `n`, the best relaxed-pay
    /// contract takes `a` and about half the crowd. Requires `n` even.
    HalfCrowd { n: usize, epsilon: f64 },
}

pub fn gen_two_class(p: &TwoClassParams) -> Result<Instance, ForgeError> {
    let (n, f_a, c_a, f_b, c_b) = match *p {
        TwoClassParams::Exclusion {
            n,
            big_m,
            epsilon,
            delta,
        } => {
            require_epsilon(epsilon)?;
            if !(delta > 0.0 && delta < 1.0) {
                return Err(invalid(format!(
                    "delta must satisfy 0 < delta < 1, got {delta}"
                )));
            }
            if !(big_m.is_finite() && big_m > 3.0 + 1.0 / epsilon) {
                return Err(invalid(format!(
                    "M must satisfy M > 3 + 1/epsilon = {}, got {big_m}",
                    3.0 + 1.0 / epsilon
                )));
            }
            let threshold = big_m.powf(1.0 / (1.0 - delta));
            if !(n >= 2 && n as f64 > threshold) {
                return Err(invalid(format!(
                    "n must satisfy n > M^(1/(1-delta)) = {threshold}, got {n}"
                )));
            }
            let rest = (n - 1) as f64;
            (
                n,
                0.5,
                1.0 / (2.0 * big_m),
                1.0 / (2.0 * rest),
                epsilon / (2.0 * rest * rest),
            )
        }
        TwoClassParams::HalfCrowd { n, epsilon } => {
            require_epsilon(epsilon)?;
            if n < 2 || n % 2 != 0 {
                return Err(invalid(format!("n must be even and >= 2, got {n}")));
            }
            if n < HALF_CROWD_WARN_BELOW {
                log::warn!(
                    "half-crowd family with n = {n} < {HALF_CROWD_WARN_BELOW}; large-n behaviour not reached"
                );
            }
            let rest = (n - 1) as f64;
            let root2 = std::f64::consts::SQRT_2;
            (
                n,
                root2 / 4.0,
                (root2 - 1.0) / 4.0,
                1.0 / (4.0 * rest),
                epsilon / (4.0 * rest * rest),
            )
        }
    };
    let mut costs = vec![c_b; n];
    costs[0] = c_a;
    let reward = RewardFunction::symmetric_two_class(f_a, f_b, n - 1)?;
    Ok(Instance::new(costs, reward)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightPairParams {
    pub beta: f64,
    pub epsilon: f64,
}

/// Two additive agents on which the relaxed-pay optimum loses exactly a
/// `1 + 1/√(β+1)` factor as `ε → 0`: weights `(1/2, 1/(2s))` and costs
/// `(1/2 − 1/(2s), ε/(2s))` with `s = √(β+1)`.
pub fn gen_two_agent_tight(p: &TightPairParams) -> Result<Instance, ForgeError> {
    if !(p.beta.is_finite() && p.beta >= 1.0) {
        return Err(invalid(format!(
            "beta must satisfy beta >= 1, got {}",
            p.beta
        )));
    }
    require_epsilon(p.epsilon)?;
    let s = (p.beta + 1.0).sqrt();
    let weights = vec![0.5, 1.0 / (2.0 * s)];
    let costs = vec![0.5 - 1.0 / (2.0 * s), p.epsilon / (2.0 * s)];
    Ok(Instance::new(costs, RewardFunction::additive(weights)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RandomKind {
    Additive,
    Coverage,
    CappedAdditive,
}

impl RandomKind {
    pub const ALL: [RandomKind; 3] = [
        RandomKind::Additive,
        RandomKind::Coverage,
        RandomKind::CappedAdditive,
    ];

    pub fn family_name(&self) -> &'static str {
        match self {
            RandomKind::Additive => "random-additive",
            RandomKind::Coverage => "random-coverage",
            RandomKind::CappedAdditive => "random-capped",
        }
    }
}

/// `count` weights drawn from `[0.05, 1)` and rescaled to sum to `total`.
fn draw_weights(count: usize, total: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w * total / sum).collect()
}

/// Seeded random instance of a submodular kind. Each agent's cost is
/// `cost_margin · u · f({i})` with `u ∈ [0.05, 1)`, so every singleton can
/// be incentivized at a share below `cost_margin`.
pub fn gen_random(
    kind: RandomKind,
    n: usize,
    seed: u64,
    cost_margin: f64,
) -> Result<Instance, ForgeError> {
    if n < 1 {
        return Err(invalid("n must satisfy n >= 1"));
    }
    if !(cost_margin > 0.0 && cost_margin < 1.0) {
        return Err(invalid(format!(
            "cost_margin must satisfy 0 < cost_margin < 1, got {cost_margin}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reward = match kind {
        RandomKind::Additive => {
            let total = rng.gen_range(0.5..1.0);
            RewardFunction::additive(draw_weights(n, total, &mut rng))?
        }
        RandomKind::Coverage => {
            let elements = n + rng.gen_range(1..=n);
            let weights = draw_weights(elements, 1.0, &mut rng);
            let covers = (0..n)
                .map(|_| {
                    let k = rng.gen_range(1..=3.min(elements));
                    rand::seq::index::sample(&mut rng, elements, k).into_vec()
                })
                .collect();
            RewardFunction::coverage(weights, covers)?
        }
        RandomKind::CappedAdditive => {
            let total = rng.gen_range(1.0..2.0);
            let weights = draw_weights(n, total, &mut rng);
            let cap = rng.gen_range(0.6..1.0);
            RewardFunction::capped_additive(weights, cap)?
        }
    };
    let costs = (0..n)
        .map(|i| {
            let single = reward
                .eval(&crate::AgentSet::from_agents([i]))
                .expect("agent index in range");
            cost_margin * rng.gen_range(0.05..1.0) * single
        })
        .collect();
    Ok(Instance::new(costs, reward)?)
}

/// Seeded random two-agent instance with an explicit table: singleton
/// values drawn independently, pair value anywhere between the larger
/// singleton and their sum, which covers every monotone submodular shape
/// on two agents.
pub fn gen_random_pair(seed: u64, cost_margin: f64) -> Result<Instance, ForgeError> {
    if !(cost_margin > 0.0 && cost_margin < 1.0) {
        return Err(invalid(format!(
            "cost_margin must satisfy 0 < cost_margin < 1, got {cost_margin}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f1: f64 = rng.gen_range(0.02..0.5);
    let f2: f64 = rng.gen_range(0.02..0.5);
    let both = f1.max(f2) + rng.gen_range(0.0..=1.0) * f1.min(f2);
    let reward = RewardFunction::explicit(2, vec![0.0, f1, f2, both])?;
    let costs = vec![
        cost_margin * rng.gen_range(0.05..1.0) * f1,
        cost_margin * rng.gen_range(0.05..1.0) * f2,
    ];
    Ok(Instance::new(costs, reward)?)
}

/// Seeded random two-class symmetric instance with `n` agents.
pub fn gen_random_two_class(n: usize, seed: u64) -> Result<Instance, ForgeError> {
    if n < 1 {
        return Err(invalid("n must satisfy n >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count_b = n - 1;
    let f_a = rng.gen_range(0.05..0.7);
    let f_b = if count_b == 0 {
        0.0
    } else {
        rng.gen_range(0.1..1.0) * (1.0 - f_a) / count_b as f64
    };
    let c_a = rng.gen_range(0.05..0.95) * f_a;
    let c_b = rng.gen_range(0.001..0.5) * f_b.max(1e-3);
    let mut costs = vec![c_b; n];
    costs[0] = c_a;
    Ok(Instance::new(
        costs,
        RewardFunction::symmetric_two_class(f_a, f_b, count_b)?,
    )?)
}

/// A named family with concrete parameters: the unit the CLI generates and
/// sweeps over.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Geometric(GeometricFamilyParams),
    TwoClass(TwoClassParams),
    TightPair(TightPairParams),
    Random {
        kind: RandomKind,
        n: usize,
        seed: u64,
        cost_margin: f64,
    },
}

pub const FAMILY_NAMES: [&str; 7] = [
    "geometric",
    "lemma8",
    "lemma9",
    "tight2",
    "random-additive",
    "random-coverage",
    "random-capped",
];

fn get(params: &BTreeMap<String, f64>, key: &str) -> Result<f64, ForgeError> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| invalid(format!("missing parameter '{key}'")))
}

fn get_or(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn count(value: f64, key: &str) -> Result<usize, ForgeError> {
    if value.fract() == 0.0 && value >= 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(invalid(format!(
            "'{key}' must be a non-negative integer, got {value}"
        )))
    }
}

impl Family {
    /// Builds a family from its CLI name and numeric parameters. Random
    /// families need an explicit seed.
    pub fn from_params(
        name: &str,
        params: &BTreeMap<String, f64>,
        seed: Option<u64>,
    ) -> Result<Self, ForgeError> {
        let eps = || get_or(params, "epsilon", DEFAULT_EPSILON);
        Ok(match name {
            "geometric" => Family::Geometric(GeometricFamilyParams::new(
                count(get(params, "m")?, "m")? as u32,
                get_or(params, "T", 3.0),
            )),
            "lemma8" => Family::TwoClass(TwoClassParams::Exclusion {
                n: count(get(params, "n")?, "n")?,
                big_m: get(params, "M")?,
                epsilon: eps(),
                delta: get(params, "delta")?,
            }),
            "lemma9" => Family::TwoClass(TwoClassParams::HalfCrowd {
                n: count(get(params, "n")?, "n")?,
                epsilon: eps(),
            }),
            "tight2" => Family::TightPair(TightPairParams {
                beta: get(params, "beta")?,
                epsilon: eps(),
            }),
            other => {
                let kind = RandomKind::ALL
                    .into_iter()
                    .find(|k| k.family_name() == other)
                    .ok_or_else(|| {
                        invalid(format!(
                            "unknown family '{other}', expected one of {}",
                            FAMILY_NAMES.join(", ")
                        ))
                    })?;
                Family::Random {
                    kind,
                    n: count(get(params, "n")?, "n")?,
                    seed: seed.ok_or_else(|| invalid("random families require --seed"))?,
                    cost_margin: get_or(params, "cost_margin", DEFAULT_COST_MARGIN),
                }
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Geometric(_) => "geometric",
            Family::TwoClass(TwoClassParams::Exclusion { .. }) => "lemma8",
            Family::TwoClass(TwoClassParams::HalfCrowd { .. }) => "lemma9",
            Family::TightPair(_) => "tight2",
            Family::Random { kind, .. } => kind.family_name(),
        }
    }

    /// Parameters as they would be passed to [`Family::from_params`].
    pub fn params(&self) -> BTreeMap<String, f64> {
        let entries: Vec<(&str, f64)> = match *self {
            Family::Geometric(p) => vec![("m", f64::from(p.groups)), ("T", p.payment_divisor)],
            Family::TwoClass(TwoClassParams::Exclusion {
                n,
                big_m,
                epsilon,
                delta,
            }) => vec![
                ("n", n as f64),
                ("M", big_m),
                ("epsilon", epsilon),
                ("delta", delta),
            ],
            Family::TwoClass(TwoClassParams::HalfCrowd { n, epsilon }) => {
                vec![("n", n as f64), ("epsilon", epsilon)]
            }
            Family::TightPair(p) => vec![("beta", p.beta), ("epsilon", p.epsilon)],
            Family::Random { n, cost_margin, .. } => {
                vec![("n", n as f64), ("cost_margin", cost_margin)]
            }
        };
        entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Family::Random { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<Instance, ForgeError> {
        match self {
            Family::Geometric(p) => gen_geometric_family(p),
            Family::TwoClass(p) => gen_two_class(p),
            Family::TightPair(p) => gen_two_agent_tight(p),
            Family::Random {
                kind,
                n,
                seed,
                cost_margin,
            } => gen_random(*kind, *n, *seed, *cost_margin),
        }
    }

    /// Layout of interchangeable-agent groups, for families that have one.
    pub fn group_sizes(&self) -> Option<Vec<usize>> {
        match self {
            Family::Geometric(p) => Some(p.group_sizes()),
            Family::TwoClass(TwoClassParams::Exclusion { n, .. })
            | Family::TwoClass(TwoClassParams::HalfCrowd { n, .. }) => Some(vec![1, n - 1]),
            _ => None,
        }
    }

    /// The wage ratio the family is designed against, when it has one:
    /// `β` for the tight pair, `n^δ` for the exclusion family and `n` for
    /// the half-crowd family.
    pub fn natural_beta(&self) -> Option<f64> {
        match *self {
            Family::TightPair(p) => Some(p.beta),
            Family::TwoClass(TwoClassParams::Exclusion { n, delta, .. }) => {
                Some((delta * (n as f64).ln()).exp())
            }
            Family::TwoClass(TwoClassParams::HalfCrowd { n, .. }) => Some(n as f64),
            _ => None,
        }
    }
}
