//! Acceptance criteria. Each test prints one PASS/FAIL line with the
//! measured values, then asserts.

use std::time::{Duration, Instant};

use fairpay_core::forge::{
    gen_geometric_family, gen_random_two_class, gen_two_agent_tight, gen_two_class, Family,
    GeometricFamilyParams, TightPairParams, TwoClassParams,
};
use fairpay_core::harness::{pair_pool, verify_bounds, Suite};
use fairpay_core::solvers::{
    brute_force, consecutive_groups_solve, symmetric_solve, two_agent_bound, two_agent_solve,
};
use fairpay_core::{AgentSet, ModeSpec};

const SEED: u64 = 20240601;

struct Verdict {
    id: u32,
    name: &'static str,
    clauses: Vec<(String, bool)>,
}

impl Verdict {
    fn new(id: u32, name: &'static str) -> Self {
        Self {
            id,
            name,
            clauses: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.clauses.push((detail, ok));
    }

    fn runtime(&mut self, started: Instant, limit: Duration) {
        let took = started.elapsed();
        self.check(took < limit, format!("runtime {took:.2?} < {limit:?}"));
    }

    fn finish(self) {
        let ok = self.clauses.iter().all(|(_, ok)| *ok);
        let details: Vec<String> = self
            .clauses
            .iter()
            .map(|(d, ok)| format!("[{}] {d}", if *ok { "ok" } else { "FAILED" }))
            .collect();
        println!(
            "{} criterion {} ({}): {}",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            details.join("; ")
        );
        assert!(ok, "criterion {} failed", self.id);
    }
}

#[test]
fn criterion_1_two_agent_tightness() {
    let started = Instant::now();
    let mut v = Verdict::new(1, "two-agent tight instances reach the bound");
    for beta in [1.0, 2.0, 3.0, 8.0, 15.0] {
        let inst = gen_two_agent_tight(&TightPairParams {
            beta,
            epsilon: 1e-6,
        })
        .unwrap();
        let r = two_agent_solve(&inst, beta).unwrap();
        let ratio = r.opt_reference.unwrap() / r.best.utility;
        let bound = two_agent_bound(beta).unwrap();
        v.check(
            (ratio - bound).abs() <= 1e-3,
            format!("beta {beta}: ratio {ratio:.6} vs {bound:.6}"),
        );
    }
    v.runtime(started, Duration::from_secs(1));
    v.finish();
}

#[test]
fn criterion_2_two_agent_upper_bound() {
    let started = Instant::now();
    let mut v = Verdict::new(2, "random two-agent ratios stay under the bound");
    let pool = pair_pool(500, SEED).unwrap();
    for beta in [1.0, 2.0, 4.0] {
        let bound = two_agent_bound(beta).unwrap();
        let worst = pool
            .iter()
            .map(|inst| {
                let r = two_agent_solve(inst, beta).unwrap();
                if r.best.utility > 0.0 {
                    r.opt_reference.unwrap() / r.best.utility
                } else {
                    1.0
                }
            })
            .fold(1.0, f64::max);
        v.check(
            worst <= bound + 1e-9,
            format!("beta {beta}: max ratio {worst:.6} <= {bound:.6}"),
        );
    }
    v.runtime(started, Duration::from_secs(5));
    v.finish();
}

#[test]
fn criterion_3_geometric_family() {
    let started = Instant::now();
    let mut v = Verdict::new(3, "geometric family optimum and growing equal-pay ratio");
    let mut ratios = Vec::new();
    for m in 2..=4u32 {
        let inst = gen_geometric_family(&GeometricFamilyParams::new(m, 3.0)).unwrap();
        let free = brute_force(&inst, ModeSpec::Unconstrained).unwrap().best;
        let equal = brute_force(&inst, ModeSpec::Nd).unwrap().best;
        v.check(
            (free.utility - 2.0 / 3.0).abs() <= 1e-9 && free.set == AgentSet::full(inst.n()),
            format!(
                "m {m}: OPT {:.12} at |S| = {} of {}",
                free.utility,
                free.set.len(),
                inst.n()
            ),
        );
        ratios.push(free.utility / equal.utility);
    }
    v.check(
        ratios.windows(2).all(|w| w[0] < w[1]),
        format!("ratios {ratios:.6?} strictly increasing"),
    );
    let inst = gen_geometric_family(&GeometricFamilyParams::new(2, 2.0)).unwrap();
    let ratio = brute_force(&inst, ModeSpec::Unconstrained)
        .unwrap()
        .best
        .utility
        / brute_force(&inst, ModeSpec::Nd).unwrap().best.utility;
    v.check(
        (ratio - 4.0 / 3.0).abs() <= 1e-9,
        format!("m 2, T 2: ratio {ratio:.12} = 4/3"),
    );
    v.runtime(started, Duration::from_secs(10));
    v.finish();
}

fn bound_suite(id: u32, name: &'static str, suite: Suite) {
    let started = Instant::now();
    let mut v = Verdict::new(id, name);
    let report = verify_bounds(suite, 200, SEED).unwrap();
    v.check(
        report.passed(),
        format!(
            "{} checks over 200 instances, {} failures, worst slack {:.3e}",
            report.checks,
            report.failures.len(),
            report.worst_slack
        ),
    );
    v.runtime(started, Duration::from_secs(60));
    v.finish();
}

#[test]
fn criterion_4_log_partition_guarantee() {
    bound_suite(
        4,
        "doubling partition recovers g(base)/ceil(log2 n)",
        Suite::LogPartition,
    );
}

#[test]
fn criterion_5_delta_partition_guarantee() {
    bound_suite(
        5,
        "threshold partition recovers (g(base) - n^-delta)/(ceil(1/delta)+1)",
        Suite::DeltaPartition,
    );
}

#[test]
fn criterion_6_exclusion_family() {
    let started = Instant::now();
    let mut v = Verdict::new(
        6,
        "exclusion family, M = 14, eps = 0.1, n = 200, delta = 0.5",
    );
    let (big_m, epsilon, n, delta) = (14.0, 0.1, 200usize, 0.5);
    let inst = gen_two_class(&TwoClassParams::Exclusion {
        n,
        big_m,
        epsilon,
        delta,
    })
    .unwrap();
    let beta = (delta * (n as f64).ln()).exp();
    let opt_nd = symmetric_solve(&inst, ModeSpec::beta_nd(beta).unwrap())
        .unwrap()
        .best
        .utility;
    let opt = symmetric_solve(&inst, ModeSpec::Unconstrained)
        .unwrap()
        .best
        .utility;
    let expected_nd = 0.5 - 1.0 / big_m;
    v.check(
        (opt_nd - expected_nd).abs() <= 1e-9,
        format!("constrained {opt_nd:.9} vs 1/2 - 1/M = {expected_nd:.9}"),
    );
    let expected = 1.0 - 1.0 / big_m - epsilon;
    v.check(
        (opt - expected).abs() <= 1e-9,
        format!("unconstrained {opt:.9} vs 1 - 1/M - eps = {expected:.9}"),
    );
    let share = opt_nd / opt;
    v.check(
        share < 0.5 + epsilon,
        format!("OPT_ND/OPT {share:.6} < {}", 0.5 + epsilon),
    );
    v.runtime(started, Duration::from_secs(1));
    v.finish();
}

#[test]
fn criterion_7_half_crowd_family() {
    let started = Instant::now();
    let mut v = Verdict::new(7, "half-crowd family, n = 10^4, eps = 1e-6, beta = n");
    let n = 10_000usize;
    let inst = gen_two_class(&TwoClassParams::HalfCrowd { n, epsilon: 1e-6 }).unwrap();
    let opt_nd = symmetric_solve(&inst, ModeSpec::beta_nd(n as f64).unwrap())
        .unwrap()
        .best
        .utility;
    let opt = symmetric_solve(&inst, ModeSpec::Unconstrained)
        .unwrap()
        .best
        .utility;
    let root2 = 2f64.sqrt();
    let expected = (10.0 - root2) / 32.0 + 1.0 / (8.0 * n as f64 - 8.0);
    v.check(
        (opt_nd - expected).abs() <= 1e-6,
        format!(
            "constrained {opt_nd:.11} vs {expected:.11} (diff {:.2e})",
            (opt_nd - expected).abs()
        ),
    );
    let share = opt_nd / opt;
    let target = (11.0 - 6.0 * root2) / 4.0;
    v.check(
        (share - target).abs() <= 1e-2,
        format!("OPT_ND/OPT {share:.6} vs {target:.6}"),
    );
    v.runtime(started, Duration::from_secs(1));
    v.finish();
}

#[test]
fn criterion_8_oracle_equivalence() {
    let started = Instant::now();
    let mut v = Verdict::new(8, "structured solvers agree with brute force");
    let specs = [
        ModeSpec::Unconstrained,
        ModeSpec::Nd,
        ModeSpec::BetaNd { beta: 3.0 },
    ];
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let n = 1 + (seed as usize % 15);
        let inst = gen_random_two_class(n, SEED + seed).unwrap();
        for spec in specs {
            let fast = symmetric_solve(&inst, spec).unwrap().best.utility;
            let slow = brute_force(&inst, spec).unwrap().best.utility;
            worst = worst.max((fast - slow).abs());
        }
    }
    v.check(
        worst <= 1e-12,
        format!("symmetric: max diff {worst:.1e} over 50 seeds"),
    );
    let mut worst: f64 = 0.0;
    let pool = pair_pool(500, SEED).unwrap();
    for inst in &pool {
        for beta in [1.0, 2.0, 4.0] {
            let fast = two_agent_solve(inst, beta).unwrap().best.utility;
            let slow = brute_force(inst, ModeSpec::BetaNd { beta })
                .unwrap()
                .best
                .utility;
            worst = worst.max((fast - slow).abs());
        }
    }
    v.check(
        worst <= 1e-12,
        format!(
            "two-agent: max diff {worst:.1e} over {} instances",
            pool.len()
        ),
    );
    v.runtime(started, Duration::from_secs(30));
    v.finish();
}

#[test]
fn criterion_9_large_wage_ratio() {
    let started = Instant::now();
    let mut v = Verdict::new(9, "geometric m = 8 with wage ratio n^1.5");
    let family = Family::Geometric(GeometricFamilyParams::new(8, 3.0));
    let inst = family.build().unwrap();
    let sizes = family.group_sizes().unwrap();
    let beta = (1.5 * (inst.n() as f64).ln()).exp();
    let opt = consecutive_groups_solve(&inst, &sizes, ModeSpec::Unconstrained)
        .unwrap()
        .best
        .utility;
    let opt_nd = consecutive_groups_solve(&inst, &sizes, ModeSpec::beta_nd(beta).unwrap())
        .unwrap()
        .best
        .utility;
    let ratio = opt / opt_nd;
    v.check(
        ratio <= 1.05,
        format!("n {}: ratio {ratio:.6} <= 1.05", inst.n()),
    );
    v.runtime(started, Duration::from_secs(5));
    v.finish();
}
