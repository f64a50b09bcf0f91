//! Seeded randomized invariant suites.
//!
//! Each suite draws its cases from a ChaCha stream seeded by (config seed,
//! suite name), checks an exact identity or inequality on every case, and
//! reports the first few failures verbatim. The suites double as the
//! implementation of the `verify` CLI command and as the backbone of the
//! acceptance tests; sizes follow the defaults below unless overridden.

use num::{BigInt, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{enumerate_equilibria, poa_pos_report, AnalysisOptions};
use crate::dynamics::{
    is_equilibrium, potential, run_dynamics, starting_assignment, MoveOrder, StartKind,
};
use crate::error::Error;
use crate::instance::{
    generate_instance, Assignment, GeneratorKind, GeneratorParams, Instance, LoadVector, Weight,
};
use crate::io;
use crate::mechanism::{
    lambda_player_bruteforce, lambda_player_ccoord, lambda_player_dcoord, lambda_set_bruteforce,
    lambda_set_ccoord, lambda_set_dcoord, partitions, CoefficientFunction, Mechanism,
};
use crate::numeric::{nth_root_bounds, rat_pow, Rat};

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Override the per-suite default case count.
    pub cases: Option<usize>,
    /// Restrict the degrees a suite sweeps (suite-specific defaults apply
    /// otherwise).
    pub degrees: Option<Vec<u32>>,
    /// Negative control: run with a zero-sensitive coefficient function.
    /// The decomposition and potential-sign suites must then fail.
    pub corrupt_gamma: bool,
    pub parallel: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            cases: None,
            degrees: None,
            corrupt_gamma: false,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub suppressed_failures: usize,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.suppressed_failures == 0
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "norm-max",
    "minkowski",
    "convexity",
    "zero-invariance",
    "oracle",
    "decomposition",
    "sandwich",
    "corollary7",
    "potential-sign",
    "feasibility",
    "anonymity",
    "scale-invariance",
    "dynamics",
    "load-bounds",
    "roundtrip",
];

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteOutcome, Error> {
    let mut suite = Suite::new(name, cfg);
    match name {
        "norm-max" => norm_max(&mut suite, cfg),
        "minkowski" => minkowski(&mut suite, cfg),
        "convexity" => convexity(&mut suite, cfg),
        "zero-invariance" => zero_invariance(&mut suite, cfg),
        "oracle" => oracle(&mut suite, cfg),
        "decomposition" => decomposition(&mut suite, cfg),
        "sandwich" => sandwich(&mut suite, cfg),
        "corollary7" => corollary7(&mut suite, cfg),
        "potential-sign" => potential_sign(&mut suite, cfg),
        "feasibility" => feasibility(&mut suite, cfg),
        "anonymity" => anonymity(&mut suite, cfg),
        "scale-invariance" => scale_invariance(&mut suite, cfg),
        "dynamics" => dynamics_suite(&mut suite, cfg),
        "load-bounds" => load_bounds(&mut suite, cfg),
        "roundtrip" => roundtrip(&mut suite, cfg),
        other => {
            return Err(Error::Parse(format!(
                "unknown suite {other:?}; available: {}",
                SUITE_NAMES.join(", ")
            )))
        }
    }
    Ok(suite.finish())
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteOutcome> {
    SUITE_NAMES
        .iter()
        .map(|name| run_suite(name, cfg).expect("built-in names are valid"))
        .collect()
}

const MAX_REPORTED_FAILURES: usize = 8;

struct Suite {
    name: &'static str,
    rng: ChaCha8Rng,
    cases: usize,
    failures: Vec<String>,
    suppressed: usize,
}

impl Suite {
    fn new(name: &str, cfg: &SuiteConfig) -> Self {
        let name: &'static str = SUITE_NAMES
            .iter()
            .find(|&&n| n == name)
            .copied()
            .unwrap_or("unknown");
        // Per-suite stream: hash the name into the seed so suites are
        // independent of each other and of their execution order.
        let salt: u64 = name
            .bytes()
            .fold(0xcbf29ce484222325u64, |h, b| {
                (h ^ b as u64).wrapping_mul(0x100000001b3)
            });
        Suite {
            name,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ salt),
            cases: 0,
            failures: Vec::new(),
            suppressed: 0,
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures.push(describe());
            } else {
                self.suppressed += 1;
            }
        }
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            suppressed_failures: self.suppressed,
        }
    }
}

fn cases_or(cfg: &SuiteConfig, default: usize) -> usize {
    cfg.cases.unwrap_or(default)
}

fn degrees_or(cfg: &SuiteConfig, default: &[u32]) -> Vec<u32> {
    cfg.degrees.clone().unwrap_or_else(|| default.to_vec())
}

fn small_rat(rng: &mut ChaCha8Rng, hi: u64) -> Rat {
    let num = rng.gen_range(1..=hi);
    let den = rng.gen_range(1..=3u64);
    Rat::new(BigInt::from(num), BigInt::from(den))
}

fn non_negative_rat(rng: &mut ChaCha8Rng, hi: u64) -> Rat {
    if rng.gen_bool(0.15) {
        Rat::zero()
    } else {
        small_rat(rng, hi)
    }
}

fn random_load_vector(rng: &mut ChaCha8Rng, machines: usize) -> LoadVector {
    LoadVector::new((0..machines).map(|_| non_negative_rat(rng, 20)).collect())
}

/// Random instance with integer and rational weights and occasional
/// unavailability; every row keeps at least one available machine.
fn random_instance(rng: &mut ChaCha8Rng, n_max: usize, m_max: usize, hi: u64) -> Instance {
    let n = rng.gen_range(1..=n_max);
    let m = rng.gen_range(1..=m_max);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row: Vec<Weight> = (0..m)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    Weight::Unavailable
                } else if rng.gen_bool(0.2) {
                    Weight::Finite(small_rat(rng, hi))
                } else {
                    Weight::Finite(Rat::from_integer(BigInt::from(rng.gen_range(1..=hi))))
                }
            })
            .collect();
        if !row.iter().any(Weight::is_available) {
            let j = rng.gen_range(0..m);
            row[j] = Weight::Finite(Rat::from_integer(BigInt::from(rng.gen_range(1..=hi))));
        }
        rows.push(row);
    }
    Instance::new(rows).expect("constructed rows are valid")
}

fn random_assignment(rng: &mut ChaCha8Rng, inst: &Instance) -> Assignment {
    let machine_of = (0..inst.jobs())
        .map(|u| {
            let avail = inst.available_machines(u);
            avail[rng.gen_range(0..avail.len())]
        })
        .collect();
    Assignment::new(machine_of, inst).expect("only available machines drawn")
}

/// A single-machine instance holding exactly the given weights (the job set
/// for Lambda evaluations).
fn column_instance(weights: &[u64]) -> Instance {
    Instance::from_integers(weights.iter().map(|&w| vec![w]).collect()).expect("positive weights")
}

/// Nontrivial custom coefficient table: gamma varies by partition shape and
/// includes non-integers and a zero.
pub fn custom_test_table(d: u32) -> CoefficientFunction {
    let table = partitions(d + 1)
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let squares: u32 = p.iter().map(|&t| t * t).sum();
            let num = (squares % 7) as i64 + if i % 3 == 0 { 0 } else { 1 };
            (p, Rat::new(BigInt::from(num), BigInt::from(3)))
        })
        .collect();
    CoefficientFunction::custom(d, table).expect("table covers all partitions")
}

fn mechanism_family(d: u32, corrupt: bool) -> Vec<CoefficientFunction> {
    let mut family = vec![
        CoefficientFunction::dcoord(d).expect("d >= 2"),
        CoefficientFunction::ccoord(d).expect("d >= 2"),
        custom_test_table(d),
    ];
    if corrupt {
        family = family
            .into_iter()
            .map(|cf| cf.corrupted_zero_sensitive())
            .collect();
    }
    family
}

// --- norm and convexity facts -------------------------------------------

/// max load <= p-norm <= m^(1/p) * max load, compared at the p-th power.
fn norm_max(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 1000);
    for case in 0..cases {
        let m = suite.rng.gen_range(1..=6);
        let lv = random_load_vector(&mut suite.rng, m);
        let makespan = lv.makespan();
        let mut ok = true;
        for p in 1..=8u32 {
            let power_sum = lv.p_norm_power(p);
            let max_p = rat_pow(&makespan, p);
            let m_rat = Rat::from_integer(BigInt::from(m));
            if !(max_p <= power_sum && power_sum <= &m_rat * &max_p) {
                ok = false;
            }
        }
        suite.check(ok, || format!("case {case}: norm/makespan bracket failed"));
    }
}

/// Triangle inequality for p-norms: exact for p = 1, 2; certified intervals
/// with a refinement ladder for p >= 3 (the equality case of proportional
/// vectors is accepted at the interval margin).
fn minkowski(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 500);
    for case in 0..cases {
        let m = suite.rng.gen_range(1..=5);
        let a = random_load_vector(&mut suite.rng, m);
        let b = if suite.rng.gen_bool(0.1) {
            // Proportional pair: exercises the equality case.
            let c = small_rat(&mut suite.rng, 5);
            LoadVector::new(a.loads().iter().map(|x| x * &c).collect())
        } else {
            random_load_vector(&mut suite.rng, m)
        };
        let sum = LoadVector::new(
            a.loads()
                .iter()
                .zip(b.loads())
                .map(|(x, y)| x + y)
                .collect(),
        );

        // p = 1: plain additivity.
        let ok1 = sum.p_norm_power(1) <= a.p_norm_power(1) + b.p_norm_power(1);
        suite.check(ok1, || format!("case {case}: p=1"));

        // p = 2 via the cross-multiplied Cauchy-Schwarz form:
        // (sum a_i b_i)^2 <= (sum a_i^2)(sum b_i^2).
        let dot: Rat = a
            .loads()
            .iter()
            .zip(b.loads())
            .map(|(x, y)| x * y)
            .sum();
        let ok2 = rat_pow(&dot, 2) <= a.p_norm_power(2) * b.p_norm_power(2);
        suite.check(ok2, || format!("case {case}: p=2"));

        for p in 3..=8u32 {
            let lhs = sum.p_norm_power(p);
            let mut verdict = None;
            for digits in [15u32, 30, 45] {
                let (la, ha) = nth_root_bounds(&a.p_norm_power(p), p, digits).unwrap();
                let (lb, hb) = nth_root_bounds(&b.p_norm_power(p), p, digits).unwrap();
                if lhs <= rat_pow(&(&la + &lb), p) {
                    verdict = Some(true);
                    break;
                }
                if lhs > rat_pow(&(&ha + &hb), p) {
                    verdict = Some(false);
                    break;
                }
            }
            // Still inconclusive at 45 digits: the two sides agree to within
            // the interval width (exact equality case); accept.
            let ok = verdict.unwrap_or(true);
            suite.check(ok, || format!("case {case}: p={p} violated"));
        }
    }
}

/// sum_i ((t+a_i)^r - t^r) <= (t + sum a_i)^r - t^r, exact.
fn convexity(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 500);
    for case in 0..cases {
        let t = non_negative_rat(&mut suite.rng, 10);
        let k = suite.rng.gen_range(1..=6);
        let a: Vec<Rat> = (0..k)
            .map(|_| non_negative_rat(&mut suite.rng, 10))
            .collect();
        let r = suite.rng.gen_range(1..=6u32);
        let t_r = rat_pow(&t, r);
        let lhs: Rat = a.iter().map(|ai| rat_pow(&(&t + ai), r) - &t_r).sum();
        let total: Rat = a.iter().sum();
        let rhs = rat_pow(&(&t + &total), r) - &t_r;
        suite.check(lhs <= rhs, || {
            format!("case {case}: r={r}, k={k}: {lhs} > {rhs}")
        });
    }
}

/// gamma(A) = gamma(A plus padded zeros), 100 random multisets per degree
/// and kind.
fn zero_invariance(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 100);
    for d in degrees_or(cfg, &[2, 3, 4, 5]) {
        for cf in mechanism_family(d, cfg.corrupt_gamma) {
            for case in 0..cases {
                let parts = {
                    let all = partitions(d + 1);
                    all[suite.rng.gen_range(0..all.len())].clone()
                };
                let mut padded = parts.clone();
                for _ in 0..suite.rng.gen_range(1..=3) {
                    padded.push(0);
                }
                let plain = cf.gamma(&parts).unwrap();
                let with_zeros = cf.gamma(&padded).unwrap();
                suite.check(plain == with_zeros, || {
                    format!(
                        "case {case}: {cf} gamma({parts:?}) = {plain} != gamma({padded:?}) = {with_zeros}"
                    )
                });
            }
        }
    }
}

// --- Lambda-function identities ------------------------------------------

/// Closed forms against the composition-enumeration oracle, exact equality.
fn oracle(suite: &mut Suite, cfg: &SuiteConfig) {
    let draws = cases_or(cfg, 200);
    for d in degrees_or(cfg, &[2, 3, 4, 5]) {
        let dcoord = CoefficientFunction::dcoord(d).expect("d >= 2");
        let ccoord = CoefficientFunction::ccoord(d).expect("d >= 2");
        for len in 0..=6usize {
            for case in 0..draws {
                let weights: Vec<u64> =
                    (0..len).map(|_| suite.rng.gen_range(1..=10)).collect();
                let inst = if len == 0 {
                    // Dummy single job; the evaluated set is still empty.
                    column_instance(&[1])
                } else {
                    column_instance(&weights)
                };
                let jobs: Vec<usize> = (0..len).collect();

                let set_oracle = lambda_set_bruteforce(&dcoord, &inst, 0, &jobs).unwrap();
                let set_closed = lambda_set_dcoord(d, &inst, 0, &jobs).unwrap();
                suite.check(set_oracle == set_closed, || {
                    format!("d={d} l={len} case {case}: dcoord set {set_closed} != oracle {set_oracle}")
                });

                let cset_oracle = lambda_set_bruteforce(&ccoord, &inst, 0, &jobs).unwrap();
                let cset_dp = lambda_set_ccoord(d, &inst, 0, &jobs).unwrap();
                suite.check(cset_oracle == cset_dp, || {
                    format!("d={d} l={len} case {case}: ccoord set {cset_dp} != oracle {cset_oracle}")
                });

                if len > 0 {
                    let u = suite.rng.gen_range(0..len);
                    let player_oracle =
                        lambda_player_bruteforce(&dcoord, &inst, 0, &jobs, u).unwrap();
                    let player_closed = lambda_player_dcoord(d, &inst, 0, &jobs, u).unwrap();
                    suite.check(player_oracle == player_closed, || {
                        format!(
                            "d={d} l={len} case {case}: dcoord player {player_closed} != oracle {player_oracle}"
                        )
                    });

                    let cplayer_oracle =
                        lambda_player_bruteforce(&ccoord, &inst, 0, &jobs, u).unwrap();
                    let cplayer_dp = lambda_player_ccoord(d, &inst, 0, &jobs, u).unwrap();
                    suite.check(cplayer_oracle == cplayer_dp, || {
                        format!(
                            "d={d} l={len} case {case}: ccoord player {cplayer_dp} != oracle {cplayer_oracle}"
                        )
                    });
                }
            }
        }
    }
}

/// Lambda_j(U) = Lambda_{u,j}(U) + Lambda_j(U minus u), through the
/// production dispatchers.
fn decomposition(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 500);
    let degrees = degrees_or(cfg, &[2, 3]);
    for case in 0..cases {
        let d = degrees[case % degrees.len()];
        let family = mechanism_family(d, cfg.corrupt_gamma);
        let cf = &family[case % family.len()];
        let len = suite.rng.gen_range(1..=5usize);
        let weights: Vec<u64> = (0..len).map(|_| suite.rng.gen_range(1..=10)).collect();
        let inst = column_instance(&weights);
        let jobs: Vec<usize> = (0..len).collect();
        let u = suite.rng.gen_range(0..len);
        let rest: Vec<usize> = jobs.iter().copied().filter(|&v| v != u).collect();

        let whole = cf.lambda_set(&inst, 0, &jobs).unwrap().into_value();
        let player = cf.lambda_player(&inst, 0, &jobs, u).unwrap().into_value();
        let without = cf.lambda_set(&inst, 0, &rest).unwrap().into_value();
        suite.check(whole == &player + &without, || {
            format!("case {case}: {cf} on {weights:?}, u={u}: {whole} != {player} + {without}")
        });
    }
}

/// DCOORD sandwich: w * L^d <= Lambda_{u,j}(U) <= d * w * L^d, exact.
fn sandwich(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 500);
    let degrees = degrees_or(cfg, &[2, 3, 4, 5]);
    for case in 0..cases {
        let d = degrees[case % degrees.len()];
        let len = suite.rng.gen_range(1..=6usize);
        let weights: Vec<u64> = (0..len).map(|_| suite.rng.gen_range(1..=10)).collect();
        let inst = column_instance(&weights);
        let jobs: Vec<usize> = (0..len).collect();
        let u = suite.rng.gen_range(0..len);

        let lambda = lambda_player_dcoord(d, &inst, 0, &jobs, u)
            .unwrap()
            .into_value();
        let w = inst.weight_of(u, 0).unwrap();
        let load: Rat = jobs.iter().map(|&v| inst.weight_of(v, 0).unwrap()).sum();
        let lower = w * rat_pow(&load, d);
        let upper = Rat::from_integer(BigInt::from(d)) * &lower;
        suite.check(lower <= lambda && lambda <= upper, || {
            format!("case {case}: d={d} w={w}: {lower} <= {lambda} <= {upper} failed")
        });
    }
}

/// DCOORD: d/(d+1) * L^(d+1) <= Lambda_j(U) <= L^(d+1), exact.
fn corollary7(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 500);
    let degrees = degrees_or(cfg, &[2, 3, 4, 5]);
    for case in 0..cases {
        let d = degrees[case % degrees.len()];
        let len = suite.rng.gen_range(1..=6usize);
        let weights: Vec<u64> = (0..len).map(|_| suite.rng.gen_range(1..=10)).collect();
        let inst = column_instance(&weights);
        let jobs: Vec<usize> = (0..len).collect();

        let lambda = lambda_set_dcoord(d, &inst, 0, &jobs).unwrap().into_value();
        let load: Rat = jobs.iter().map(|&v| inst.weight_of(v, 0).unwrap()).sum();
        let load_power = rat_pow(&load, d + 1);
        let lower = Rat::new(BigInt::from(d), BigInt::from(d + 1)) * &load_power;
        suite.check(lower <= lambda && lambda <= load_power, || {
            format!("case {case}: d={d}: {lower} <= {lambda} <= {load_power} failed")
        });
    }
}

/// The potential identity: for a single deviation of player u from j1 to j2,
/// Phi(N) - Phi(N') = Lambda_{u,j1}(N_j1) - Lambda_{u,j2}(N'_j2) exactly, and
/// the sign matches the player's completion-time change.
fn potential_sign(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 500);
    let degrees = degrees_or(cfg, &[2, 3]);
    let mut case = 0usize;
    while case < cases {
        let d = degrees[case % degrees.len()];
        let family = mechanism_family(d, cfg.corrupt_gamma);
        let cf = &family[case % family.len()];
        let inst = random_instance(&mut suite.rng, 5, 3, 10);
        let before = random_assignment(&mut suite.rng, &inst);
        let player = suite.rng.gen_range(0..inst.jobs());
        let from = before.machine(player);
        let targets: Vec<usize> = inst
            .available_machines(player)
            .iter()
            .copied()
            .filter(|&j| j != from)
            .collect();
        if targets.is_empty() {
            continue;
        }
        let to = targets[suite.rng.gen_range(0..targets.len())];
        let after = before.with_move(player, to);

        let phi_before = potential(cf, &inst, &before).0;
        let phi_after = potential(cf, &inst, &after).0;
        let delta = &phi_before - &phi_after;

        let jobs_from = before.jobs_on(from);
        let lambda_from = cf
            .lambda_player(&inst, from, &jobs_from, player)
            .unwrap()
            .into_value();
        let jobs_to = after.jobs_on(to);
        let lambda_to = cf
            .lambda_player(&inst, to, &jobs_to, player)
            .unwrap()
            .into_value();
        let key_delta = &lambda_from - &lambda_to;

        suite.check(delta == key_delta, || {
            format!(
                "case {case}: {cf}: delta Phi = {delta} != Lambda difference {key_delta}"
            )
        });
        // Completion-time change sign: powers are Lambda / w_u with w_u
        // fixed, so the sign is the sign of the Lambda difference.
        let ct_before = &lambda_from / inst.min_weight(player);
        let ct_after = &lambda_to / inst.min_weight(player);
        let sign_matches = delta.cmp(&Rat::zero()) == ct_before.cmp(&ct_after);
        suite.check(sign_matches, || {
            format!("case {case}: {cf}: sign(delta Phi) != sign of completion-time change")
        });
        case += 1;
    }
}

/// DCOORD feasibility: Lambda_{u,j}(N_j) >= w_u * L_j(N_j)^d for every
/// player (equivalently P(u, N_j) >= L_j(N_j)).
fn feasibility(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 500);
    let degrees = degrees_or(cfg, &[2, 3]);
    for case in 0..cases {
        let d = degrees[case % degrees.len()];
        let inst = random_instance(&mut suite.rng, 5, 3, 10);
        let asg = random_assignment(&mut suite.rng, &inst);
        let mut ok = true;
        for player in 0..inst.jobs() {
            let machine = asg.machine(player);
            let jobs = asg.jobs_on(machine);
            let lambda = lambda_player_dcoord(d, &inst, machine, &jobs, player)
                .unwrap()
                .into_value();
            let load = inst.machine_load(&asg, machine);
            if lambda < inst.min_weight(player) * rat_pow(&load, d) {
                ok = false;
            }
        }
        suite.check(ok, || format!("case {case}: d={d}: completion below load"));
    }
}

/// Swapping two jobs with identical weight rows permutes nothing observable:
/// completion times of the pair swap and everyone else's are unchanged.
fn anonymity(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 200);
    let degrees = degrees_or(cfg, &[2, 3]);
    for case in 0..cases {
        let d = degrees[case % degrees.len()];
        let family = mechanism_family(d, false);
        let cf = &family[case % family.len()];
        let base = random_instance(&mut suite.rng, 4, 3, 10);
        // Duplicate job 0's row as a new lastjob.
        let mut rows = base.rows().to_vec();
        rows.push(rows[0].clone());
        let inst = Instance::new(rows).unwrap();
        let twin_a = 0;
        let twin_b = inst.jobs() - 1;
        let asg = random_assignment(&mut suite.rng, &inst);
        let mut swapped_of = asg.machine_of().to_vec();
        swapped_of.swap(twin_a, twin_b);
        let swapped = Assignment::new(swapped_of, &inst).unwrap();

        let mut ok = true;
        for u in 0..inst.jobs() {
            let v = if u == twin_a {
                twin_b
            } else if u == twin_b {
                twin_a
            } else {
                u
            };
            let p_orig = crate::mechanism::completion_time(cf, &inst, &asg, u).unwrap();
            let p_swap = crate::mechanism::completion_time(cf, &inst, &swapped, v).unwrap();
            if p_orig.power() != p_swap.power() {
                ok = false;
            }
        }
        suite.check(ok, || {
            format!("case {case}: {cf}: swapping identical jobs changed a completion time")
        });
    }
}

/// Machines attaining the player's minimum deviation key, ascending.
fn argmin_machines(
    mech: &Mechanism,
    inst: &Instance,
    asg: &Assignment,
    player: usize,
) -> Vec<usize> {
    let mut best: Option<Rat> = None;
    let mut argmin = Vec::new();
    for &j in inst.available_machines(player) {
        let key = mech.deviation_key(inst, asg, player, j).unwrap();
        match &best {
            Some(b) if key > *b => {}
            Some(b) if key == *b => argmin.push(j),
            _ => {
                best = Some(key);
                argmin = vec![j];
            }
        }
    }
    argmin
}

/// Multiplying every weight by c > 0 multiplies every Lambda value and
/// deviation key by exactly c^(d+1); argmin machine sets and the full
/// equilibrium list are unchanged.
fn scale_invariance(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 60);
    let degrees = degrees_or(cfg, &[2, 3]);
    let factors = [
        Rat::from_integer(BigInt::from(2)),
        Rat::from_integer(BigInt::from(3)),
        Rat::new(BigInt::one(), BigInt::from(2)),
    ];
    let opts = AnalysisOptions {
        parallel: cfg.parallel,
        ..Default::default()
    };
    for case in 0..cases {
        let d = degrees[case % degrees.len()];
        let family = mechanism_family(d, false);
        let cf = &family[case % family.len()];
        let mech = Mechanism::Coordination(cf.clone());
        let inst = random_instance(&mut suite.rng, 4, 3, 10);
        let c = &factors[case % factors.len()];
        let scaled = inst.scaled_by(c).unwrap();
        let scaled_mech = Mechanism::Coordination(cf.clone());
        let asg = random_assignment(&mut suite.rng, &inst);
        let c_power = rat_pow(c, d + 1);

        let mut ok = true;
        for player in 0..inst.jobs() {
            for &j in inst.available_machines(player) {
                let key = mech.deviation_key(&inst, &asg, player, j).unwrap();
                let key_scaled = scaled_mech.deviation_key(&scaled, &asg, player, j).unwrap();
                if key_scaled != &key * &c_power {
                    ok = false;
                }
            }
            // Argmin machine sets recomputed independently on both games.
            let argmin_orig = argmin_machines(&mech, &inst, &asg, player);
            let argmin_scaled = argmin_machines(&scaled_mech, &scaled, &asg, player);
            if argmin_orig != argmin_scaled {
                ok = false;
            }
        }

        let eq_orig = enumerate_equilibria(&mech, &inst, &opts).unwrap();
        let eq_scaled = enumerate_equilibria(&mech, &scaled, &opts).unwrap();
        let lists_equal = eq_orig.len() == eq_scaled.len()
            && eq_orig
                .iter()
                .zip(&eq_scaled)
                .all(|(a, b)| a.machine_of() == b.machine_of());
        suite.check(ok && lists_equal, || {
            format!("case {case}: {cf} scaling by {c} changed the game")
        });
    }
}

/// Equilibrium existence, dynamics convergence from distinct starts, and
/// consistency of converged points with the enumerated equilibrium list.
fn dynamics_suite(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 100);
    let degrees = degrees_or(cfg, &[2, 3]);
    let opts = AnalysisOptions {
        parallel: cfg.parallel,
        ..Default::default()
    };
    for case in 0..cases {
        let d = degrees[case % degrees.len()];
        let cf = if case % 2 == 0 {
            CoefficientFunction::dcoord(d).unwrap()
        } else {
            CoefficientFunction::ccoord(d).unwrap()
        };
        let mech = Mechanism::Coordination(cf.clone());
        let inst = random_instance(&mut suite.rng, 5, 3, 10);
        let equilibria = enumerate_equilibria(&mech, &inst, &opts).unwrap();
        suite.check(!equilibria.is_empty(), || {
            format!("case {case}: {cf}: potential game with no equilibrium")
        });

        // Finite improvement property: m^n * n moves always suffice.
        let max_iter = (inst.machines() as u64)
            .pow(inst.jobs() as u32)
            .saturating_mul(inst.jobs() as u64) as usize;
        let starts = [
            StartKind::MinWeight,
            StartKind::FirstAvailable,
            StartKind::Random(cfg.seed.wrapping_add(case as u64)),
        ];
        for start_kind in starts {
            let start = starting_assignment(&inst, start_kind);
            let (trace, final_asg) =
                run_dynamics(&cf, &inst, start, MoveOrder::RoundRobin, max_iter);
            let monotone = trace
                .moves
                .iter()
                .all(|mv| mv.phi_after < mv.phi_before);
            let listed = equilibria
                .iter()
                .any(|eq| eq.machine_of() == final_asg.machine_of());
            let sound = is_equilibrium(&mech, &inst, &final_asg);
            suite.check(trace.converged && monotone && listed && sound, || {
                format!(
                    "case {case}: {cf} from {start_kind:?}: converged={} monotone={monotone} listed={listed} sound={sound}",
                    trace.converged
                )
            });
        }
    }
}

/// Full report pipeline: every DCOORD bound check passes and the ratio
/// ordering invariants hold.
fn load_bounds(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 100);
    let degrees = degrees_or(cfg, &[2, 3]);
    let opts = AnalysisOptions {
        parallel: cfg.parallel,
        ..Default::default()
    };
    for case in 0..cases {
        let d = degrees[case % degrees.len()];
        let mech = Mechanism::Coordination(CoefficientFunction::dcoord(d).unwrap());
        let inst = random_instance(&mut suite.rng, 5, 3, 10);
        let report = poa_pos_report(&mech, &inst, &opts).unwrap();
        let all_pass = report.bound_checks.iter().all(|c| c.pass);
        let poa = report.poa_index.expect("equilibria exist");
        let pos = report.pos_index.expect("equilibria exist");
        let ordered = report.equilibria[poa].max_ct_power >= report.equilibria[pos].max_ct_power;
        // Feasibility gives max completion time >= makespan >= opt.
        let opt_power = rat_pow(&report.opt_makespan, d);
        let at_least_one = report.equilibria[pos].max_ct_power >= opt_power;
        suite.check(all_pass && ordered && at_least_one, || {
            format!(
                "case {case}: d={d}: checks={all_pass} ordered={ordered} ratio>=1:{at_least_one}"
            )
        });
    }
}

/// serialize(parse(serialize(x))) is byte-identical across generated and
/// handcrafted instances.
fn roundtrip(suite: &mut Suite, cfg: &SuiteConfig) {
    let cases = cases_or(cfg, 100);
    let kinds = [
        GeneratorKind::UniformInteger,
        GeneratorKind::RestrictedRelated,
        GeneratorKind::TwoValues,
    ];
    for case in 0..cases {
        let inst = if case % 10 == 0 {
            random_instance(&mut suite.rng, 5, 4, 12)
        } else {
            let kind = kinds[case % kinds.len()];
            let seed = suite.rng.gen::<u64>();
            generate_instance(kind, 4, 3, seed, GeneratorParams { lo: 1, hi: 10 }).unwrap()
        };
        let text = io::instance_to_json(&inst, None);
        let parsed = io::instance_from_json(&text).unwrap();
        let text2 = io::instance_to_json(&parsed, None);
        suite.check(parsed == inst && text == text2, || {
            format!("case {case}: roundtrip mismatch")
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> SuiteConfig {
        SuiteConfig {
            cases: Some(20),
            ..Default::default()
        }
    }

    #[test]
    fn all_suites_pass_at_reduced_size() {
        for outcome in run_all(&quick_cfg()) {
            assert!(
                outcome.passed(),
                "suite {} failed: {:?}",
                outcome.name,
                outcome.failures
            );
            assert!(outcome.cases > 0);
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nonsense", &quick_cfg()).is_err());
    }

    #[test]
    fn corrupted_gamma_fails_the_potential_suites() {
        let cfg = SuiteConfig {
            cases: Some(40),
            corrupt_gamma: true,
            ..Default::default()
        };
        let decomposition = run_suite("decomposition", &cfg).unwrap();
        assert!(!decomposition.passed(), "corruption went unnoticed");
        let potential = run_suite("potential-sign", &cfg).unwrap();
        assert!(!potential.passed(), "corruption went unnoticed");
        let zeros = run_suite("zero-invariance", &cfg).unwrap();
        assert!(!zeros.passed(), "corruption went unnoticed");
    }

    #[test]
    fn suites_are_seed_deterministic() {
        let a = run_suite("sandwich", &quick_cfg()).unwrap();
        let b = run_suite("sandwich", &quick_cfg()).unwrap();
        assert_eq!(a.cases, b.cases);
        assert_eq!(a.failures, b.failures);
    }

    #[test]
    fn degree_override_narrows_the_sweep() {
        let cfg = SuiteConfig {
            cases: Some(10),
            degrees: Some(vec![4]),
            ..Default::default()
        };
        let outcome = run_suite("sandwich", &cfg).unwrap();
        assert!(outcome.passed());
    }
}
