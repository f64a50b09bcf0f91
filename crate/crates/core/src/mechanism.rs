//! Coordination mechanisms: coefficient functions and Lambda-function
//! evaluation.
//!
//! A mechanism of degree d >= 2 is identified by a coefficient function
//! gamma over integer multisets summing to d+1. The machine-local value
//!
//! Lambda_j(U)      = sum over ordered tuples (t_1..t_l), sum = d+1, of
//!                    gamma({t_1..t_l}) * prod_k w_{u_k,j}^{t_k}
//! Lambda_{u,j}(U)  = the same sum restricted to tuples with t_u >= 1
//!
//! drives everything: player u on machine j experiences completion time
//! (Lambda_{u,j}(N_j) / w_u)^(1/d). Both sums are evaluated two ways: a
//! brute-force enumeration over compositions (the reference oracle, also the
//! production path for custom tables) and closed forms for the two built-in
//! coefficient functions. All values are exact rationals in the instance's
//! original units; comparisons never touch d-th roots.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::Error;
use crate::instance::{Assignment, Instance};
use crate::numeric::{decimal_root, rat_pow, root_to_f64, Rat};

/// Mechanisms require degree at least 2.
pub const MIN_DEGREE: u32 = 2;

/// Default degree rule: max(2, ceil(log2 m)).
pub fn default_degree(machines: usize) -> u32 {
    let m = machines.max(1);
    let ceil_log2 = if m <= 1 {
        0
    } else {
        usize::BITS - (m - 1).leading_zeros()
    };
    ceil_log2.max(MIN_DEGREE)
}

fn factorial(k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

/// All partitions of `total` into positive parts, each partition sorted
/// descending, listed in reverse lexicographic order.
pub fn partitions(total: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        let top = remaining.min(max_part);
        for part in (1..=top).rev() {
            cur.push(part);
            rec(remaining - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, total, &mut Vec::new(), &mut out);
    out
}

/// Canonical multiset key: the nonzero parts, sorted descending. Coefficient
/// functions are invariant to zeros, so this is the lookup form.
fn canonical_parts(parts: &[u32]) -> Vec<u32> {
    let mut key: Vec<u32> = parts.iter().copied().filter(|&t| t > 0).collect();
    key.sort_unstable_by(|a, b| b.cmp(a));
    key
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum CoefKind {
    Dcoord,
    Ccoord,
    Custom,
}

/// A coefficient function gamma: degree d plus one non-negative rational per
/// partition of d+1.
///
/// The table is materialized at construction for every kind (there are only
/// p(d+1) partitions), premultiplied to a common integer denominator so the
/// enumeration oracle can run on plain big integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientFunction {
    d: u32,
    kind: CoefKind,
    gamma_num: BTreeMap<Vec<u32>, BigInt>,
    gamma_den: BigInt,
    /// Test fixture: when set, gamma pretends to depend on padded zeros,
    /// which silently breaks the decomposition identity behind the potential
    /// function. Never set by any public constructor.
    corrupt_zero_sensitivity: bool,
}

impl CoefficientFunction {
    /// gamma({t_1..t_l}) = 1 if some t_i = d+1, else d!*d / (t_1!*...*t_l!).
    pub fn dcoord(d: u32) -> Result<Self, Error> {
        Self::check_degree(d)?;
        let dfac_d = factorial(d) * BigInt::from(d);
        let table = partitions(d + 1)
            .into_iter()
            .map(|p| {
                let gamma = if p == [d + 1] {
                    Rat::one()
                } else {
                    let den: BigInt = p.iter().map(|&t| factorial(t)).product();
                    Rat::new(dfac_d.clone(), den)
                };
                (p, gamma)
            })
            .collect();
        Self::from_table(d, CoefKind::Dcoord, table)
    }

    /// gamma(A) = d! for every multiset A.
    pub fn ccoord(d: u32) -> Result<Self, Error> {
        Self::check_degree(d)?;
        let dfac = Rat::from_integer(factorial(d));
        let table = partitions(d + 1)
            .into_iter()
            .map(|p| (p, dfac.clone()))
            .collect();
        Self::from_table(d, CoefKind::Ccoord, table)
    }

    /// A custom table. Keys are canonicalized (zeros stripped, sorted
    /// descending); the table must cover every partition of d+1 exactly once
    /// with a non-negative value.
    pub fn custom(d: u32, table: Vec<(Vec<u32>, Rat)>) -> Result<Self, Error> {
        Self::check_degree(d)?;
        let mut canon: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (parts, gamma) in table {
            let key = canonical_parts(&parts);
            let sum: u32 = key.iter().sum();
            if sum != d + 1 {
                return Err(Error::InvalidMechanism(format!(
                    "table key {parts:?} sums to {sum}, expected {}",
                    d + 1
                )));
            }
            if gamma.is_negative() {
                return Err(Error::InvalidMechanism(format!(
                    "gamma({key:?}) = {gamma} is negative"
                )));
            }
            if canon.insert(key.clone(), gamma).is_some() {
                return Err(Error::InvalidMechanism(format!(
                    "duplicate table entry for multiset {key:?}"
                )));
            }
        }
        for p in partitions(d + 1) {
            if !canon.contains_key(&p) {
                return Err(Error::InvalidMechanism(format!(
                    "table is missing partition {p:?} of {}",
                    d + 1
                )));
            }
        }
        Self::from_table(d, CoefKind::Custom, canon.into_iter().collect::<Vec<_>>())
    }

    fn check_degree(d: u32) -> Result<(), Error> {
        if d < MIN_DEGREE {
            return Err(Error::InvalidMechanism(format!(
                "degree must be at least {MIN_DEGREE}, got {d}"
            )));
        }
        Ok(())
    }

    fn from_table(d: u32, kind: CoefKind, table: Vec<(Vec<u32>, Rat)>) -> Result<Self, Error> {
        let mut gamma_den = BigInt::one();
        for (_, gamma) in &table {
            gamma_den = gamma_den.lcm(gamma.denom());
        }
        let gamma_num = table
            .into_iter()
            .map(|(p, gamma)| {
                let scaled = &gamma * Rat::from_integer(gamma_den.clone());
                debug_assert!(scaled.denom().is_one());
                (p, scaled.to_integer())
            })
            .collect();
        Ok(CoefficientFunction {
            d,
            kind,
            gamma_num,
            gamma_den,
            corrupt_zero_sensitivity: false,
        })
    }

    /// Returns a copy whose gamma is deliberately NOT invariant to zeros
    /// (each padded zero adds 1 to the coefficient). Negative control for
    /// the potential-function test suites.
    #[doc(hidden)]
    pub fn corrupted_zero_sensitive(mut self) -> Self {
        self.corrupt_zero_sensitivity = true;
        self
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn is_dcoord(&self) -> bool {
        self.kind == CoefKind::Dcoord
    }

    pub fn is_ccoord(&self) -> bool {
        self.kind == CoefKind::Ccoord
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            CoefKind::Dcoord => "dcoord",
            CoefKind::Ccoord => "ccoord",
            CoefKind::Custom => "custom",
        }
    }

    /// The table as exact rationals, keyed by partition of d+1.
    pub fn table(&self) -> Vec<(Vec<u32>, Rat)> {
        self.gamma_num
            .iter()
            .map(|(p, num)| (p.clone(), Rat::new(num.clone(), self.gamma_den.clone())))
            .collect()
    }

    /// Evaluates gamma on a multiset (zeros permitted; the sum of the parts
    /// must be d+1).
    pub fn gamma(&self, multiset: &[u32]) -> Result<Rat, Error> {
        let sum: u32 = multiset.iter().sum();
        if sum != self.d + 1 {
            return Err(Error::InvalidMechanism(format!(
                "gamma argument sums to {sum}, expected {}",
                self.d + 1
            )));
        }
        let key = canonical_parts(multiset);
        let zeros = multiset.len() - key.len();
        let num = self.gamma_num.get(&key).expect("table is total");
        let mut value = Rat::new(num.clone(), self.gamma_den.clone());
        if self.corrupt_zero_sensitivity {
            value += Rat::from_integer(BigInt::from(zeros));
        }
        Ok(value)
    }

    /// Integer-scaled gamma lookup used by the enumeration oracle.
    fn gamma_num_for_tuple(&self, tuple: &[u32]) -> BigInt {
        let key = canonical_parts(tuple);
        let mut num = self.gamma_num.get(&key).expect("table is total").clone();
        if self.corrupt_zero_sensitivity {
            let zeros = tuple.len() - key.len();
            num += BigInt::from(zeros) * &self.gamma_den;
        }
        num
    }

    /// Lambda_j(U), production path: closed form for the built-in kinds,
    /// enumeration oracle for custom tables.
    pub fn lambda_set(
        &self,
        inst: &Instance,
        machine: usize,
        jobs: &[usize],
    ) -> Result<LambdaValue, Error> {
        if self.corrupt_zero_sensitivity {
            return lambda_set_bruteforce(self, inst, machine, jobs);
        }
        match self.kind {
            CoefKind::Dcoord => lambda_set_dcoord(self.d, inst, machine, jobs),
            CoefKind::Ccoord => lambda_set_ccoord(self.d, inst, machine, jobs),
            CoefKind::Custom => lambda_set_bruteforce(self, inst, machine, jobs),
        }
    }

    /// Lambda_{u,j}(U), production path.
    pub fn lambda_player(
        &self,
        inst: &Instance,
        machine: usize,
        jobs: &[usize],
        player: usize,
    ) -> Result<LambdaValue, Error> {
        if self.corrupt_zero_sensitivity {
            return lambda_player_bruteforce(self, inst, machine, jobs, player);
        }
        match self.kind {
            CoefKind::Dcoord => lambda_player_dcoord(self.d, inst, machine, jobs, player),
            CoefKind::Ccoord => lambda_player_ccoord(self.d, inst, machine, jobs, player),
            CoefKind::Custom => lambda_player_bruteforce(self, inst, machine, jobs, player),
        }
    }
}

impl fmt::Display for CoefficientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(d={})", self.kind_name(), self.d)
    }
}

/// An exact Lambda-function value. The comparison currency for every game
/// decision: x -> x^(1/d) is strictly monotone and w_u is fixed per player,
/// so comparing LambdaValues is equivalent to comparing completion times.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LambdaValue(Rat);

impl LambdaValue {
    fn new(value: Rat) -> Self {
        debug_assert!(!value.is_negative(), "Lambda values are non-negative");
        LambdaValue(value)
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn into_value(self) -> Rat {
        self.0
    }
}

impl fmt::Display for LambdaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::numeric::format_rational(&self.0))
    }
}

fn scaled_weights_on(
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
) -> Result<Vec<BigInt>, Error> {
    jobs.iter()
        .map(|&job| {
            inst.scaled_weight(job, machine)
                .cloned()
                .ok_or(Error::Unavailable { job, machine })
        })
        .collect()
}

fn rational_weights_on(
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
) -> Result<Vec<Rat>, Error> {
    jobs.iter()
        .map(|&job| inst.weight_of(job, machine).cloned())
        .collect()
}

fn position_of(jobs: &[usize], player: usize) -> Result<usize, Error> {
    jobs.iter()
        .position(|&u| u == player)
        .ok_or(Error::JobNotInSet { job: player })
}

/// Runs `f` on every ordered tuple (t_1..t_l) of non-negative integers with
/// sum `total` and t_i >= mins[i].
fn for_each_composition(total: u32, mins: &[u32], f: &mut impl FnMut(&[u32])) {
    fn rec(
        pos: usize,
        remaining: u32,
        mins: &[u32],
        min_suffix: &[u32],
        buf: &mut Vec<u32>,
        f: &mut impl FnMut(&[u32]),
    ) {
        if pos == mins.len() {
            if remaining == 0 {
                f(buf);
            }
            return;
        }
        let reserve = min_suffix[pos + 1];
        if remaining < mins[pos] + reserve {
            return;
        }
        for t in mins[pos]..=(remaining - reserve) {
            buf.push(t);
            rec(pos + 1, remaining - t, mins, min_suffix, buf, f);
            buf.pop();
        }
    }
    // min_suffix[i] = sum of mins[i..]
    let mut min_suffix = vec![0u32; mins.len() + 1];
    for i in (0..mins.len()).rev() {
        min_suffix[i] = min_suffix[i + 1] + mins[i];
    }
    if mins.is_empty() {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    rec(0, total, mins, &min_suffix, &mut Vec::with_capacity(mins.len()), f);
}

/// Shared core of the two brute-force entry points. Enumerates compositions
/// of d+1 over the job tuple at the instance's integer scale and divides the
/// scaling back out once at the end.
fn lambda_oracle(
    cf: &CoefficientFunction,
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
    require: Option<usize>,
) -> Result<LambdaValue, Error> {
    let weights = scaled_weights_on(inst, machine, jobs)?;
    let len = weights.len();
    let degree_plus = cf.d + 1;
    if len == 0 {
        // Empty sum: no tuples exist for d+1 > 0.
        return Ok(LambdaValue::new(Rat::zero()));
    }
    // pows[k][t] = w_k^t
    let pows: Vec<Vec<BigInt>> = weights
        .iter()
        .map(|w| {
            let mut row = Vec::with_capacity(degree_plus as usize + 1);
            row.push(BigInt::one());
            for t in 1..=degree_plus {
                let prev = &row[(t - 1) as usize];
                row.push(prev * w);
            }
            row
        })
        .collect();
    let mut mins = vec![0u32; len];
    if let Some(i) = require {
        mins[i] = 1;
    }
    let mut acc = BigInt::zero();
    for_each_composition(degree_plus, &mins, &mut |tuple| {
        let mut term = cf.gamma_num_for_tuple(tuple);
        for (k, &t) in tuple.iter().enumerate() {
            if t > 0 {
                term *= &pows[k][t as usize];
            }
        }
        acc += term;
    });
    // acc is in units of gamma_den * scale^(d+1).
    let unscale = &cf.gamma_den * inst.scale().pow(degree_plus);
    Ok(LambdaValue::new(Rat::new(acc, unscale)))
}

/// Lambda_j(U) by enumeration over all compositions of d+1 into |U| ordered
/// parts. Reference oracle for the closed forms, production path for custom
/// coefficient tables.
pub fn lambda_set_bruteforce(
    cf: &CoefficientFunction,
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
) -> Result<LambdaValue, Error> {
    lambda_oracle(cf, inst, machine, jobs, None)
}

/// Lambda_{u,j}(U): the same enumeration restricted to tuples where the
/// player's exponent is at least 1.
pub fn lambda_player_bruteforce(
    cf: &CoefficientFunction,
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
    player: usize,
) -> Result<LambdaValue, Error> {
    let pos = position_of(jobs, player)?;
    lambda_oracle(cf, inst, machine, jobs, Some(pos))
}

/// DCOORD closed form: Lambda_j(U) = d/(d+1) * L^(d+1) + 1/(d+1) * sum w^(d+1).
pub fn lambda_set_dcoord(
    d: u32,
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
) -> Result<LambdaValue, Error> {
    let weights = rational_weights_on(inst, machine, jobs)?;
    let load: Rat = weights.iter().cloned().sum();
    let power_sum: Rat = weights.iter().map(|w| rat_pow(w, d + 1)).sum();
    let d_rat = Rat::from_integer(BigInt::from(d));
    let dp1_rat = Rat::from_integer(BigInt::from(d + 1));
    let value = &d_rat / &dp1_rat * rat_pow(&load, d + 1) + power_sum / &dp1_rat;
    Ok(LambdaValue::new(value))
}

/// DCOORD closed form for a single player, from the decomposition
/// Lambda_{u,j}(U) = Lambda_j(U) - Lambda_j(U \ {u}):
/// d/(d+1) * (L^(d+1) - (L - w_u)^(d+1)) + 1/(d+1) * w_u^(d+1).
pub fn lambda_player_dcoord(
    d: u32,
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
    player: usize,
) -> Result<LambdaValue, Error> {
    position_of(jobs, player)?;
    let weights = rational_weights_on(inst, machine, jobs)?;
    let load: Rat = weights.iter().cloned().sum();
    let w = inst.weight_of(player, machine)?;
    let d_rat = Rat::from_integer(BigInt::from(d));
    let dp1_rat = Rat::from_integer(BigInt::from(d + 1));
    let without = &load - w;
    let value = &d_rat / &dp1_rat * (rat_pow(&load, d + 1) - rat_pow(&without, d + 1))
        + rat_pow(w, d + 1) / &dp1_rat;
    Ok(LambdaValue::new(value))
}

/// Complete homogeneous symmetric polynomials h_0..h_deg of the given values,
/// by the prefix recurrence h_k(x_1..x_i) = h_k(x_1..x_{i-1}) + x_i * h_{k-1}(x_1..x_i).
fn complete_homogeneous(values: &[Rat], deg: u32) -> Vec<Rat> {
    let mut h = vec![Rat::zero(); deg as usize + 1];
    h[0] = Rat::one();
    for x in values {
        for k in 1..=deg as usize {
            let inc = x * &h[k - 1];
            h[k] += inc;
        }
    }
    h
}

/// Psi_j(U) = d! * h_d(w_{u,j} : u in U): the sum of all degree-d monomials,
/// each with coefficient d!.
pub fn psi_ccoord(
    d: u32,
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
) -> Result<LambdaValue, Error> {
    let weights = rational_weights_on(inst, machine, jobs)?;
    if weights.is_empty() {
        return Ok(LambdaValue::new(Rat::zero()));
    }
    let h = complete_homogeneous(&weights, d);
    Ok(LambdaValue::new(
        Rat::from_integer(factorial(d)) * &h[d as usize],
    ))
}

/// CCOORD: Lambda_{u,j}(U) = w_{u,j} * Psi_j(U).
pub fn lambda_player_ccoord(
    d: u32,
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
    player: usize,
) -> Result<LambdaValue, Error> {
    position_of(jobs, player)?;
    let w = inst.weight_of(player, machine)?;
    let psi = psi_ccoord(d, inst, machine, jobs)?;
    Ok(LambdaValue::new(w * psi.value()))
}

/// CCOORD: Lambda_j(U) = d! * h_{d+1}(w), the all-(d!) coefficient sum over
/// every degree-(d+1) monomial.
pub fn lambda_set_ccoord(
    d: u32,
    inst: &Instance,
    machine: usize,
    jobs: &[usize],
) -> Result<LambdaValue, Error> {
    let weights = rational_weights_on(inst, machine, jobs)?;
    if weights.is_empty() {
        return Ok(LambdaValue::new(Rat::zero()));
    }
    let h = complete_homogeneous(&weights, d + 1);
    Ok(LambdaValue::new(
        Rat::from_integer(factorial(d)) * &h[(d + 1) as usize],
    ))
}

/// A completion time P(u, N_j) = (Lambda_{u,j}(N_j) / w_u)^(1/d), stored as
/// its exact d-th power. Ordering two completion times of the same degree
/// compares the powers; the real root only exists for display.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionTime {
    power: Rat,
    degree: u32,
}

impl CompletionTime {
    pub fn new(power: Rat, degree: u32) -> Self {
        debug_assert!(!power.is_negative());
        debug_assert!(degree >= 1);
        CompletionTime { power, degree }
    }

    /// The exact value of P^d (i.e. Lambda_{u,j}(N_j) / w_u).
    pub fn power(&self) -> &Rat {
        &self.power
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Real d-th root (deterministic 17-digit decimal, parsed).
    pub fn approx(&self) -> f64 {
        root_to_f64(&self.power, self.degree).expect("power is non-negative")
    }

    /// Decimal rendering at `sig` significant digits.
    pub fn decimal(&self, sig: usize) -> String {
        decimal_root(&self.power, self.degree, sig).expect("power is non-negative")
    }
}

impl PartialOrd for CompletionTime {
    /// Comparable only within a game of the same degree.
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if self.degree != other.degree {
            return None;
        }
        Some(self.power.cmp(&other.power))
    }
}

/// The completion time of `player` under `asg`.
pub fn completion_time(
    cf: &CoefficientFunction,
    inst: &Instance,
    asg: &Assignment,
    player: usize,
) -> Result<CompletionTime, Error> {
    let machine = asg.machine(player);
    let jobs = asg.jobs_on(machine);
    let lambda = cf.lambda_player(inst, machine, &jobs, player)?;
    let power = lambda.into_value() / inst.min_weight(player);
    Ok(CompletionTime::new(power, cf.degree()))
}

/// Lambda_{u,target}(N_target plus u): the exact key whose comparison across
/// machines is equivalent to comparing the player's completion time after
/// deviating there (fixed w_u, monotone d-th root). If the player already
/// sits on `target`, the set is unchanged.
pub fn deviation_key(
    cf: &CoefficientFunction,
    inst: &Instance,
    asg: &Assignment,
    player: usize,
    target: usize,
) -> Result<LambdaValue, Error> {
    if !inst.is_available(player, target) {
        return Err(Error::Unavailable {
            job: player,
            machine: target,
        });
    }
    let mut jobs = asg.jobs_on(target);
    if !jobs.contains(&player) {
        jobs.push(player);
    }
    cf.lambda_player(inst, target, &jobs, player)
}

/// A scheduling policy to simulate: a coordination mechanism in M(d), or the
/// trivial makespan baseline (completion time = machine load) kept around
/// for comparison output only. The baseline is not in M(d): it has no
/// potential function and is excluded from the Lambda invariant suites.
#[derive(Debug, Clone, PartialEq)]
pub enum Mechanism {
    Coordination(CoefficientFunction),
    MakespanBaseline,
}

impl Mechanism {
    pub fn coordination(&self) -> Option<&CoefficientFunction> {
        match self {
            Mechanism::Coordination(cf) => Some(cf),
            Mechanism::MakespanBaseline => None,
        }
    }

    /// Root degree relating completion-time powers to completion times.
    pub fn degree(&self) -> u32 {
        match self {
            Mechanism::Coordination(cf) => cf.degree(),
            Mechanism::MakespanBaseline => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Mechanism::Coordination(cf) => cf.to_string(),
            Mechanism::MakespanBaseline => "makespan-baseline".to_string(),
        }
    }

    /// Exact deviation key for `player` moving to `target` (or staying).
    /// Lower key = lower completion time after the move.
    pub fn deviation_key(
        &self,
        inst: &Instance,
        asg: &Assignment,
        player: usize,
        target: usize,
    ) -> Result<Rat, Error> {
        match self {
            Mechanism::Coordination(cf) => {
                Ok(deviation_key(cf, inst, asg, player, target)?.into_value())
            }
            Mechanism::MakespanBaseline => {
                let w = inst.weight_of(player, target)?;
                let mut load = inst.machine_load(asg, target);
                if asg.machine(player) != target {
                    load += w;
                }
                Ok(load)
            }
        }
    }

    /// The current completion time of `player`, as an exact degree()-th
    /// power wrapped in a CompletionTime.
    pub fn completion_time(
        &self,
        inst: &Instance,
        asg: &Assignment,
        player: usize,
    ) -> Result<CompletionTime, Error> {
        match self {
            Mechanism::Coordination(cf) => completion_time(cf, inst, asg, player),
            Mechanism::MakespanBaseline => {
                let load = inst.machine_load(asg, asg.machine(player));
                Ok(CompletionTime::new(load, 1))
            }
        }
    }
}
