//! Scheduling instances, assignments, and machine-load vectors.
//!
//! Processing times are exact rationals; a job that cannot run on a machine
//! carries the [`Weight::Unavailable`] sentinel instead of a large number, so
//! infinite weights never leak into any arithmetic. Per-job minimum weights
//! are always recomputed from the matrix, never trusted from input.

use num::{BigInt, Integer, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::numeric::{decimal_root, rat_pow, Rat};

/// A processing time: a positive rational, or unavailable (the job cannot
/// run on that machine at all).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weight {
    Finite(Rat),
    Unavailable,
}

impl Weight {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Weight::Finite(r) => Some(r),
            Weight::Unavailable => None,
        }
    }

    pub fn is_available(&self) -> bool {
        matches!(self, Weight::Finite(_))
    }
}

/// An n-jobs x m-machines matrix of processing times.
///
/// Invariants enforced at construction: n >= 1, m >= 1, every finite weight
/// is positive, and every job is available on at least one machine.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    m: usize,
    weights: Vec<Vec<Weight>>,
    min_weight: Vec<Rat>,
    available: Vec<Vec<usize>>,
    scale: BigInt,
    scaled: Vec<Vec<Option<BigInt>>>,
}

impl Instance {
    pub fn new(weights: Vec<Vec<Weight>>) -> Result<Self, Error> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidInstance("need at least one job".into()));
        }
        let m = weights[0].len();
        if m == 0 {
            return Err(Error::InvalidInstance("need at least one machine".into()));
        }
        let mut min_weight = Vec::with_capacity(n);
        let mut available = Vec::with_capacity(n);
        let mut scale = BigInt::one();
        for (u, row) in weights.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInstance(format!(
                    "job {u} has {} entries, expected {m}",
                    row.len()
                )));
            }
            let mut avail = Vec::new();
            let mut min: Option<&Rat> = None;
            for (j, w) in row.iter().enumerate() {
                if let Weight::Finite(r) = w {
                    if !r.is_positive() {
                        return Err(Error::InvalidInstance(format!(
                            "job {u} has non-positive weight {r} on machine {j}"
                        )));
                    }
                    avail.push(j);
                    scale = scale.lcm(r.denom());
                    if min.is_none_or(|cur| r < cur) {
                        min = Some(r);
                    }
                }
            }
            match min {
                Some(r) => min_weight.push(r.clone()),
                None => {
                    return Err(Error::InvalidInstance(format!(
                        "job {u} is unavailable on every machine"
                    )))
                }
            }
            available.push(avail);
        }
        let scale_rat = Rat::from_integer(scale.clone());
        let scaled = weights
            .iter()
            .map(|row| {
                row.iter()
                    .map(|w| {
                        w.finite().map(|r| {
                            let s = r * &scale_rat;
                            debug_assert!(s.denom().is_one());
                            s.to_integer()
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Instance {
            n,
            m,
            weights,
            min_weight,
            available,
            scale,
            scaled,
        })
    }

    /// Builds an all-available instance from integer weights (test and
    /// generator convenience).
    pub fn from_integers(rows: Vec<Vec<u64>>) -> Result<Self, Error> {
        let weights = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| Weight::Finite(Rat::from_integer(BigInt::from(v))))
                    .collect()
            })
            .collect();
        Self::new(weights)
    }

    pub fn jobs(&self) -> usize {
        self.n
    }

    pub fn machines(&self) -> usize {
        self.m
    }

    pub fn weight(&self, job: usize, machine: usize) -> &Weight {
        &self.weights[job][machine]
    }

    pub fn weight_of(&self, job: usize, machine: usize) -> Result<&Rat, Error> {
        self.weights[job][machine]
            .finite()
            .ok_or(Error::Unavailable { job, machine })
    }

    /// w_u: the minimum finite processing time of `job` over all machines.
    pub fn min_weight(&self, job: usize) -> &Rat {
        &self.min_weight[job]
    }

    /// Machines on which `job` can run, in ascending index order.
    pub fn available_machines(&self, job: usize) -> &[usize] {
        &self.available[job]
    }

    pub fn is_available(&self, job: usize, machine: usize) -> bool {
        self.weights[job][machine].is_available()
    }

    pub fn rows(&self) -> &[Vec<Weight>] {
        &self.weights
    }

    /// Common denominator multiplier: `weight * scale` is an integer for
    /// every finite weight.
    pub(crate) fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// Integer weight at the instance's common scale.
    pub(crate) fn scaled_weight(&self, job: usize, machine: usize) -> Option<&BigInt> {
        self.scaled[job][machine].as_ref()
    }

    /// Load of machine `j` under `asg`: the exact sum of the weights of the
    /// jobs assigned there.
    pub fn machine_load(&self, asg: &Assignment, machine: usize) -> Rat {
        let mut sum = Rat::zero();
        for (job, &mj) in asg.machine_of().iter().enumerate() {
            if mj == machine {
                sum += self.weights[job][machine]
                    .finite()
                    .expect("assignment validated against instance");
            }
        }
        sum
    }

    /// Returns an instance with every weight multiplied by `c > 0`.
    pub fn scaled_by(&self, c: &Rat) -> Result<Self, Error> {
        if !c.is_positive() {
            return Err(Error::InvalidInstance(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        let weights = self
            .weights
            .iter()
            .map(|row| {
                row.iter()
                    .map(|w| match w {
                        Weight::Finite(r) => Weight::Finite(r * c),
                        Weight::Unavailable => Weight::Unavailable,
                    })
                    .collect()
            })
            .collect();
        Self::new(weights)
    }
}

/// A pure strategy profile: one machine per job.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    machine_of: Vec<usize>,
}

impl Assignment {
    pub fn new(machine_of: Vec<usize>, inst: &Instance) -> Result<Self, Error> {
        if machine_of.len() != inst.jobs() {
            return Err(Error::InvalidAssignment(format!(
                "assignment has {} entries, instance has {} jobs",
                machine_of.len(),
                inst.jobs()
            )));
        }
        for (job, &machine) in machine_of.iter().enumerate() {
            if machine >= inst.machines() {
                return Err(Error::InvalidAssignment(format!(
                    "job {job} assigned to machine {machine}, only {} machines",
                    inst.machines()
                )));
            }
            if !inst.is_available(job, machine) {
                return Err(Error::InvalidAssignment(format!(
                    "job {job} assigned to machine {machine} where it is unavailable"
                )));
            }
        }
        Ok(Assignment { machine_of })
    }

    pub(crate) fn from_raw(machine_of: Vec<usize>) -> Self {
        Assignment { machine_of }
    }

    pub fn machine_of(&self) -> &[usize] {
        &self.machine_of
    }

    pub fn machine(&self, job: usize) -> usize {
        self.machine_of[job]
    }

    /// Jobs on machine `j`, ascending.
    pub fn jobs_on(&self, machine: usize) -> Vec<usize> {
        self.machine_of
            .iter()
            .enumerate()
            .filter(|(_, &mj)| mj == machine)
            .map(|(u, _)| u)
            .collect()
    }

    /// The induced partition (N_1, ..., N_m).
    pub fn machine_sets(&self, machines: usize) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); machines];
        for (job, &mj) in self.machine_of.iter().enumerate() {
            sets[mj].push(job);
        }
        sets
    }

    pub fn with_move(&self, job: usize, to: usize) -> Self {
        let mut machine_of = self.machine_of.clone();
        machine_of[job] = to;
        Assignment { machine_of }
    }
}

/// The vector (L_1, ..., L_m) of machine loads under some assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector {
    loads: Vec<Rat>,
}

impl LoadVector {
    pub fn new(loads: Vec<Rat>) -> Self {
        LoadVector { loads }
    }

    pub fn from_assignment(inst: &Instance, asg: &Assignment) -> Self {
        let mut loads = vec![Rat::zero(); inst.machines()];
        for (job, &mj) in asg.machine_of().iter().enumerate() {
            loads[mj] += inst
                .weight(job, mj)
                .finite()
                .expect("assignment validated against instance");
        }
        LoadVector { loads }
    }

    pub fn loads(&self) -> &[Rat] {
        &self.loads
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    /// Max load, exact.
    pub fn makespan(&self) -> Rat {
        self.loads
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// The exact p-th power of the p-norm: sum of loads[j]^p. All norm
    /// inequalities in this crate are tested on these powers so no roots are
    /// ever compared.
    pub fn p_norm_power(&self, p: u32) -> Rat {
        assert!(p >= 1, "p-norm requires p >= 1");
        self.loads.iter().map(|l| rat_pow(l, p)).sum()
    }

    /// The p-norm rendered to `sig` significant digits.
    pub fn p_norm_decimal(&self, p: u32, sig: usize) -> String {
        decimal_root(&self.p_norm_power(p), p, sig).expect("loads are non-negative")
    }

    /// The p-norm as f64 (display/plotting only).
    pub fn p_norm(&self, p: u32) -> f64 {
        crate::numeric::root_to_f64(&self.p_norm_power(p), p).expect("loads are non-negative")
    }
}

/// Instance generator families. These distributions are artifact choices for
/// experimentation, not part of any theoretical claim; reports record the
/// generator spec alongside its seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Every weight drawn uniformly from [lo, hi]; all machines available.
    UniformInteger,
    /// Related-machines flavor: job size in [lo, hi] times a per-machine
    /// integer slowness factor in [1, 4]; each job available on a random
    /// machine subset.
    RestrictedRelated,
    /// Every weight is lo or hi with equal probability.
    TwoValues,
}

impl GeneratorKind {
    pub fn parse(name: &str) -> Result<Self, Error> {
        match name {
            "uniform-integer" => Ok(GeneratorKind::UniformInteger),
            "restricted-related" => Ok(GeneratorKind::RestrictedRelated),
            "two-values" => Ok(GeneratorKind::TwoValues),
            other => Err(Error::UnknownGenerator(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::UniformInteger => "uniform-integer",
            GeneratorKind::RestrictedRelated => "restricted-related",
            GeneratorKind::TwoValues => "two-values",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    pub lo: u64,
    pub hi: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams { lo: 1, hi: 100 }
    }
}

const SLOWNESS_MAX: u64 = 4;
const AVAILABILITY_RETRIES: usize = 16;

/// Deterministic instance generation: the same (kind, n, m, seed, params)
/// always produces the same instance.
pub fn generate_instance(
    kind: GeneratorKind,
    n: usize,
    m: usize,
    seed: u64,
    params: GeneratorParams,
) -> Result<Instance, Error> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidInstance(
            "generator needs n >= 1 and m >= 1".into(),
        ));
    }
    if params.lo < 1 || params.lo > params.hi {
        return Err(Error::InvalidInstance(format!(
            "generator range [{}, {}] must satisfy 1 <= lo <= hi",
            params.lo, params.hi
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n);
    match kind {
        GeneratorKind::UniformInteger => {
            for _ in 0..n {
                rows.push((0..m).map(|_| rng.gen_range(params.lo..=params.hi)).collect());
            }
            Instance::from_integers(rows)
        }
        GeneratorKind::TwoValues => {
            for _ in 0..n {
                rows.push(
                    (0..m)
                        .map(|_| if rng.gen_bool(0.5) { params.lo } else { params.hi })
                        .collect(),
                );
            }
            Instance::from_integers(rows)
        }
        GeneratorKind::RestrictedRelated => {
            let slowness: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=SLOWNESS_MAX)).collect();
            let mut weights = Vec::with_capacity(n);
            for _ in 0..n {
                let size = rng.gen_range(params.lo..=params.hi);
                let mut mask: Vec<bool> = Vec::new();
                for attempt in 0..=AVAILABILITY_RETRIES {
                    mask = (0..m).map(|_| rng.gen_bool(0.5)).collect();
                    if mask.iter().any(|&b| b) || attempt == AVAILABILITY_RETRIES {
                        break;
                    }
                }
                if !mask.iter().any(|&b| b) {
                    mask[rng.gen_range(0..m)] = true;
                }
                let row = (0..m)
                    .map(|j| {
                        if mask[j] {
                            Weight::Finite(Rat::from_integer(BigInt::from(size * slowness[j])))
                        } else {
                            Weight::Unavailable
                        }
                    })
                    .collect();
                weights.push(row);
            }
            Instance::new(weights)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_rational;

    fn rat(s: &str) -> Rat {
        parse_rational(s).unwrap()
    }

    #[test]
    fn machine_load_empty_machine_is_zero() {
        let inst = Instance::from_integers(vec![vec![1, 2], vec![2, 3]]).unwrap();
        let asg = Assignment::new(vec![0, 0], &inst).unwrap();
        assert_eq!(inst.machine_load(&asg, 1), Rat::zero());
    }

    #[test]
    fn machine_load_sums_weights_on_that_machine() {
        let inst = Instance::from_integers(vec![vec![1, 5], vec![2, 5]]).unwrap();
        let asg = Assignment::new(vec![0, 0], &inst).unwrap();
        assert_eq!(inst.machine_load(&asg, 0), rat("3"));
    }

    #[test]
    fn machine_load_single_rational_job() {
        let inst = Instance::new(vec![vec![Weight::Finite(rat("7/2"))]]).unwrap();
        let asg = Assignment::new(vec![0], &inst).unwrap();
        assert_eq!(inst.machine_load(&asg, 0), rat("7/2"));
    }

    #[test]
    fn min_weight_is_recomputed_per_row() {
        let inst = Instance::new(vec![
            vec![Weight::Finite(rat("3")), Weight::Finite(rat("7/2"))],
            vec![Weight::Unavailable, Weight::Finite(rat("5"))],
        ])
        .unwrap();
        assert_eq!(inst.min_weight(0), &rat("3"));
        assert_eq!(inst.min_weight(1), &rat("5"));
        assert_eq!(inst.available_machines(1), &[1]);
    }

    #[test]
    fn rejects_fully_unavailable_job() {
        let err = Instance::new(vec![vec![Weight::Unavailable, Weight::Unavailable]]);
        assert!(matches!(err, Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn rejects_non_positive_weight() {
        let err = Instance::new(vec![vec![Weight::Finite(rat("0"))]]);
        assert!(matches!(err, Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn assignment_rejects_unavailable_machine() {
        let inst = Instance::new(vec![vec![Weight::Unavailable, Weight::Finite(rat("1"))]]).unwrap();
        assert!(Assignment::new(vec![0], &inst).is_err());
        assert!(Assignment::new(vec![1], &inst).is_ok());
    }

    #[test]
    fn scale_clears_denominators() {
        let inst = Instance::new(vec![vec![
            Weight::Finite(rat("7/2")),
            Weight::Finite(rat("1/3")),
        ]])
        .unwrap();
        assert_eq!(inst.scale(), &BigInt::from(6));
        assert_eq!(inst.scaled_weight(0, 0), Some(&BigInt::from(21)));
        assert_eq!(inst.scaled_weight(0, 1), Some(&BigInt::from(2)));
    }

    #[test]
    fn makespan_examples() {
        let lv = LoadVector::new(vec![rat("3"), rat("4")]);
        assert_eq!(lv.makespan(), rat("4"));
        let lv = LoadVector::new(vec![Rat::zero(), Rat::zero()]);
        assert_eq!(lv.makespan(), Rat::zero());
        let lv = LoadVector::new(vec![rat("7/2"), rat("7/2")]);
        assert_eq!(lv.makespan(), rat("7/2"));
    }

    #[test]
    fn p_norm_examples() {
        let lv = LoadVector::new(vec![rat("3"), rat("4")]);
        assert_eq!(lv.p_norm_power(2), rat("25"));
        assert_eq!(lv.p_norm(2), 5.0);
        let lv = LoadVector::new(vec![rat("5"), rat("0"), rat("0")]);
        for p in 1..=6 {
            assert_eq!(lv.p_norm(p), 5.0);
        }
        let lv = LoadVector::new(vec![rat("1"); 4]);
        assert_eq!(lv.p_norm(2), 2.0);
    }

    #[test]
    fn generator_is_deterministic() {
        for kind in [
            GeneratorKind::UniformInteger,
            GeneratorKind::RestrictedRelated,
            GeneratorKind::TwoValues,
        ] {
            let params = GeneratorParams { lo: 1, hi: 10 };
            let a = generate_instance(kind, 4, 3, 42, params).unwrap();
            let b = generate_instance(kind, 4, 3, 42, params).unwrap();
            assert_eq!(a, b, "{kind:?} not deterministic");
            let c = generate_instance(kind, 4, 3, 43, params).unwrap();
            assert_ne!(a, c, "{kind:?} ignores the seed");
        }
    }

    #[test]
    fn two_values_codomain() {
        let params = GeneratorParams { lo: 1, hi: 4 };
        let inst = generate_instance(GeneratorKind::TwoValues, 3, 2, 5, params).unwrap();
        for row in inst.rows() {
            for w in row {
                let v = w.finite().unwrap();
                assert!(v == &rat("1") || v == &rat("4"), "entry {v} not in {{1,4}}");
            }
        }
    }

    #[test]
    fn uniform_integer_range() {
        let params = GeneratorParams { lo: 1, hi: 10 };
        let inst = generate_instance(GeneratorKind::UniformInteger, 2, 2, 1, params).unwrap();
        assert_eq!(inst.jobs(), 2);
        assert_eq!(inst.machines(), 2);
        for row in inst.rows() {
            for w in row {
                let v = w.finite().unwrap();
                assert!(v >= &rat("1") && v <= &rat("10"));
            }
        }
    }

    #[test]
    fn restricted_related_rows_never_empty() {
        let params = GeneratorParams { lo: 1, hi: 10 };
        for seed in 0..50 {
            let inst =
                generate_instance(GeneratorKind::RestrictedRelated, 5, 3, seed, params).unwrap();
            for u in 0..inst.jobs() {
                assert!(!inst.available_machines(u).is_empty());
            }
        }
    }

    #[test]
    fn unknown_generator_name_is_rejected() {
        assert!(matches!(
            GeneratorKind::parse("gaussian"),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn scaled_by_multiplies_every_weight() {
        let inst = Instance::from_integers(vec![vec![1, 4], vec![4, 1]]).unwrap();
        let doubled = inst.scaled_by(&rat("2")).unwrap();
        assert_eq!(doubled.weight_of(0, 1).unwrap(), &rat("8"));
        assert_eq!(doubled.min_weight(0), &rat("2"));
        assert!(inst.scaled_by(&rat("0")).is_err());
    }
}
