//! Exhaustive equilibrium enumeration, optimal makespan, and price of
//! anarchy/stability reports.
//!
//! Everything here works at desk scale: the assignment space (restricted to
//! each player's available machines) is scanned candidate by candidate, in
//! parallel when the `parallel` feature is on, with deterministic
//! lexicographic merging. Ratios are selected by exact comparison of
//! completion-time powers; decimal strings exist only for display. Load and
//! completion-time bounds with irrational constants are checked against
//! certified rational upper bounds (outward rounding), so a reported pass
//! can never be an artifact of rounding.

use num::{BigInt, One, Zero};

use crate::dynamics::{self, potential};
use crate::error::Error;
use crate::exec;
use crate::instance::{Assignment, Instance, LoadVector};
use crate::mechanism::Mechanism;
use crate::numeric::{
    decimal, decimal_root, ln2_bounds, nth_root_bounds, rat_pow, Rat, DEFAULT_SIG_DIGITS,
};

/// Default cap on the number of candidate assignments an exhaustive scan
/// will touch.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// Precision (fractional digits) used for certified root enclosures in
/// bound checks.
const BOUND_ROOT_DIGITS: u32 = 30;

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    /// Refuse exhaustive scans beyond this many candidates.
    pub cap: u128,
    /// Fan the scan out over a rayon pool (no effect without the `parallel`
    /// feature).
    pub parallel: bool,
    /// Fall back to branch-and-bound for the optimal makespan when the cap
    /// is exceeded.
    pub enable_bnb: bool,
    /// Significant digits for rendered decimals.
    pub sig_digits: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            cap: DEFAULT_CAP,
            parallel: cfg!(feature = "parallel"),
            enable_bnb: false,
            sig_digits: DEFAULT_SIG_DIGITS,
        }
    }
}

/// The space of assignments respecting per-player availability, in
/// lexicographic `machine_of` order (player 0 most significant).
pub struct AssignmentSpace {
    avail: Vec<Vec<usize>>,
    strides: Vec<u128>,
    total: u128,
}

impl AssignmentSpace {
    pub fn new(inst: &Instance) -> Self {
        let avail: Vec<Vec<usize>> = (0..inst.jobs())
            .map(|u| inst.available_machines(u).to_vec())
            .collect();
        let mut strides = vec![1u128; avail.len()];
        let mut total: u128 = 1;
        for u in (0..avail.len()).rev() {
            strides[u] = total;
            total = total.saturating_mul(avail[u].len() as u128);
        }
        AssignmentSpace {
            avail,
            strides,
            total,
        }
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn decode(&self, index: u64) -> Vec<usize> {
        let index = index as u128;
        self.avail
            .iter()
            .zip(&self.strides)
            .map(|(options, stride)| {
                let digit = (index / stride) as usize % options.len();
                options[digit]
            })
            .collect()
    }

    fn check_cap(&self, cap: u128) -> Result<(), Error> {
        if self.total > cap {
            return Err(Error::CapExceeded {
                candidates: self.total,
                cap,
            });
        }
        Ok(())
    }
}

/// All pure Nash equilibria of the induced game, in lexicographic order.
pub fn enumerate_equilibria(
    mech: &Mechanism,
    inst: &Instance,
    opts: &AnalysisOptions,
) -> Result<Vec<Assignment>, Error> {
    let space = AssignmentSpace::new(inst);
    space.check_cap(opts.cap)?;
    let hits = exec::filter_indices(space.total() as u64, opts.parallel, |i| {
        let asg = Assignment::from_raw(space.decode(i));
        dynamics::is_equilibrium(mech, inst, &asg)
    });
    Ok(hits
        .into_iter()
        .map(|i| Assignment::from_raw(space.decode(i)))
        .collect())
}

/// Minimum makespan over all valid assignments, by exhaustive scan, with the
/// lexicographically smallest witness.
pub fn optimal_makespan_exhaustive(
    inst: &Instance,
    opts: &AnalysisOptions,
) -> Result<(Rat, Assignment), Error> {
    let space = AssignmentSpace::new(inst);
    space.check_cap(opts.cap)?;
    let (index, best) = exec::min_by_key(space.total() as u64, opts.parallel, |i| {
        let asg = Assignment::from_raw(space.decode(i));
        LoadVector::from_assignment(inst, &asg).makespan()
    });
    Ok((best, Assignment::from_raw(space.decode(index))))
}

/// Minimum makespan by depth-first branch-and-bound. Jobs are branched in
/// descending min-weight order; subtrees are pruned with the lower bound
/// max(current max load, largest remaining min-weight,
///     (assigned load + remaining min-weight volume) / m).
pub fn optimal_makespan_bnb(inst: &Instance) -> (Rat, Assignment) {
    let n = inst.jobs();
    let m = inst.machines();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inst.min_weight(b).cmp(inst.min_weight(a)).then(a.cmp(&b)));

    // Suffix aggregates of min-weights along the branching order.
    let mut suffix_sum = vec![Rat::zero(); n + 1];
    let mut suffix_max = vec![Rat::zero(); n + 1];
    for depth in (0..n).rev() {
        let w = inst.min_weight(order[depth]);
        suffix_sum[depth] = &suffix_sum[depth + 1] + w;
        suffix_max[depth] = suffix_max[depth + 1].clone().max(w.clone());
    }

    // Greedy incumbent: place each job on the machine minimizing its
    // resulting load.
    let mut greedy = vec![0usize; n];
    {
        let mut loads = vec![Rat::zero(); m];
        for &u in &order {
            let mut pick = inst.available_machines(u)[0];
            let mut pick_load = &loads[pick] + inst.weight_of(u, pick).unwrap();
            for &j in &inst.available_machines(u)[1..] {
                let cand = &loads[j] + inst.weight_of(u, j).unwrap();
                if cand < pick_load {
                    pick = j;
                    pick_load = cand;
                }
            }
            loads[pick] = pick_load;
            greedy[u] = pick;
        }
    }
    let greedy_asg = Assignment::from_raw(greedy);

    struct Dfs<'a> {
        inst: &'a Instance,
        order: &'a [usize],
        suffix_sum: &'a [Rat],
        suffix_max: &'a [Rat],
        machines_rat: Rat,
        best_value: Rat,
        best_asg: Vec<usize>,
        current: Vec<usize>,
        loads: Vec<Rat>,
    }

    impl Dfs<'_> {
        fn run(&mut self, depth: usize, assigned: Rat, current_max: Rat) {
            if depth == self.order.len() {
                if current_max < self.best_value {
                    self.best_value = current_max;
                    self.best_asg = self.current.clone();
                }
                return;
            }
            let volume = (&assigned + &self.suffix_sum[depth]) / &self.machines_rat;
            let lower = current_max
                .clone()
                .max(self.suffix_max[depth].clone())
                .max(volume);
            if lower >= self.best_value {
                return;
            }
            let job = self.order[depth];
            for &machine in self.inst.available_machines(job) {
                let w = self.inst.weight_of(job, machine).unwrap();
                let new_load = &self.loads[machine] + w;
                let new_max = current_max.clone().max(new_load.clone());
                if new_max >= self.best_value {
                    continue;
                }
                let old_load = std::mem::replace(&mut self.loads[machine], new_load);
                self.current[job] = machine;
                self.run(depth + 1, &assigned + w, new_max);
                self.loads[machine] = old_load;
            }
        }
    }

    let mut dfs = Dfs {
        inst,
        order: &order,
        suffix_sum: &suffix_sum,
        suffix_max: &suffix_max,
        machines_rat: Rat::from_integer(BigInt::from(m)),
        best_value: LoadVector::from_assignment(inst, &greedy_asg).makespan(),
        best_asg: greedy_asg.machine_of().to_vec(),
        current: vec![0; n],
        loads: vec![Rat::zero(); m],
    };
    dfs.run(0, Rat::zero(), Rat::zero());

    (dfs.best_value, Assignment::from_raw(dfs.best_asg))
}

/// Optimal makespan: exhaustive within the cap, branch-and-bound beyond it
/// when enabled.
pub fn optimal_makespan(
    inst: &Instance,
    opts: &AnalysisOptions,
) -> Result<(Rat, Assignment), Error> {
    match optimal_makespan_exhaustive(inst, opts) {
        Ok(result) => Ok(result),
        Err(Error::CapExceeded { .. }) if opts.enable_bnb => Ok(optimal_makespan_bnb(inst)),
        Err(e) => Err(e),
    }
}

/// Per-equilibrium measurements. Exact fields drive every comparison; the
/// decimal strings are rendered once for output.
#[derive(Debug, Clone)]
pub struct EquilibriumInfo {
    pub assignment: Assignment,
    /// Potential value; None for the makespan baseline (no potential).
    pub phi: Option<Rat>,
    pub loads: Vec<Rat>,
    pub makespan: Rat,
    /// (max completion time)^degree, exact.
    pub max_ct_power: Rat,
    pub max_ct_decimal: String,
    /// max completion time / optimal makespan, rendered.
    pub ratio_decimal: String,
}

/// One verified inequality: the worst observed value against a certified
/// upper bound for the theoretical right-hand side.
#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub name: String,
    pub theoretical: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    pub mechanism: Mechanism,
    pub degree: u32,
    pub opt_makespan: Rat,
    pub opt_assignment: Assignment,
    pub equilibria: Vec<EquilibriumInfo>,
    /// Indices into `equilibria`; None when no equilibrium exists (possible
    /// only for the baseline).
    pub poa_index: Option<usize>,
    pub pos_index: Option<usize>,
    pub potential_min_index: Option<usize>,
    pub poa_decimal: Option<String>,
    pub pos_decimal: Option<String>,
    pub bound_checks: Vec<BoundCheck>,
}

/// Enumerates equilibria, solves the optimal makespan, and measures the
/// price of anarchy and stability. For DCOORD the report also carries the
/// equilibrium load and completion-time bound checks.
pub fn poa_pos_report(
    mech: &Mechanism,
    inst: &Instance,
    opts: &AnalysisOptions,
) -> Result<EquilibriumReport, Error> {
    let degree = mech.degree();
    let sig = opts.sig_digits;
    let equilibria_raw = enumerate_equilibria(mech, inst, opts)?;
    let (opt_makespan, opt_assignment) = optimal_makespan(inst, opts)?;
    let opt_power = rat_pow(&opt_makespan, degree);

    let cf = mech.coordination();
    let mut equilibria = Vec::with_capacity(equilibria_raw.len());
    for asg in equilibria_raw {
        let lv = LoadVector::from_assignment(inst, &asg);
        let max_ct_power = (0..inst.jobs())
            .map(|u| {
                mech.completion_time(inst, &asg, u)
                    .expect("equilibrium assignments are valid")
                    .power()
                    .clone()
            })
            .max()
            .expect("instances have at least one job");
        let ratio_power = &max_ct_power / &opt_power;
        equilibria.push(EquilibriumInfo {
            phi: cf.map(|cf| potential(cf, inst, &asg).0),
            loads: lv.loads().to_vec(),
            makespan: lv.makespan(),
            max_ct_decimal: decimal_root(&max_ct_power, degree, sig)
                .expect("powers are non-negative"),
            ratio_decimal: decimal_root(&ratio_power, degree, sig)
                .expect("ratios are non-negative"),
            max_ct_power,
            assignment: asg,
        });
    }

    // PoA/PoS selection compares the exact powers: opt is shared, so the
    // ordering of ratios equals the ordering of max_ct_power.
    let poa_index = argmax_by(&equilibria, |e| &e.max_ct_power);
    let pos_index = argmin_by(&equilibria, |e| &e.max_ct_power);
    let potential_min_index = if cf.is_some() {
        argmin_by(&equilibria, |e| e.phi.as_ref().expect("coordination"))
    } else {
        None
    };

    let bound_checks = match cf {
        Some(cf) if cf.is_dcoord() => verify_load_bounds(
            cf.degree(),
            inst.machines(),
            &opt_makespan,
            &equilibria,
            potential_min_index,
            sig,
        ),
        _ => Vec::new(),
    };

    Ok(EquilibriumReport {
        mechanism: mech.clone(),
        degree,
        poa_decimal: poa_index.map(|i| equilibria[i].ratio_decimal.clone()),
        pos_decimal: pos_index.map(|i| equilibria[i].ratio_decimal.clone()),
        opt_makespan,
        opt_assignment,
        equilibria,
        poa_index,
        pos_index,
        potential_min_index,
        bound_checks,
    })
}

fn argmax_by<'a, T, K: Ord + 'a>(items: &'a [T], key: impl Fn(&'a T) -> &'a K) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, item) in items.iter().enumerate() {
        match best {
            Some(b) if key(&items[b]) >= key(item) => {}
            _ => best = Some(i),
        }
    }
    best
}

fn argmin_by<'a, T, K: Ord + 'a>(items: &'a [T], key: impl Fn(&'a T) -> &'a K) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, item) in items.iter().enumerate() {
        match best {
            Some(b) if key(&items[b]) <= key(item) => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Certified rational upper bound on x^(1/deg).
fn upper_root(x: &Rat, deg: u32) -> Rat {
    nth_root_bounds(x, deg, BOUND_ROOT_DIGITS)
        .expect("bound inputs are non-negative")
        .1
}

/// Upper bound on (d+1)/ln 2 via a certified lower bound on ln 2.
fn upper_dp1_over_ln2(d: u32) -> Rat {
    let (ln2_lo, _) = ln2_bounds();
    Rat::from_integer(BigInt::from(d + 1)) / ln2_lo
}

/// The equilibrium load and completion-time bounds for DCOORD:
///
/// - every equilibrium machine load is at most
///   m^(1/(d+1)) * (d+1)/ln2 * opt;
/// - the potential-minimizing equilibrium's loads are at most
///   ((d+1)/d * m)^(1/(d+1)) * opt;
/// - every equilibrium completion time is at most
///   d^(1/d) * (m^(1/(d+1)) * (d+1)/ln2 + 1) * opt;
/// - the potential minimizer's completion times are at most
///   d^(1/d) * (((d+1)/d * m)^(1/(d+1)) + 1) * opt.
///
/// All right-hand sides are evaluated as certified rational upper bounds and
/// compared exactly (completion times via their d-th powers), so a pass is
/// sound and can never come from rounding. A failing check would falsify the
/// implementation, not the inequality.
pub fn verify_load_bounds(
    d: u32,
    machines: usize,
    opt_makespan: &Rat,
    equilibria: &[EquilibriumInfo],
    potential_min_index: Option<usize>,
    sig: usize,
) -> Vec<BoundCheck> {
    if equilibria.is_empty() {
        return Vec::new();
    }
    let m_rat = Rat::from_integer(BigInt::from(machines));
    let d_rat = Rat::from_integer(BigInt::from(d));
    let dp1_rat = Rat::from_integer(BigInt::from(d + 1));

    let m_root_ub = upper_root(&m_rat, d + 1);
    let dp1_ln2_ub = upper_dp1_over_ln2(d);
    let pot_root_ub = upper_root(&(&dp1_rat / &d_rat * &m_rat), d + 1);
    let d_root_ub = upper_root(&d_rat, d);

    let mut checks = Vec::new();
    let dec = |x: &Rat| decimal(x, sig).expect("non-negative");

    // Per-machine load bound at every equilibrium.
    {
        let rhs = &m_root_ub * &dp1_ln2_ub * opt_makespan;
        let worst = equilibria
            .iter()
            .flat_map(|e| e.loads.iter())
            .max()
            .expect("non-empty");
        checks.push(BoundCheck {
            name: "equilibrium-load".into(),
            theoretical: dec(&rhs),
            observed: dec(worst),
            pass: *worst <= rhs,
        });
    }

    // Tighter load bound at the potential minimizer.
    if let Some(i) = potential_min_index {
        let rhs = &pot_root_ub * opt_makespan;
        let worst = equilibria[i].loads.iter().max().expect("m >= 1");
        checks.push(BoundCheck {
            name: "potential-min-load".into(),
            theoretical: dec(&rhs),
            observed: dec(worst),
            pass: *worst <= rhs,
        });
    }

    // Completion-time (anarchy factor) bound at every equilibrium, compared
    // as d-th powers.
    {
        let factor = &d_root_ub * (&m_root_ub * &dp1_ln2_ub + Rat::one());
        let rhs = &factor * opt_makespan;
        let rhs_power = rat_pow(&rhs, d);
        let worst_power = equilibria
            .iter()
            .map(|e| &e.max_ct_power)
            .max()
            .expect("non-empty");
        checks.push(BoundCheck {
            name: "anarchy-completion".into(),
            theoretical: dec(&rhs),
            observed: decimal_root(worst_power, d, sig).expect("non-negative"),
            pass: *worst_power <= rhs_power,
        });
    }

    // Completion-time (stability factor) bound at the potential minimizer.
    if let Some(i) = potential_min_index {
        let factor = &d_root_ub * (&pot_root_ub + Rat::one());
        let rhs = &factor * opt_makespan;
        let rhs_power = rat_pow(&rhs, d);
        let power = &equilibria[i].max_ct_power;
        checks.push(BoundCheck {
            name: "stability-completion".into(),
            theoretical: dec(&rhs),
            observed: decimal_root(power, d, sig).expect("non-negative"),
            pass: *power <= rhs_power,
        });
    }

    checks
}
