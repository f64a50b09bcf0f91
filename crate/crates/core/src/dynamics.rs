//! The potential function and exact best-response dynamics.
//!
//! Every mechanism built from a coefficient function admits the potential
//! Phi(N) = sum_j Lambda_j(N_j): a unilateral move changes Phi by exactly
//! the difference of the deviating player's Lambda values, so any improving
//! move strictly decreases Phi and dynamics on the finite strategy space
//! must terminate. All the comparisons below happen on exact deviation keys;
//! ties never trigger a move.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::{Assignment, Instance};
use crate::mechanism::{CoefficientFunction, Mechanism};
use crate::numeric::Rat;

/// Exact value of the potential function Phi(N) = sum_j Lambda_j(N_j).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PotentialValue(pub Rat);

impl PotentialValue {
    pub fn value(&self) -> &Rat {
        &self.0
    }
}

/// Phi(N), exact. The assignment must be valid for the instance.
pub fn potential(cf: &CoefficientFunction, inst: &Instance, asg: &Assignment) -> PotentialValue {
    let mut phi = Rat::from_integer(0.into());
    for (machine, jobs) in asg.machine_sets(inst.machines()).iter().enumerate() {
        phi += cf
            .lambda_set(inst, machine, jobs)
            .expect("assignment only uses available machines")
            .into_value();
    }
    PotentialValue(phi)
}

/// The machine a player would move to, if any: the lowest-index machine
/// attaining the minimum deviation key, provided that key is strictly
/// smaller than the player's current key. Returns `None` when the current
/// machine attains the minimum (so ties never trigger a move).
pub fn best_response(
    mech: &Mechanism,
    inst: &Instance,
    asg: &Assignment,
    player: usize,
) -> Option<usize> {
    let current = asg.machine(player);
    let mut best: Option<(Rat, usize)> = None;
    let mut current_key: Option<Rat> = None;
    for &machine in inst.available_machines(player) {
        let key = mech
            .deviation_key(inst, asg, player, machine)
            .expect("machine is available");
        if machine == current {
            current_key = Some(key.clone());
        }
        match &best {
            Some((best_key, _)) if key >= *best_key => {}
            _ => best = Some((key, machine)),
        }
    }
    let (best_key, best_machine) = best.expect("every job has an available machine");
    let current_key = current_key.expect("current machine is available");
    if best_key < current_key {
        Some(best_machine)
    } else {
        None
    }
}

/// Finds the lowest-index player with a profitable deviation, together with
/// her best-response machine.
pub fn find_profitable_deviation(
    mech: &Mechanism,
    inst: &Instance,
    asg: &Assignment,
) -> Option<(usize, usize)> {
    (0..inst.jobs()).find_map(|player| {
        best_response(mech, inst, asg, player).map(|machine| (player, machine))
    })
}

/// True iff no player has any profitable deviation.
pub fn is_equilibrium(mech: &Mechanism, inst: &Instance, asg: &Assignment) -> bool {
    find_profitable_deviation(mech, inst, asg).is_none()
}

/// Player activation schedule for the dynamics loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveOrder {
    /// Players activated in index order, pass after pass.
    RoundRobin,
    /// A fresh seeded shuffle of the player order before every pass.
    Random(u64),
    /// Each step moves the player whose best response decreases the
    /// potential the most (ties: lowest player index).
    MaxImprovement,
}

/// Canonical starting assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    /// Each player on her minimum-weight machine (lowest index on ties).
    MinWeight,
    /// Each player on her lowest-index available machine.
    FirstAvailable,
    /// Each player on a seeded uniform draw over her available machines.
    Random(u64),
}

pub fn starting_assignment(inst: &Instance, kind: StartKind) -> Assignment {
    let machine_of: Vec<usize> = match kind {
        StartKind::MinWeight => (0..inst.jobs())
            .map(|u| {
                let mut best = inst.available_machines(u)[0];
                for &j in inst.available_machines(u) {
                    if inst.weight_of(u, j).unwrap() < inst.weight_of(u, best).unwrap() {
                        best = j;
                    }
                }
                best
            })
            .collect(),
        StartKind::FirstAvailable => (0..inst.jobs())
            .map(|u| inst.available_machines(u)[0])
            .collect(),
        StartKind::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..inst.jobs())
                .map(|u| {
                    *inst
                        .available_machines(u)
                        .choose(&mut rng)
                        .expect("availability validated")
                })
                .collect()
        }
    };
    Assignment::new(machine_of, inst).expect("start respects availability")
}

/// One executed improving move.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveRecord {
    pub player: usize,
    pub from: usize,
    pub to: usize,
    pub phi_before: Rat,
    pub phi_after: Rat,
}

/// The record of a dynamics run. `converged` means a full activation pass
/// found no improving move; every recorded move strictly decreased Phi.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTrace {
    pub moves: Vec<MoveRecord>,
    pub converged: bool,
    pub iterations: usize,
}

/// Default move budget: desk-scale games converge well before this.
pub fn default_max_iter(inst: &Instance) -> usize {
    10 * inst.jobs() * inst.machines() * inst.machines()
}

/// Runs best-response dynamics from `start` until a full pass makes no move
/// or `max_iter` moves have been executed. The potential is updated
/// incrementally with the exact identity
/// delta Phi = Lambda_{u,j1}(N_j1) - Lambda_{u,j2}(N'_j2) = key(j1) - key(j2).
pub fn run_dynamics(
    cf: &CoefficientFunction,
    inst: &Instance,
    start: Assignment,
    order: MoveOrder,
    max_iter: usize,
) -> (DynamicsTrace, Assignment) {
    let mech = Mechanism::Coordination(cf.clone());
    let mut asg = start;
    let mut phi = potential(cf, inst, &asg).0;
    let mut moves: Vec<MoveRecord> = Vec::new();
    let mut converged = false;
    let mut exhausted = false;
    let mut rng = match order {
        MoveOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };

    while !exhausted {
        let mut improved = false;
        match order {
            MoveOrder::RoundRobin | MoveOrder::Random(_) => {
                let mut schedule: Vec<usize> = (0..inst.jobs()).collect();
                if let Some(rng) = rng.as_mut() {
                    schedule.shuffle(rng);
                }
                for player in schedule {
                    let Some(to) = best_response(&mech, inst, &asg, player) else {
                        continue;
                    };
                    if moves.len() == max_iter {
                        exhausted = true;
                        break;
                    }
                    execute_move(&mech, inst, &mut asg, &mut phi, &mut moves, player, to);
                    improved = true;
                }
            }
            MoveOrder::MaxImprovement => {
                let mut pick: Option<(Rat, usize, usize)> = None;
                for player in 0..inst.jobs() {
                    let Some(to) = best_response(&mech, inst, &asg, player) else {
                        continue;
                    };
                    let current = mech
                        .deviation_key(inst, &asg, player, asg.machine(player))
                        .expect("current machine available");
                    let target = mech
                        .deviation_key(inst, &asg, player, to)
                        .expect("best response is available");
                    let gain = current - target;
                    if pick.as_ref().is_none_or(|(g, _, _)| gain > *g) {
                        pick = Some((gain, player, to));
                    }
                }
                if let Some((_, player, to)) = pick {
                    if moves.len() == max_iter {
                        exhausted = true;
                    } else {
                        execute_move(&mech, inst, &mut asg, &mut phi, &mut moves, player, to);
                        improved = true;
                    }
                }
            }
        }
        if !improved && !exhausted {
            converged = true;
            break;
        }
    }

    let iterations = moves.len();
    (
        DynamicsTrace {
            moves,
            converged,
            iterations,
        },
        asg,
    )
}

fn execute_move(
    mech: &Mechanism,
    inst: &Instance,
    asg: &mut Assignment,
    phi: &mut Rat,
    moves: &mut Vec<MoveRecord>,
    player: usize,
    to: usize,
) {
    let from = asg.machine(player);
    let key_before = mech
        .deviation_key(inst, asg, player, from)
        .expect("current machine available");
    let key_after = mech
        .deviation_key(inst, asg, player, to)
        .expect("best response is available");
    let phi_before = phi.clone();
    let phi_after = &phi_before - (&key_before - &key_after);
    debug_assert!(phi_after < phi_before, "improving moves strictly decrease Phi");
    *asg = asg.with_move(player, to);
    moves.push(MoveRecord {
        player,
        from,
        to,
        phi_before,
        phi_after: phi_after.clone(),
    });
    *phi = phi_after;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::lambda_set_dcoord;
    use crate::numeric::parse_rational;

    fn rat(s: &str) -> Rat {
        parse_rational(s).unwrap()
    }

    fn diag_instance() -> Instance {
        Instance::from_integers(vec![vec![1, 4], vec![4, 1]]).unwrap()
    }

    fn dcoord2() -> CoefficientFunction {
        CoefficientFunction::dcoord(2).unwrap()
    }

    #[test]
    fn potential_of_single_job_is_weight_power() {
        let inst = Instance::from_integers(vec![vec![3, 7]]).unwrap();
        let asg = Assignment::new(vec![0], &inst).unwrap();
        assert_eq!(potential(&dcoord2(), &inst, &asg).0, rat("27"));
    }

    #[test]
    fn potential_before_and_after_a_move() {
        // Machine 0 holds jobs (1, 2): Phi = 21. Moving job 1 to machine 1
        // (weight 2 there) leaves singletons: Phi = 1 + 8 = 9.
        let inst = Instance::from_integers(vec![vec![1, 9], vec![2, 2]]).unwrap();
        let cf = dcoord2();
        let both = Assignment::new(vec![0, 0], &inst).unwrap();
        assert_eq!(potential(&cf, &inst, &both).0, rat("21"));
        let split = Assignment::new(vec![0, 1], &inst).unwrap();
        assert_eq!(potential(&cf, &inst, &split).0, rat("9"));
    }

    #[test]
    fn lone_player_on_min_weight_machine_stays() {
        let inst = Instance::from_integers(vec![vec![2, 5]]).unwrap();
        let mech = Mechanism::Coordination(dcoord2());
        let asg = Assignment::new(vec![0], &inst).unwrap();
        assert_eq!(best_response(&mech, &inst, &asg, 0), None);
    }

    #[test]
    fn best_response_moves_to_strictly_smaller_key() {
        // Current key 13 vs empty machine with weight 1: key 1.
        let inst = Instance::from_integers(vec![vec![1, 1], vec![2, 9]]).unwrap();
        let mech = Mechanism::Coordination(dcoord2());
        let asg = Assignment::new(vec![0, 0], &inst).unwrap();
        assert_eq!(best_response(&mech, &inst, &asg, 0), Some(1));
    }

    #[test]
    fn equal_keys_never_trigger_a_move() {
        let inst = Instance::from_integers(vec![vec![2, 2]]).unwrap();
        let mech = Mechanism::Coordination(dcoord2());
        for start in [vec![0], vec![1]] {
            let asg = Assignment::new(start, &inst).unwrap();
            assert_eq!(best_response(&mech, &inst, &asg, 0), None);
        }
    }

    #[test]
    fn equilibrium_check_on_the_diagonal_instance() {
        let inst = diag_instance();
        let mech = Mechanism::Coordination(dcoord2());
        let diagonal = Assignment::new(vec![0, 1], &inst).unwrap();
        assert!(is_equilibrium(&mech, &inst, &diagonal));
        let both = Assignment::new(vec![0, 0], &inst).unwrap();
        assert_eq!(find_profitable_deviation(&mech, &inst, &both), Some((1, 1)));
    }

    #[test]
    fn dynamics_reaches_the_diagonal() {
        let inst = diag_instance();
        let cf = dcoord2();
        let start = Assignment::new(vec![0, 0], &inst).unwrap();
        let (trace, final_asg) =
            run_dynamics(&cf, &inst, start, MoveOrder::RoundRobin, 100);
        assert!(trace.converged);
        assert_eq!(final_asg.machine_of(), &[0, 1]);
        assert_eq!(trace.iterations, 1);
        let mv = &trace.moves[0];
        assert_eq!((mv.player, mv.from, mv.to), (1, 0, 1));
        assert_eq!(mv.phi_before, rat("105"));
        assert_eq!(mv.phi_after, rat("2"));
    }

    #[test]
    fn dynamics_from_an_equilibrium_makes_no_move() {
        let inst = diag_instance();
        let start = Assignment::new(vec![0, 1], &inst).unwrap();
        let (trace, final_asg) =
            run_dynamics(&dcoord2(), &inst, start.clone(), MoveOrder::RoundRobin, 100);
        assert!(trace.converged);
        assert!(trace.moves.is_empty());
        assert_eq!(final_asg, start);
    }

    #[test]
    fn exhausted_budget_reports_not_converged() {
        let inst = diag_instance();
        let start = Assignment::new(vec![0, 0], &inst).unwrap();
        let (trace, _) = run_dynamics(&dcoord2(), &inst, start, MoveOrder::RoundRobin, 0);
        assert!(!trace.converged);
        assert!(trace.moves.is_empty());
    }

    #[test]
    fn incremental_phi_matches_recomputation() {
        let inst = Instance::from_integers(vec![
            vec![3, 1, 4],
            vec![1, 5, 9],
            vec![2, 6, 5],
            vec![3, 5, 8],
        ])
        .unwrap();
        let cf = dcoord2();
        let start = starting_assignment(&inst, StartKind::FirstAvailable);
        let (trace, final_asg) = run_dynamics(&cf, &inst, start, MoveOrder::RoundRobin, 1000);
        assert!(trace.converged);
        for w in trace.moves.windows(2) {
            assert_eq!(w[0].phi_after, w[1].phi_before);
            assert!(w[0].phi_after < w[0].phi_before);
        }
        if let Some(last) = trace.moves.last() {
            assert_eq!(potential(&cf, &inst, &final_asg).0, last.phi_after);
        }
        assert!(is_equilibrium(
            &Mechanism::Coordination(cf),
            &inst,
            &final_asg
        ));
    }

    #[test]
    fn all_orders_converge_to_some_equilibrium() {
        let inst = Instance::from_integers(vec![vec![1, 3], vec![2, 2], vec![3, 1]]).unwrap();
        let cf = dcoord2();
        let mech = Mechanism::Coordination(cf.clone());
        for order in [
            MoveOrder::RoundRobin,
            MoveOrder::Random(7),
            MoveOrder::MaxImprovement,
        ] {
            let start = starting_assignment(&inst, StartKind::FirstAvailable);
            let (trace, final_asg) = run_dynamics(&cf, &inst, start, order, 1000);
            assert!(trace.converged, "{order:?} did not converge");
            assert!(is_equilibrium(&mech, &inst, &final_asg));
        }
    }

    #[test]
    fn min_weight_start_picks_argmin_machines() {
        let inst = Instance::from_integers(vec![vec![2, 1], vec![3, 3]]).unwrap();
        let start = starting_assignment(&inst, StartKind::MinWeight);
        assert_eq!(start.machine_of(), &[1, 0]);
    }

    #[test]
    fn random_start_is_seed_deterministic() {
        let inst = Instance::from_integers(vec![vec![1, 2], vec![2, 1], vec![1, 1]]).unwrap();
        let a = starting_assignment(&inst, StartKind::Random(9));
        let b = starting_assignment(&inst, StartKind::Random(9));
        assert_eq!(a, b);
    }

    #[test]
    fn makespan_baseline_dynamics_keys_work_in_equilibrium_check() {
        // Pure load-based game: with both jobs on machine 0 (load 5), even
        // player 0 prefers the empty machine at load 4.
        let inst = diag_instance();
        let mech = Mechanism::MakespanBaseline;
        let both = Assignment::new(vec![0, 0], &inst).unwrap();
        assert_eq!(find_profitable_deviation(&mech, &inst, &both), Some((0, 1)));
        let diagonal = Assignment::new(vec![0, 1], &inst).unwrap();
        assert!(is_equilibrium(&mech, &inst, &diagonal));
    }

    #[test]
    fn lambda_set_closed_form_is_consistent_with_potential() {
        let inst = diag_instance();
        let cf = dcoord2();
        let asg = Assignment::new(vec![0, 0], &inst).unwrap();
        let direct = lambda_set_dcoord(2, &inst, 0, &[0, 1]).unwrap();
        assert_eq!(potential(&cf, &inst, &asg).0, direct.into_value());
    }
}
