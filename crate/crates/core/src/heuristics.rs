//! Heuristic functions: the additive fork-decomposition heuristics backed
//! by per-task databases, plus the h_max and blind baselines.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::cost::{Cost, Scale, Units};
use crate::decomposition::{build_ensemble, AbstractionEnsemble, EnsembleKind, MappingPolicy, SubgraphKind};
use crate::fork_engine::{ForkDatabase, ShapeError};
use crate::ifork_engine::IForkDatabase;
use crate::sas_model::{PartialAssignment, State, Task};

pub trait Heuristic {
    /// Estimated cost to the goal; `Cost::Infinite` marks a dead end.
    fn evaluate(&self, state: &State) -> Cost;
}

impl<H: Heuristic + ?Sized> Heuristic for &H {
    fn evaluate(&self, state: &State) -> Cost {
        (**self).evaluate(state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeuristicKind {
    Fork,
    IFork,
    ForkIFork,
}

impl HeuristicKind {
    pub fn ensemble_kind(self) -> EnsembleKind {
        match self {
            HeuristicKind::Fork => EnsembleKind::F,
            HeuristicKind::IFork => EnsembleKind::I,
            HeuristicKind::ForkIFork => EnsembleKind::FI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RootPolicy {
    #[default]
    LeaveOneOut,
    DistInitBinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SinkPolicy {
    #[default]
    DistGoalTernary,
    DistInitTernary,
    DistInitBinary,
}

impl From<RootPolicy> for MappingPolicy {
    fn from(p: RootPolicy) -> Self {
        match p {
            RootPolicy::LeaveOneOut => MappingPolicy::LeaveOneOut,
            RootPolicy::DistInitBinary => MappingPolicy::DistInitBinary,
        }
    }
}

impl From<SinkPolicy> for MappingPolicy {
    fn from(p: SinkPolicy) -> Self {
        match p {
            SinkPolicy::DistGoalTernary => MappingPolicy::DistGoalTernary,
            SinkPolicy::DistInitTernary => MappingPolicy::DistInitTernary,
            SinkPolicy::DistInitBinary => MappingPolicy::DistInitBinary,
        }
    }
}

/// Domain abstraction choices for fork roots and ifork sinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Policies {
    pub root: RootPolicy,
    pub sink: SinkPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Rounding {
    None,
    /// Round up when every action cost of the task is an integer.
    #[default]
    CeilIfIntegerCosts,
}

#[derive(Debug, Clone)]
pub enum TaskDatabase {
    Fork(ForkDatabase),
    IFork(IForkDatabase),
}

impl TaskDatabase {
    #[inline]
    pub fn eval_units(&self, local: &[crate::Value]) -> Units {
        match self {
            TaskDatabase::Fork(db) => db.eval_units(local),
            TaskDatabase::IFork(db) => db.eval_units(local),
        }
    }
}

/// Sum of the abstract tasks' optimal costs at the projected state.
#[derive(Debug, Clone)]
pub struct HeuristicEnsemble {
    pub ensemble: AbstractionEnsemble,
    pub databases: Vec<TaskDatabase>,
    scale: Scale,
    goal: PartialAssignment,
    ceil: bool,
}

impl HeuristicEnsemble {
    /// Databases for an already partitioned ensemble. Fails if some task
    /// is outside the tractable shapes (e.g. built without abstraction).
    pub fn from_ensemble(
        task: &Task,
        ensemble: AbstractionEnsemble,
        rounding: Rounding,
    ) -> Result<HeuristicEnsemble, ShapeError> {
        let scale = Scale::for_costs(ensemble.tasks.iter().flat_map(|t| t.reps.iter().map(|r| r.cost)));
        let databases = ensemble
            .tasks
            .iter()
            .map(|t| match t.kind() {
                SubgraphKind::Fork => ForkDatabase::build(t, scale).map(TaskDatabase::Fork),
                SubgraphKind::IFork => IForkDatabase::build(t, scale).map(TaskDatabase::IFork),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ceil = rounding == Rounding::CeilIfIntegerCosts && task.all_costs_integer();
        Ok(HeuristicEnsemble { ensemble, databases, scale, goal: task.goal.clone(), ceil })
    }

    pub fn rounds_up(&self) -> bool {
        self.ceil
    }

    /// Common unit scale of all databases.
    pub fn scale(&self) -> Scale {
        self.scale
    }

    /// The exact heuristic value before rounding.
    pub fn evaluate_exact(&self, state: &State) -> Cost {
        if self.goal.is_satisfied_by(&state.values) {
            return Cost::ZERO;
        }
        let mut local = Vec::new();
        let mut total = Units::ZERO;
        for (t, db) in self.ensemble.tasks.iter().zip(&self.databases) {
            t.project_into(&state.values, &mut local);
            total = total + db.eval_units(&local);
            if total.is_inf() {
                return Cost::Infinite;
            }
        }
        self.scale.cost(total)
    }
}

impl Heuristic for HeuristicEnsemble {
    fn evaluate(&self, state: &State) -> Cost {
        let h = self.evaluate_exact(state);
        if self.ceil {
            h.ceil()
        } else {
            h
        }
    }
}

/// Decomposition, pruning, joint partition and databases in one step.
pub fn build_heuristic(task: &Task, kind: HeuristicKind, policies: Policies, rounding: Rounding) -> HeuristicEnsemble {
    let ensemble = build_ensemble(task, kind.ensemble_kind(), policies.root.into(), policies.sink.into());
    HeuristicEnsemble::from_ensemble(task, ensemble, rounding)
        .expect("mapping policies keep roots binary and sinks at most ternary")
}

/// Delete-relaxation h_max with precomputed fact indices.
#[derive(Debug, Clone)]
pub struct HMax<'a> {
    task: &'a Task,
    offsets: Vec<usize>,
    /// Actions having each fact as a precondition.
    pre_of: Vec<Vec<usize>>,
}

impl<'a> HMax<'a> {
    pub fn new(task: &'a Task) -> Self {
        let mut offsets = Vec::with_capacity(task.num_vars());
        let mut n = 0;
        for v in &task.variables {
            offsets.push(n);
            n += v.domain_size();
        }
        let mut pre_of = vec![Vec::new(); n];
        for (i, a) in task.actions.iter().enumerate() {
            for (v, x) in a.pre.iter() {
                pre_of[offsets[v] + x as usize].push(i);
            }
        }
        HMax { task, offsets, pre_of }
    }
}

impl Heuristic for HMax<'_> {
    fn evaluate(&self, state: &State) -> Cost {
        let task = self.task;
        let fact = |v: usize, x: u32| self.offsets[v] + x as usize;
        let mut cost = vec![Cost::Infinite; self.pre_of.len()];
        let mut done = vec![false; self.pre_of.len()];
        let mut unsat: Vec<usize> = task.actions.iter().map(|a| a.pre.len()).collect();
        let mut heap = BinaryHeap::new();
        for (v, &x) in state.values.iter().enumerate() {
            cost[fact(v, x)] = Cost::ZERO;
            heap.push(Reverse((Cost::ZERO, fact(v, x))));
        }
        let fire = |a: usize, base: Cost, cost: &mut Vec<Cost>, heap: &mut BinaryHeap<Reverse<(Cost, usize)>>| {
            let c = base + task.actions[a].cost;
            for (v, x) in task.actions[a].eff.iter() {
                let f = fact(v, x);
                if c < cost[f] {
                    cost[f] = c;
                    heap.push(Reverse((c, f)));
                }
            }
        };
        for (a, action) in task.actions.iter().enumerate() {
            if action.pre.is_empty() {
                fire(a, Cost::ZERO, &mut cost, &mut heap);
            }
        }
        while let Some(Reverse((c, f))) = heap.pop() {
            if done[f] || c > cost[f] {
                continue;
            }
            done[f] = true;
            for &a in &self.pre_of[f] {
                unsat[a] -= 1;
                if unsat[a] == 0 {
                    fire(a, c, &mut cost, &mut heap);
                }
            }
        }
        task.goal.iter().map(|(v, x)| cost[fact(v, x)]).max().unwrap_or(Cost::ZERO)
    }
}

pub fn h_max(task: &Task, state: &State) -> Cost {
    HMax::new(task).evaluate(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BlindVariant {
    /// Cheapest applicable action cost on non-goal states.
    #[default]
    MinActionCost,
    /// 1 on every non-goal state.
    Unit,
}

#[derive(Debug, Clone, Copy)]
pub struct Blind<'a> {
    task: &'a Task,
    variant: BlindVariant,
}

impl<'a> Blind<'a> {
    pub fn new(task: &'a Task, variant: BlindVariant) -> Self {
        Blind { task, variant }
    }
}

impl Heuristic for Blind<'_> {
    fn evaluate(&self, state: &State) -> Cost {
        if self.task.is_goal(state) {
            return Cost::ZERO;
        }
        match self.variant {
            BlindVariant::Unit => Cost::ONE,
            BlindVariant::MinActionCost => self
                .task
                .applicable_actions(state)
                .map(|a| Cost::Finite(self.task.actions[a].cost))
                .min()
                .unwrap_or(Cost::Infinite),
        }
    }
}

pub fn blind(task: &Task, state: &State) -> Cost {
    Blind::new(task, BlindVariant::MinActionCost).evaluate(state)
}

/// Heuristic that is zero everywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl Heuristic for Zero {
    fn evaluate(&self, _: &State) -> Cost {
        Cost::ZERO
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Rational;
    use crate::decomposition::{build_abstract_task, Subgraph};
    use crate::generators::{gripper, running_logistics, thm9_pi1, thm9_pi2};
    use crate::search::{dijkstra_oracle, DEFAULT_ORACLE_CAP};
    use crate::task_graphs::{causal_graph, dtg};
    use crate::testutil::{explicit_costs, toy, var};

    const KINDS: [HeuristicKind; 3] = [HeuristicKind::Fork, HeuristicKind::IFork, HeuristicKind::ForkIFork];

    fn exact(t: &Task, kind: HeuristicKind, policies: Policies) -> Cost {
        build_heuristic(t, kind, policies, Rounding::None).evaluate(&t.initial)
    }

    fn binary_roots(sink: SinkPolicy) -> Policies {
        Policies { root: RootPolicy::DistInitBinary, sink }
    }

    #[test]
    fn all_binary_abstraction_on_running_example() {
        let t = running_logistics();
        let h = build_heuristic(&t, HeuristicKind::ForkIFork, binary_roots(SinkPolicy::DistInitBinary), Rounding::default());
        assert_eq!(h.evaluate_exact(&t.initial), Cost::ratio(187, 15));
        assert!(h.rounds_up());
        assert_eq!(h.evaluate(&t.initial), Cost::int(13));
    }

    #[test]
    fn ternary_first_sink_task_uses_merged_vehicles() {
        // {c1, c2} share a class, so p1 can leave "c1" by unloading from c2
        let t = running_logistics();
        let p1 = var(&t, "p1");
        let ens = build_heuristic(&t, HeuristicKind::ForkIFork, binary_roots(SinkPolicy::DistInitTernary), Rounding::None);
        let at = ens
            .ensemble
            .tasks
            .iter()
            .find(|at| at.origin.center == p1 && at.mapping.index == 1)
            .unwrap();
        let explicit = explicit_costs(&t, at).into_iter().find(|(s, _)| *s == at.init).unwrap().1;
        assert_eq!(explicit, Cost::ratio(5, 4));
        let db = &ens.databases[ens.ensemble.tasks.iter().position(|x| core::ptr::eq(x, at)).unwrap()];
        assert_eq!(ens.scale.cost(db.eval_units(&at.init)), Cost::ratio(5, 4));
    }

    #[test]
    fn non_dominance_values() {
        let expect = |t: &Task, values: [Cost; 3]| {
            for (k, v) in KINDS.iter().zip(values) {
                assert_eq!(exact(t, *k, Policies::default()), v, "{k:?}");
            }
        };
        expect(&thm9_pi1(), [Cost::int(6), Cost::ratio(13, 3), Cost::ratio(19, 4)]);
        expect(&thm9_pi2(), [Cost::int(3), Cost::int(4), Cost::ratio(15, 4)]);
    }

    #[test]
    fn gripper_values_for_two_and_three_balls() {
        for (n, f, i, fi) in [(2, (37, 9), (3, 1), (23, 6)), (3, (65, 11), (13, 4), (26, 5))] {
            let t = gripper(n);
            let got = KINDS.map(|k| exact(&t, k, Policies::default()));
            assert_eq!(got, [Cost::ratio(f.0, f.1), Cost::ratio(i.0, i.1), Cost::ratio(fi.0, fi.1)]);
        }
    }

    #[test]
    fn goal_states_score_zero() {
        let t = gripper(2);
        let mut goal = t.initial.clone();
        for (v, x) in t.goal.iter() {
            goal.values[v] = x;
        }
        for k in KINDS {
            assert_eq!(build_heuristic(&t, k, Policies::default(), Rounding::default()).evaluate(&goal), Cost::ZERO);
        }
        assert_eq!(h_max(&t, &goal), Cost::ZERO);
        assert_eq!(blind(&t, &goal), Cost::ZERO);
    }

    #[test]
    fn dead_end_propagates() {
        // v1 needs v0:1 to reach its goal but v0 can only go 1 -> 0
        let t = toy(&[2, 2], &[0, 0], &[(1, 1)], &[(&[(0, 1)], &[(0, 0)], 1), (&[(0, 1), (1, 0)], &[(1, 1)], 1)]);
        for k in KINDS {
            assert_eq!(build_heuristic(&t, k, Policies::default(), Rounding::None).evaluate(&t.initial), Cost::Infinite);
        }
        assert_eq!(h_max(&t, &t.initial), Cost::Infinite);
    }

    #[test]
    fn h_max_on_running_example() {
        let t = running_logistics();
        assert_eq!(h_max(&t, &t.initial), Cost::int(8));
    }

    #[test]
    fn blind_variants() {
        let t = toy(&[2, 2], &[0, 0], &[(1, 1)], &[(&[(0, 0)], &[(0, 1)], 0), (&[(0, 1)], &[(1, 1)], 2)]);
        assert_eq!(blind(&t, &t.initial), Cost::ZERO);
        let s = State::new(vec![1, 0]);
        assert_eq!(blind(&t, &s), Cost::int(2));
        assert_eq!(Blind::new(&t, BlindVariant::Unit).evaluate(&s), Cost::ONE);
        let stuck = State::new(vec![0, 0]);
        let only_second = toy(&[2, 2], &[0, 0], &[(1, 1)], &[(&[(0, 1)], &[(1, 1)], 2)]);
        assert_eq!(blind(&only_second, &stuck), Cost::Infinite);
    }

    #[test]
    fn rounding_only_for_integer_costs() {
        let mut t = gripper(2);
        assert!(build_heuristic(&t, HeuristicKind::Fork, Policies::default(), Rounding::default()).rounds_up());
        assert!(!build_heuristic(&t, HeuristicKind::Fork, Policies::default(), Rounding::None).rounds_up());
        t.actions[0].cost = Rational::new(1, 2);
        assert!(!build_heuristic(&t, HeuristicKind::Fork, Policies::default(), Rounding::default()).rounds_up());
    }

    #[test]
    fn unabstracted_root_is_rejected() {
        let t = running_logistics();
        let c1 = var(&t, "c1");
        let sub = Subgraph::fork(&causal_graph(&t), c1);
        let at = build_abstract_task(&t, &sub, crate::decomposition::DomainMapping::identity(c1, 4));
        let ens = crate::decomposition::uniform_partition(&t, EnsembleKind::F, vec![at]);
        let err = HeuristicEnsemble::from_ensemble(&t, ens, Rounding::None).unwrap_err();
        assert_eq!(err, ShapeError::RootTooLarge(4));
        let _ = dtg(&t, c1);
    }

    #[test]
    fn admissible_and_consistent_on_small_tasks() {
        for t in [gripper(2), thm9_pi1(), thm9_pi2(), running_logistics()] {
            let oracle = dijkstra_oracle(&t, &t.initial, DEFAULT_ORACLE_CAP).unwrap();
            let hs: Vec<HeuristicEnsemble> =
                KINDS.iter().map(|&k| build_heuristic(&t, k, Policies::default(), Rounding::default())).collect();
            let hm = HMax::new(&t);
            for (s, hstar) in oracle.states() {
                let values: Vec<Cost> = hs.iter().map(|h| h.evaluate(s)).chain([hm.evaluate(s)]).collect();
                for (i, &v) in values.iter().enumerate() {
                    assert!(v <= hstar, "h{i} = {v} > {hstar}");
                }
                for (a, succ) in oracle.transitions(s) {
                    let c = Cost::from(t.actions[a].cost);
                    for h in &hs {
                        assert!(h.evaluate(s) <= c + h.evaluate(succ));
                    }
                }
            }
        }
    }
}
