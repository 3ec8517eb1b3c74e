use forkplan_core::decomposition::{AbstractTask, EnsembleKind, MappingPolicy};
use forkplan_core::generators::random::{random_task, RandomParams};
use forkplan_core::heuristics::{
    build_heuristic, h_max, HeuristicEnsemble, HeuristicKind, Policies, RootPolicy, Rounding, SinkPolicy,
};
use forkplan_core::search::{astar, dijkstra_oracle, oracle_from, validate_plan, SearchLimits, SearchOutcome};
use forkplan_core::{Cost, Rational, State, Task};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORACLE_CAP: usize = 50_000;

fn task_from(seed: u64) -> Task {
    let params = RandomParams { max_actions: 36, ..RandomParams::default() };
    random_task(&mut ChaCha8Rng::seed_from_u64(seed), &params)
}

fn policies() -> impl Strategy<Value = Policies> {
    (
        prop_oneof![Just(RootPolicy::LeaveOneOut), Just(RootPolicy::DistInitBinary)],
        prop_oneof![
            Just(SinkPolicy::DistGoalTernary),
            Just(SinkPolicy::DistInitTernary),
            Just(SinkPolicy::DistInitBinary)
        ],
    )
        .prop_map(|(root, sink)| Policies { root, sink })
}

fn kinds() -> impl Strategy<Value = HeuristicKind> {
    prop_oneof![Just(HeuristicKind::Fork), Just(HeuristicKind::IFork), Just(HeuristicKind::ForkIFork)]
}

fn product(sizes: impl IntoIterator<Item = usize>) -> Vec<State> {
    let mut out = vec![Vec::new()];
    for k in sizes {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..k).map(move |x| {
                    let mut q = p.clone();
                    q.push(x as forkplan_core::Value);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(State::new).collect()
}

fn abstract_states(at: &AbstractTask) -> Vec<State> {
    product(at.vars.iter().map(|v| v.domain_size))
}

fn all_states(t: &Task) -> Vec<State> {
    product(t.variables.iter().map(|v| v.domain_size()))
}

fn goal_of(t: &Task) -> State {
    let mut s = t.initial.clone();
    for (v, x) in t.goal.iter() {
        s.values[v] = x;
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Every database value equals explicit search over its abstract task.
    #[test]
    fn databases_are_exact(seed in any::<u64>(), kind in kinds(), policies in policies()) {
        let t = task_from(seed);
        let h = build_heuristic(&t, kind, policies, Rounding::None);
        for (at, db) in h.ensemble.tasks.iter().zip(&h.databases) {
            if at.state_space_size() > 4096 {
                continue;
            }
            let states = abstract_states(at);
            let oracle = oracle_from(&at.to_task(&t), states.clone(), ORACLE_CAP).unwrap();
            for s in &states {
                prop_assert_eq!(h.scale().cost(db.eval_units(&s.values)), oracle.get(s).unwrap(), "state {:?}", s.values);
            }
        }
    }

    /// Representative costs of an action add up to its cost.
    #[test]
    fn partition_conserves_cost(seed in any::<u64>(), kind in kinds(), policies in policies()) {
        let t = task_from(seed);
        let h = build_heuristic(&t, kind, policies, Rounding::None);
        let ens = &h.ensemble;
        for (a, action) in t.actions.iter().enumerate() {
            let total: Rational = ens.tasks.iter().flat_map(|at| at.reps.iter()).filter(|r| r.action == a).map(|r| r.cost).sum();
            if ens.rep_counts[a] == 0 {
                prop_assert_eq!(total, Rational::from_integer(0));
            } else {
                prop_assert_eq!(total, action.cost);
                prop_assert_eq!(ens.allocated_cost(a), action.cost);
                let share = action.cost / Rational::from_integer(ens.rep_counts[a] as i128);
                for r in ens.tasks.iter().flat_map(|at| at.reps.iter()).filter(|r| r.action == a) {
                    prop_assert_eq!(r.cost, share);
                }
            }
        }
        let expected = match kind {
            HeuristicKind::Fork => EnsembleKind::F,
            HeuristicKind::IFork => EnsembleKind::I,
            HeuristicKind::ForkIFork => EnsembleKind::FI,
        };
        prop_assert_eq!(ens.kind, expected);
    }

    /// Roots are binary and sinks at most ternary after abstraction.
    #[test]
    fn center_sizes(seed in any::<u64>(), policies in policies()) {
        let t = task_from(seed);
        let h = build_heuristic(&t, HeuristicKind::ForkIFork, policies, Rounding::None);
        for at in &h.ensemble.tasks {
            let limit = match at.mapping.policy {
                MappingPolicy::DistInitTernary | MappingPolicy::DistGoalTernary => 3,
                _ => 2,
            };
            prop_assert!(at.vars[0].domain_size <= limit);
            prop_assert!(at.num_vars() >= 2);
        }
    }

    /// Admissible and consistent over the whole state space.
    #[test]
    fn admissible_and_consistent(seed in any::<u64>(), kind in kinds(), policies in policies()) {
        let t = task_from(seed);
        let oracle = oracle_from(&t, all_states(&t), ORACLE_CAP).unwrap();
        let h: HeuristicEnsemble = build_heuristic(&t, kind, policies, Rounding::default());
        for (s, hstar) in oracle.states() {
            let hs = forkplan_core::heuristics::Heuristic::evaluate(&h, s);
            prop_assert!(hs <= hstar, "h = {} > h* = {}", hs, hstar);
            prop_assert!(h_max(&t, s) <= hstar);
            for (a, succ) in oracle.transitions(s) {
                let hn = forkplan_core::heuristics::Heuristic::evaluate(&h, succ);
                prop_assert!(hs <= Cost::from(t.actions[a].cost) + hn);
            }
        }
        prop_assert_eq!(h.evaluate_exact(&goal_of(&t)), Cost::ZERO);
    }

    /// A* finds a valid plan of optimal cost, or proves there is none.
    #[test]
    fn astar_is_optimal(seed in any::<u64>(), kind in kinds()) {
        let t = task_from(seed);
        let oracle = dijkstra_oracle(&t, &t.initial, ORACLE_CAP).unwrap();
        let h = build_heuristic(&t, kind, Policies::default(), Rounding::default());
        let r = astar(&t, &h, SearchLimits::default());
        match (r.outcome, oracle.get(&t.initial).unwrap()) {
            (SearchOutcome::Solved(plan), Cost::Finite(c)) => {
                prop_assert_eq!(plan.cost, c);
                prop_assert_eq!(validate_plan(&t, &plan.actions), Ok(c));
            }
            (SearchOutcome::Unsolvable, Cost::Infinite) => {}
            (outcome, c) => prop_assert!(false, "search gave {:?}, oracle {}", outcome, c),
        }
    }
}
