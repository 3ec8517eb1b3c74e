//! A* with full duplicate elimination, an explicit-state oracle and plan
//! validation.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::time::Duration;

use hashbrown::HashMap;
use num_traits::Zero;

use crate::cost::{Cost, Rational};
use crate::heuristics::Heuristic;
use crate::sas_model::{State, Task};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub actions: Vec<usize>,
    pub cost: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub evaluated: u64,
    pub reopened: u64,
    pub h_initial: Option<Cost>,
    /// Filled in by callers that own a clock.
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Solved(Plan),
    Unsolvable,
    LimitExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchLimits {
    pub max_expansions: Option<u64>,
}

/// How often the interrupt callback is polled.
const POLL_INTERVAL: u64 = 256;

#[derive(PartialEq, Eq)]
struct OpenEntry {
    f: Cost,
    g: Cost,
    seq: u64,
    node: u32,
}

impl Ord for OpenEntry {
    /// Greatest = best: smallest f, then largest g, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .cmp(&self.f)
            .then_with(|| self.g.cmp(&other.g))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Node {
    g: Rational,
    h: Cost,
    parent: u32,
    action: u32,
    closed: bool,
}

const NO_PARENT: u32 = u32::MAX;

pub fn astar<H: Heuristic + ?Sized>(task: &Task, h: &H, limits: SearchLimits) -> SearchResult {
    astar_with_interrupt(task, h, limits, &mut || false)
}

/// A* that polls `should_stop` periodically (e.g. for a wall-clock cap)
/// and reports a limit when it returns true.
pub fn astar_with_interrupt<H: Heuristic + ?Sized>(
    task: &Task,
    h: &H,
    limits: SearchLimits,
    should_stop: &mut dyn FnMut() -> bool,
) -> SearchResult {
    let mut stats = SearchStats::default();
    let mut states: Vec<State> = Vec::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<State, u32> = HashMap::new();
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;

    let h0 = h.evaluate(&task.initial);
    stats.evaluated = 1;
    stats.generated = 1;
    stats.h_initial = Some(h0);
    if !h0.is_finite() {
        return SearchResult { outcome: SearchOutcome::Unsolvable, stats };
    }
    states.push(task.initial.clone());
    nodes.push(Node { g: Rational::zero(), h: h0, parent: NO_PARENT, action: 0, closed: false });
    index.insert(task.initial.clone(), 0);
    open.push(OpenEntry { f: h0, g: Cost::ZERO, seq, node: 0 });

    while let Some(entry) = open.pop() {
        let id = entry.node as usize;
        if nodes[id].closed || Cost::Finite(nodes[id].g) != entry.g {
            continue;
        }
        if task.is_goal(&states[id]) {
            let mut actions = Vec::new();
            let mut cur = id;
            while nodes[cur].parent != NO_PARENT {
                actions.push(nodes[cur].action as usize);
                cur = nodes[cur].parent as usize;
            }
            actions.reverse();
            let plan = Plan { actions, cost: nodes[id].g };
            return SearchResult { outcome: SearchOutcome::Solved(plan), stats };
        }
        if limits.max_expansions.is_some_and(|m| stats.expanded >= m)
            || (stats.expanded % POLL_INTERVAL == 0 && should_stop())
        {
            return SearchResult { outcome: SearchOutcome::LimitExceeded, stats };
        }
        nodes[id].closed = true;
        stats.expanded += 1;
        let g = nodes[id].g;
        let state = states[id].clone();
        for a in task.applicable_actions(&state) {
            let succ = task.apply(&state, a);
            let new_g = g + task.actions[a].cost;
            stats.generated += 1;
            let sid = match index.get(&succ) {
                Some(&sid) => {
                    let node = &mut nodes[sid as usize];
                    if new_g >= node.g {
                        continue;
                    }
                    node.g = new_g;
                    node.parent = id as u32;
                    node.action = a as u32;
                    if node.closed {
                        node.closed = false;
                        stats.reopened += 1;
                    }
                    sid
                }
                None => {
                    let hv = h.evaluate(&succ);
                    stats.evaluated += 1;
                    let sid = states.len() as u32;
                    index.insert(succ.clone(), sid);
                    states.push(succ);
                    nodes.push(Node { g: new_g, h: hv, parent: id as u32, action: a as u32, closed: false });
                    sid
                }
            };
            let node = &nodes[sid as usize];
            if node.h.is_finite() {
                seq += 1;
                let gc = Cost::Finite(node.g);
                open.push(OpenEntry { f: gc + node.h, g: gc, seq, node: sid });
            }
        }
    }
    SearchResult { outcome: SearchOutcome::Unsolvable, stats }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("more than {0} reachable states")]
    CapExceeded(usize),
}

pub const DEFAULT_ORACLE_CAP: usize = 1_000_000;

/// Exact goal distances for every state reachable from a set of seeds.
#[derive(Debug, Clone)]
pub struct OracleTable {
    states: Vec<State>,
    index: HashMap<State, usize>,
    h: Vec<Cost>,
    /// Outgoing transitions (action, successor) per state.
    succ: Vec<Vec<(usize, usize)>>,
}

impl OracleTable {
    pub fn get(&self, state: &State) -> Option<Cost> {
        self.index.get(state).map(|&i| self.h[i])
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = (&State, Cost)> + '_ {
        self.states.iter().zip(self.h.iter().copied())
    }

    /// Transitions out of a state as (action, successor).
    pub fn transitions<'a>(&'a self, state: &State) -> impl Iterator<Item = (usize, &'a State)> + 'a {
        let i = self.index[state];
        self.succ[i].iter().map(move |&(a, j)| (a, &self.states[j]))
    }
}

pub fn dijkstra_oracle(task: &Task, start: &State, cap: usize) -> Result<OracleTable, OracleError> {
    oracle_from(task, core::iter::once(start.clone()), cap)
}

/// Enumerates everything reachable from `seeds` and runs uniform-cost
/// search backwards from the goal states.
pub fn oracle_from<I: IntoIterator<Item = State>>(task: &Task, seeds: I, cap: usize) -> Result<OracleTable, OracleError> {
    let mut states = Vec::new();
    let mut index = HashMap::new();
    for s in seeds {
        if !index.contains_key(&s) {
            index.insert(s.clone(), states.len());
            states.push(s);
        }
    }
    if states.len() > cap {
        return Err(OracleError::CapExceeded(cap));
    }
    let mut succ: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut out = Vec::new();
        let s = states[i].clone();
        for a in task.applicable_actions(&s) {
            let t = task.apply(&s, a);
            let j = match index.get(&t) {
                Some(&j) => j,
                None => {
                    if states.len() >= cap {
                        return Err(OracleError::CapExceeded(cap));
                    }
                    index.insert(t.clone(), states.len());
                    states.push(t);
                    states.len() - 1
                }
            };
            out.push((a, j));
        }
        succ.push(out);
        i += 1;
    }

    let mut pred: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); states.len()];
    for (i, out) in succ.iter().enumerate() {
        for &(a, j) in out {
            pred[j].push((i, task.actions[a].cost));
        }
    }
    let mut h = vec![Cost::Infinite; states.len()];
    let mut heap = BinaryHeap::new();
    for (i, s) in states.iter().enumerate() {
        if task.is_goal(s) {
            h[i] = Cost::ZERO;
            heap.push(Reverse((Cost::ZERO, i)));
        }
    }
    while let Some(Reverse((c, j))) = heap.pop() {
        if c > h[j] {
            continue;
        }
        for &(i, w) in &pred[j] {
            let via = c + w;
            if via < h[i] {
                h[i] = via;
                heap.push(Reverse((via, i)));
            }
        }
    }
    Ok(OracleTable { states, index, h, succ })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("plan step {step}: {reason}")]
pub struct PlanViolation {
    pub step: usize,
    pub reason: String,
}

/// Replays a plan from the initial state; returns its cost.
pub fn validate_plan(task: &Task, actions: &[usize]) -> Result<Rational, PlanViolation> {
    validate_plan_from(task, &task.initial, actions)
}

pub fn validate_plan_from(task: &Task, start: &State, actions: &[usize]) -> Result<Rational, PlanViolation> {
    let mut state = start.clone();
    let mut cost = Rational::zero();
    for (step, &a) in actions.iter().enumerate() {
        if a >= task.actions.len() {
            return Err(PlanViolation { step, reason: alloc::format!("no action with index {a}") });
        }
        state = task
            .try_apply(&state, a)
            .map_err(|e| PlanViolation { step, reason: alloc::format!("{} {e}", task.actions[a].name) })?;
        cost += task.actions[a].cost;
    }
    if !task.is_goal(&state) {
        return Err(PlanViolation { step: actions.len(), reason: "final state is not a goal state".into() });
    }
    Ok(cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gripper, logistics_line, running_logistics};
    use crate::heuristics::{
        build_heuristic, Blind, BlindVariant, HMax, HeuristicKind, Policies, Rounding, Zero,
    };
    use crate::testutil::{action, toy};
    use alloc::boxed::Box;
    use alloc::vec;

    fn solved(r: &SearchResult) -> &Plan {
        match &r.outcome {
            SearchOutcome::Solved(p) => p,
            other => panic!("expected a plan, got {other:?}"),
        }
    }

    fn all_heuristics(t: &Task) -> Vec<Box<dyn Heuristic + '_>> {
        let mut hs: Vec<Box<dyn Heuristic + '_>> = vec![
            Box::new(Zero),
            Box::new(Blind::new(t, BlindVariant::MinActionCost)),
            Box::new(HMax::new(t)),
        ];
        for k in [HeuristicKind::Fork, HeuristicKind::IFork, HeuristicKind::ForkIFork] {
            hs.push(Box::new(build_heuristic(t, k, Policies::default(), Rounding::default())));
        }
        hs
    }

    #[test]
    fn running_example_optimum_is_nineteen() {
        let t = running_logistics();
        for h in all_heuristics(&t) {
            let r = astar(&t, h.as_ref(), SearchLimits::default());
            let plan = solved(&r);
            assert_eq!(plan.cost, Rational::from_integer(19));
            assert_eq!(validate_plan(&t, &plan.actions), Ok(plan.cost));
            assert_eq!(r.stats.reopened, 0);
        }
    }

    #[test]
    fn gripper_two_balls() {
        let t = gripper(2);
        for h in all_heuristics(&t) {
            assert_eq!(solved(&astar(&t, h.as_ref(), SearchLimits::default())).cost, Rational::from_integer(5));
        }
    }

    #[test]
    fn informed_search_expands_less() {
        let t = logistics_line(3);
        let blind = astar(&t, &Blind::new(&t, BlindVariant::MinActionCost), SearchLimits::default());
        let fi = build_heuristic(&t, HeuristicKind::ForkIFork, Policies::default(), Rounding::default());
        let informed = astar(&t, &fi, SearchLimits::default());
        assert_eq!(solved(&blind).cost, solved(&informed).cost);
        assert!(informed.stats.expanded <= blind.stats.expanded);
    }

    #[test]
    fn unreachable_goal() {
        let t = toy(&[2, 2], &[0, 0], &[(1, 1)], &[(&[(0, 0)], &[(0, 1)], 1)]);
        let r = astar(&t, &Zero, SearchLimits::default());
        assert_eq!(r.outcome, SearchOutcome::Unsolvable);
        assert_eq!(r.stats.expanded, 2);
    }

    #[test]
    fn infinite_initial_estimate_is_unsolvable() {
        let t = toy(&[2, 2], &[0, 0], &[(1, 1)], &[(&[(0, 0)], &[(0, 1)], 1)]);
        let r = astar(&t, &HMax::new(&t), SearchLimits::default());
        assert_eq!(r.outcome, SearchOutcome::Unsolvable);
        assert_eq!(r.stats.h_initial, Some(Cost::Infinite));
    }

    #[test]
    fn expansion_limit() {
        let t = running_logistics();
        let r = astar(&t, &Zero, SearchLimits { max_expansions: Some(10) });
        assert_eq!(r.outcome, SearchOutcome::LimitExceeded);
        assert!(r.stats.expanded <= 10);
    }

    #[test]
    fn interrupt_stops_search() {
        let t = running_logistics();
        let mut polls = 0;
        let r = astar_with_interrupt(&t, &Zero, SearchLimits::default(), &mut || {
            polls += 1;
            true
        });
        assert_eq!(r.outcome, SearchOutcome::LimitExceeded);
        assert!(polls >= 1);
    }

    #[test]
    fn goal_at_start() {
        let t = toy(&[2], &[1], &[(0, 1)], &[(&[(0, 1)], &[(0, 0)], 1)]);
        let plan = solved(&astar(&t, &Zero, SearchLimits::default())).clone();
        assert!(plan.actions.is_empty());
        assert_eq!(plan.cost, Rational::from_integer(0));
        assert_eq!(validate_plan(&t, &[]), Ok(Rational::from_integer(0)));
    }

    #[test]
    fn deterministic() {
        let t = gripper(3);
        let h = build_heuristic(&t, HeuristicKind::ForkIFork, Policies::default(), Rounding::default());
        let a = astar(&t, &h, SearchLimits::default());
        let b = astar(&t, &h, SearchLimits::default());
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn zero_cost_actions() {
        // free detour 0 -> 1 -> 2 versus a direct step 0 -> 2 costing 3
        let t = toy(&[3], &[0], &[(0, 2)], &[(&[(0, 0)], &[(0, 1)], 0), (&[(0, 1)], &[(0, 2)], 0), (&[(0, 0)], &[(0, 2)], 3)]);
        let plan = solved(&astar(&t, &Blind::new(&t, BlindVariant::MinActionCost), SearchLimits::default())).clone();
        assert_eq!(plan.cost, Rational::from_integer(0));
        assert_eq!(plan.actions, vec![0, 1]);
    }

    #[test]
    fn validation_errors() {
        let t = running_logistics();
        let plan = solved(&astar(&t, &Zero, SearchLimits::default())).actions.clone();
        let mut swapped = plan.clone();
        swapped.swap(0, 1);
        if swapped != plan {
            assert!(validate_plan(&t, &swapped).is_err());
        }
        let e = validate_plan(&t, &plan[..plan.len() - 1]).unwrap_err();
        assert_eq!(e.step, plan.len() - 1);
        assert_eq!(validate_plan(&t, &[t.actions.len()]).unwrap_err().step, 0);
        let unload = action(&t, "unload-p1-from-c1-at-D");
        let e = validate_plan(&t, &[unload]).unwrap_err();
        assert_eq!(e.step, 0);
    }

    #[test]
    fn oracle_matches_search() {
        let t = running_logistics();
        let table = dijkstra_oracle(&t, &t.initial, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(table.get(&t.initial), Some(Cost::int(19)));
        for (s, c) in table.states().take(200) {
            if c.is_finite() {
                let mut sub = t.clone();
                sub.initial = s.clone();
                let p = solved(&astar(&sub, &HMax::new(&sub), SearchLimits::default())).cost;
                assert_eq!(Cost::from(p), c);
            }
        }
    }

    #[test]
    fn oracle_cap() {
        let t = gripper(3);
        assert_eq!(dijkstra_oracle(&t, &t.initial, 5).unwrap_err(), OracleError::CapExceeded(5));
    }

    #[test]
    fn toy_fork_oracle() {
        let t = toy(
            &[2, 3],
            &[0, 0],
            &[(1, 2)],
            &[
                (&[(0, 0)], &[(0, 1)], 1),
                (&[(0, 1)], &[(0, 0)], 1),
                (&[(0, 1), (1, 0)], &[(1, 1)], 1),
                (&[(0, 0), (1, 1)], &[(1, 2)], 1),
            ],
        );
        let table = dijkstra_oracle(&t, &t.initial, 100).unwrap();
        assert_eq!(table.get(&t.initial), Some(Cost::int(4)));
        assert_eq!(table.len(), 6);
    }
}
