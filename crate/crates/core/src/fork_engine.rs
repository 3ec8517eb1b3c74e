//! Exact solver and lookup database for fork tasks with a root of at most
//! two values.
//!
//! Along any plan the root walks an alternating sequence sigma of its two
//! values, and each leaf moves within the phases of sigma using only
//! representatives compatible with the current root value. With `p^x` the
//! all-pairs cheapest leaf costs under root value `x`, the database stores
//! `g[x][i][t]`: the cheapest way to bring a leaf from `t` to its goal while
//! the root walks an alternating sequence of length `i` starting at `x`.
//! Evaluating a state is then a minimum over sequence lengths of the root's
//! flip costs plus one table entry per leaf.

use alloc::vec;
use alloc::vec::Vec;

use crate::apsp::Apsp;
use crate::cost::{Cost, Scale, Units};
use crate::decomposition::{AbstractTask, SubgraphKind};
use crate::sas_model::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("expected a fork task")]
    NotAFork,
    #[error("fork root has {0} values, at most 2 supported")]
    RootTooLarge(usize),
    #[error("expected an inverted-fork task")]
    NotAnIFork,
    #[error("inverted-fork sink has {0} values, at most 3 supported")]
    SinkTooLarge(usize),
    #[error("inverted-fork sink has no goal value")]
    SinkWithoutGoal,
}

fn check_fork(task: &AbstractTask) -> Result<(), ShapeError> {
    if task.kind() != SubgraphKind::Fork {
        return Err(ShapeError::NotAFork);
    }
    if task.vars[0].domain_size > 2 {
        return Err(ShapeError::RootTooLarge(task.vars[0].domain_size));
    }
    Ok(())
}

/// Common denominator of a task's representative costs.
pub(crate) fn task_scale(task: &AbstractTask) -> Scale {
    Scale::for_costs(task.reps.iter().map(|r| r.cost))
}

/// Leaf arcs usable while the root has value `x`: (from, to, cost, rep).
fn leaf_arcs(task: &AbstractTask, scale: Scale, leaf: usize, x: Value) -> Vec<(Value, Value, Units, usize)> {
    let size = task.vars[leaf].domain_size as Value;
    let mut arcs = Vec::new();
    for (i, r) in task.reps_of(leaf) {
        if r.pre_on(0).is_some_and(|y| y != x) {
            continue;
        }
        let c = scale.units(r.cost);
        match r.own_pre() {
            Some(from) => arcs.push((from, r.eff, c, i)),
            None => arcs.extend((0..size).filter(|&f| f != r.eff).map(|f| (f, r.eff, c, i))),
        }
    }
    arcs
}

/// Cheapest root representative for each change x -> 1-x.
fn root_flips(task: &AbstractTask, scale: Scale) -> [(Units, Option<usize>); 2] {
    let mut best = [(Units::INF, None); 2];
    if task.vars[0].domain_size < 2 {
        return best;
    }
    for (i, r) in task.reps_of(0) {
        for x in 0..2u32 {
            let to = 1 - x;
            if r.eff == to && r.own_pre().map_or(true, |f| f == x) {
                let c = scale.units(r.cost);
                if c < best[x as usize].0 {
                    best[x as usize] = (c, Some(i));
                }
            }
        }
    }
    best
}

/// Longest root sequence worth considering.
fn max_sequence_len(task: &AbstractTask, leaves: &[usize]) -> usize {
    if task.vars[0].domain_size < 2 {
        return 1;
    }
    let widest = leaves.iter().map(|&v| task.vars[v].domain_size).max().unwrap_or(1);
    (1 + widest).max(2)
}

/// Value of the root at position `k` (0-based) of the sequence from `x`.
#[inline]
fn sigma_at(x: Value, k: usize) -> Value {
    if k % 2 == 0 {
        x
    } else {
        1 - x
    }
}

#[derive(Debug, Clone)]
struct LeafTable {
    local: usize,
    size: usize,
    /// `p[x][from * size + to]`
    p: Vec<Vec<Units>>,
    /// `g[(x * max_len + (len - 1)) * size + t]`
    g: Vec<Units>,
}

/// Precomputed tables answering optimal fork costs for arbitrary states.
#[derive(Debug, Clone)]
pub struct ForkDatabase {
    scale: Scale,
    root_size: usize,
    root_goal: Option<Value>,
    max_len: usize,
    /// `sigma[x][len - 1]`: total root change cost along the sequence.
    sigma: Vec<Vec<Units>>,
    leaves: Vec<LeafTable>,
}

impl ForkDatabase {
    /// Builds the database with costs measured at `scale`, which must be a
    /// multiple of every representative cost's denominator.
    pub fn build(task: &AbstractTask, scale: Scale) -> Result<ForkDatabase, ShapeError> {
        check_fork(task)?;
        let root_size = task.vars[0].domain_size;
        let goal_leaves: Vec<usize> = (1..task.num_vars()).filter(|&v| task.goal[v].is_some()).collect();
        let max_len = max_sequence_len(task, &goal_leaves);
        let flips = root_flips(task, scale);

        let sigma = (0..root_size as Value)
            .map(|x| {
                let mut acc = Units::ZERO;
                (0..max_len)
                    .map(|k| {
                        if k > 0 {
                            acc = acc + flips[sigma_at(x, k - 1) as usize].0;
                        }
                        acc
                    })
                    .collect()
            })
            .collect();

        let leaves = goal_leaves
            .iter()
            .map(|&v| {
                let size = task.vars[v].domain_size;
                let goal = task.goal[v].unwrap();
                let p: Vec<Vec<Units>> = (0..root_size as Value)
                    .map(|x| Apsp::new(size, leaf_arcs(task, scale, v, x)).into_table())
                    .collect();
                let mut g = vec![Units::INF; root_size * max_len * size];
                let at = |x: usize, len: usize, t: usize| (x * max_len + (len - 1)) * size + t;
                for len in 1..=max_len {
                    for x in 0..root_size {
                        for t in 0..size {
                            g[at(x, len, t)] = if len == 1 {
                                p[x][t * size + goal as usize]
                            } else if root_size < 2 {
                                Units::INF
                            } else {
                                (0..size)
                                    .map(|t2| p[x][t * size + t2] + g[at(1 - x, len - 1, t2)])
                                    .min()
                                    .unwrap()
                            };
                        }
                    }
                }
                LeafTable { local: v, size, p, g }
            })
            .collect();

        Ok(ForkDatabase { scale, root_size, root_goal: task.goal[0], max_len, sigma, leaves })
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn root_goal(&self) -> Option<Value> {
        self.root_goal
    }

    fn leaf(&self, local: usize) -> &LeafTable {
        self.leaves.iter().find(|l| l.local == local).expect("no table for this leaf")
    }

    /// Leaves with goal values, by local index.
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.leaves.iter().map(|l| l.local)
    }

    /// Cheapest leaf change from `from` to `to` under a fixed root value.
    pub fn p(&self, leaf: usize, root_value: Value, from: Value, to: Value) -> Cost {
        let l = self.leaf(leaf);
        self.scale.cost(l.p[root_value as usize][from as usize * l.size + to as usize])
    }

    /// Cheapest cost of bringing `leaf` from `value` to its goal while the
    /// root walks an alternating sequence of length `len` from `root_start`.
    pub fn g_tilde(&self, leaf: usize, value: Value, len: usize, root_start: Value) -> Cost {
        let l = self.leaf(leaf);
        self.scale.cost(l.g[(root_start as usize * self.max_len + (len - 1)) * l.size + value as usize])
    }

    /// Root change cost of the alternating sequence of length `len`.
    pub fn sigma_cost(&self, root_start: Value, len: usize) -> Cost {
        self.scale.cost(self.sigma[root_start as usize][len - 1])
    }

    /// Optimal cost from a local abstract state, in database units.
    #[inline]
    pub fn eval_units(&self, state: &[Value]) -> Units {
        self.eval_counted(state).0
    }

    /// Like [`eval_units`](Self::eval_units), also reporting the number of
    /// leaf table entries read.
    pub fn eval_counted(&self, state: &[Value]) -> (Units, usize) {
        let x = state[0] as usize;
        debug_assert!(x < self.root_size);
        let mut best = Units::INF;
        let mut lookups = 0;
        for len in 1..=self.max_len {
            if let Some(gr) = self.root_goal {
                if sigma_at(x as Value, len - 1) != gr {
                    continue;
                }
            }
            let mut total = self.sigma[x][len - 1];
            for l in &self.leaves {
                if total >= best {
                    break;
                }
                lookups += 1;
                total = total + l.g[(x * self.max_len + (len - 1)) * l.size + state[l.local] as usize];
            }
            best = best.min(total);
        }
        (best, lookups)
    }

    pub fn eval(&self, state: &[Value]) -> Cost {
        self.scale.cost(self.eval_units(state))
    }
}

/// Builds a database at the task's own cost scale.
pub fn build_fork_db(task: &AbstractTask) -> Result<ForkDatabase, ShapeError> {
    ForkDatabase::build(task, task_scale(task))
}

pub fn eval_fork_db(db: &ForkDatabase, state: &[Value]) -> Cost {
    db.eval(state)
}

/// Optimal cost and one optimal plan (representative indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub cost: Cost,
    pub plan: Option<Vec<usize>>,
}

/// Solves a fork task from one state without any precomputed tables: for
/// every root sequence, a layered shortest-path problem per leaf.
pub fn solve_fork(task: &AbstractTask, start: &[Value]) -> Result<Solution, ShapeError> {
    check_fork(task)?;
    let scale = task_scale(task);
    let root_size = task.vars[0].domain_size;
    let goal_leaves: Vec<usize> = (1..task.num_vars()).filter(|&v| task.goal[v].is_some()).collect();
    let max_len = max_sequence_len(task, &goal_leaves);
    let flips = root_flips(task, scale);
    let paths: Vec<Vec<Apsp>> = goal_leaves
        .iter()
        .map(|&v| {
            (0..root_size as Value)
                .map(|x| Apsp::new(task.vars[v].domain_size, leaf_arcs(task, scale, v, x)))
                .collect()
        })
        .collect();

    let x0 = start[0];
    let mut best: Option<(Units, usize, Vec<Vec<Value>>)> = None;
    let mut flip_total = Units::ZERO;
    for len in 1..=max_len {
        if len > 1 {
            flip_total = flip_total + flips[sigma_at(x0, len - 2) as usize].0;
        }
        if flip_total.is_inf() {
            break;
        }
        if task.goal[0].is_some_and(|g| g != sigma_at(x0, len - 1)) {
            continue;
        }
        let mut total = flip_total;
        let mut waypoints = Vec::with_capacity(goal_leaves.len());
        for (li, &v) in goal_leaves.iter().enumerate() {
            match layered(&paths[li], task.vars[v].domain_size, x0, len, start[v], task.goal[v].unwrap()) {
                Some((c, w)) => {
                    total = total + c;
                    waypoints.push(w);
                }
                None => total = Units::INF,
            }
            if total.is_inf() {
                break;
            }
        }
        if !total.is_inf() && best.as_ref().map_or(true, |b| total < b.0) {
            best = Some((total, len, waypoints));
        }
    }

    let Some((cost, len, waypoints)) = best else {
        return Ok(Solution { cost: Cost::Infinite, plan: None });
    };
    let mut plan = Vec::new();
    for k in 0..len {
        let x = sigma_at(x0, k);
        for (li, w) in waypoints.iter().enumerate() {
            plan.extend(paths[li][x as usize].path(w[k], w[k + 1]).expect("finite leg"));
        }
        if k + 1 < len {
            plan.push(flips[x as usize].1.expect("finite flip"));
        }
    }
    Ok(Solution { cost: scale.cost(cost), plan: Some(plan) })
}

/// Shortest path through layers 0..=len where layer k+1 is reached from
/// layer k under root value sigma[k]. Returns the cost and the leaf value
/// at each layer boundary.
fn layered(p: &[Apsp], size: usize, x0: Value, len: usize, from: Value, goal: Value) -> Option<(Units, Vec<Value>)> {
    let mut dist = vec![Units::INF; size];
    dist[from as usize] = Units::ZERO;
    let mut back: Vec<Vec<Value>> = Vec::with_capacity(len);
    for k in 0..len {
        let x = sigma_at(x0, k) as usize;
        let mut next = vec![Units::INF; size];
        let mut arg = vec![0 as Value; size];
        for (t, &dt) in dist.iter().enumerate() {
            if dt.is_inf() {
                continue;
            }
            for t2 in 0..size {
                let c = dt + p[x].dist(t as Value, t2 as Value);
                if c < next[t2] {
                    next[t2] = c;
                    arg[t2] = t as Value;
                }
            }
        }
        back.push(arg);
        dist = next;
    }
    let cost = dist[goal as usize];
    if cost.is_inf() {
        return None;
    }
    let mut w = vec![goal; len + 1];
    for k in (0..len).rev() {
        w[k] = back[k][w[k + 1] as usize];
    }
    debug_assert_eq!(w[0], from);
    Some((cost, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{build_ensemble, EnsembleKind, MappingPolicy};
    use crate::generators::{gripper, running_logistics, thm9_pi1};
    use crate::search::validate_plan_from;
    use crate::testutil::{explicit_costs, lone_task, toy};
    use crate::{State, Task};

    // r in {0,1} flips both ways at cost 1; v: 0 -> 1 needs r:1, 1 -> 2 needs r:0
    fn toy_fork() -> Task {
        toy(
            &[2, 3],
            &[0, 0],
            &[(1, 2)],
            &[
                (&[(0, 0)], &[(0, 1)], 1),
                (&[(0, 1)], &[(0, 0)], 1),
                (&[(0, 1), (1, 0)], &[(1, 1)], 1),
                (&[(0, 0), (1, 1)], &[(1, 2)], 1),
            ],
        )
    }

    fn check_against_oracle(t: &Task, at: &AbstractTask) {
        let db = build_fork_db(at).unwrap();
        let tt = at.to_task(t);
        for (s, expected) in explicit_costs(t, at) {
            let sol = solve_fork(at, &s).unwrap();
            assert_eq!(sol.cost, expected, "solve at {s:?}");
            assert_eq!(eval_fork_db(&db, &s), expected, "db at {s:?}");
            if let Some(plan) = sol.plan {
                let c = validate_plan_from(&tt, &State::new(s.clone()), &plan).unwrap();
                assert_eq!(Cost::from(c), expected);
            }
        }
    }

    #[test]
    fn toy_fork_costs_four() {
        let t = toy_fork();
        let at = lone_task(&t, true, 0);
        assert_eq!(solve_fork(&at, &[0, 0]).unwrap().cost, Cost::int(4));
        assert_eq!(eval_fork_db(&build_fork_db(&at).unwrap(), &[0, 0]), Cost::int(4));
        check_against_oracle(&t, &at);
    }

    #[test]
    fn goal_at_start_is_free() {
        let t = toy_fork();
        let at = lone_task(&t, true, 0);
        assert_eq!(solve_fork(&at, &[1, 2]).unwrap().cost, Cost::ZERO);
        assert_eq!(solve_fork(&at, &[1, 2]).unwrap().plan, Some(Vec::new()));
    }

    #[test]
    fn unreachable_leaf_goal_is_infinite() {
        // v can only go 0 -> 1; goal v:2
        let t = toy(&[2, 3], &[0, 0], &[(1, 2)], &[(&[(0, 0)], &[(0, 1)], 1), (&[(0, 1), (1, 0)], &[(1, 1)], 1)]);
        let at = lone_task(&t, true, 0);
        assert_eq!(solve_fork(&at, &[0, 0]).unwrap().cost, Cost::Infinite);
        assert_eq!(eval_fork_db(&build_fork_db(&at).unwrap(), &[0, 0]), Cost::Infinite);
        assert!(solve_fork(&at, &[0, 0]).unwrap().plan.is_none());
    }

    #[test]
    fn root_without_flips_has_single_row() {
        let t = toy(&[2, 2], &[0, 0], &[(1, 1)], &[(&[(0, 0), (1, 0)], &[(1, 1)], 2)]);
        let at = lone_task(&t, true, 0);
        let db = build_fork_db(&at).unwrap();
        assert!(db.sigma_cost(0, 1).is_finite());
        assert!((2..=db.max_len()).all(|len| db.sigma_cost(0, len) == Cost::Infinite));
        assert_eq!(db.eval(&[0, 0]), Cost::int(2));
        assert_eq!(db.eval(&[1, 0]), Cost::Infinite);
    }

    #[test]
    fn single_value_leaf_costs_nothing() {
        let t = toy(
            &[2, 1, 2],
            &[0, 0, 0],
            &[(1, 0), (2, 1)],
            &[(&[(0, 0)], &[(0, 1)], 1), (&[(0, 1)], &[(1, 0), (2, 1)], 1)],
        );
        let at = lone_task(&t, true, 0);
        let db = build_fork_db(&at).unwrap();
        let l = at.local_of(1).unwrap();
        assert!((1..=db.max_len()).all(|len| db.g_tilde(l, 0, len, 0) == Cost::ZERO));
        check_against_oracle(&t, &at);
    }

    #[test]
    fn g_tilde_is_nonincreasing_in_length() {
        let t = running_logistics();
        let ens = build_ensemble(&t, EnsembleKind::F, MappingPolicy::LeaveOneOut, MappingPolicy::DistGoalTernary);
        for at in &ens.tasks {
            let db = build_fork_db(at).unwrap();
            for l in db.leaves().collect::<Vec<_>>() {
                for x in 0..2 {
                    for value in 0..at.vars[l].domain_size as Value {
                        let row: Vec<Cost> = (1..=db.max_len()).map(|len| db.g_tilde(l, value, len, x)).collect();
                        assert!(row.windows(2).all(|w| w[1] <= w[0]), "{row:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_forks() {
        let t = toy_fork();
        let at = lone_task(&t, false, 1);
        assert_eq!(build_fork_db(&at).unwrap_err(), ShapeError::NotAFork);
        let wide = toy(&[3, 2], &[0, 0], &[(1, 1)], &[(&[(0, 2), (1, 0)], &[(1, 1)], 1)]);
        assert_eq!(solve_fork(&lone_task(&wide, true, 0), &[0, 0]).unwrap_err(), ShapeError::RootTooLarge(3));
    }

    #[test]
    fn ensemble_forks_match_oracle() {
        for t in [running_logistics(), gripper(2), thm9_pi1()] {
            for policy in [MappingPolicy::LeaveOneOut, MappingPolicy::DistInitBinary] {
                let ens = build_ensemble(&t, EnsembleKind::F, policy, MappingPolicy::DistGoalTernary);
                for at in ens.tasks.iter().filter(|at| at.state_space_size() <= 20_000) {
                    check_against_oracle(&t, at);
                }
            }
        }
    }

    #[test]
    fn lookups_scale_with_leaves() {
        let t = gripper(4);
        let ens = build_ensemble(&t, EnsembleKind::F, MappingPolicy::LeaveOneOut, MappingPolicy::DistGoalTernary);
        for at in &ens.tasks {
            let db = build_fork_db(at).unwrap();
            let leaves = db.leaves().count();
            let (_, n) = db.eval_counted(&at.init);
            assert!(n <= db.max_len() * leaves);
        }
    }
}
