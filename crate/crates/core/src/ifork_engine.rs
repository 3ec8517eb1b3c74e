//! Exact solver and lookup database for inverted-fork tasks with a sink of
//! at most three values.
//!
//! Parents have no preconditions outside themselves, so they move
//! independently along cheapest paths. An optimal plan follows some
//! vertex-simple path of the sink to its goal; for each such path the
//! parents only need to visit the values the path requires, in order. The
//! database stores, for every path from every sink value, the first value
//! each parent must reach (the proxy) and the cost of the plan from there.

use alloc::vec;
use alloc::vec::Vec;

use crate::apsp::Apsp;
use crate::cost::{Cost, Scale, Units};
use crate::decomposition::{AbstractTask, SubgraphKind};
use crate::fork_engine::{task_scale, ShapeError, Solution};
use crate::sas_model::Value;

const MAX_SINK: usize = 3;

fn check_ifork(task: &AbstractTask) -> Result<Value, ShapeError> {
    if task.kind() != SubgraphKind::IFork {
        return Err(ShapeError::NotAnIFork);
    }
    if task.vars[0].domain_size > MAX_SINK {
        return Err(ShapeError::SinkTooLarge(task.vars[0].domain_size));
    }
    task.goal[0].ok_or(ShapeError::SinkWithoutGoal)
}

fn parent_paths(task: &AbstractTask, scale: Scale, v: usize) -> Apsp {
    let size = task.vars[v].domain_size as Value;
    let mut arcs = Vec::new();
    for (i, r) in task.reps_of(v) {
        let c = scale.units(r.cost);
        match r.own_pre() {
            Some(from) => arcs.push((from, r.eff, c, i)),
            None => arcs.extend((0..size).filter(|&f| f != r.eff).map(|f| (f, r.eff, c, i))),
        }
    }
    Apsp::new(task.vars[v].domain_size, arcs)
}

/// All vertex-simple sink paths from `origin` to the sink goal, as
/// representative index sequences. Parallel representatives and wildcard
/// origins give distinct paths.
pub fn sink_paths(task: &AbstractTask, origin: Value) -> Vec<Vec<usize>> {
    let goal = task.goal[0].expect("sink goal");
    let sink_reps: Vec<usize> = task.reps_of(0).map(|(i, _)| i).collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let mut visited = vec![false; task.vars[0].domain_size];
    fn dfs(
        task: &AbstractTask,
        sink_reps: &[usize],
        goal: Value,
        cur: Value,
        visited: &mut [bool],
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur == goal {
            out.push(stack.clone());
            return;
        }
        visited[cur as usize] = true;
        for &i in sink_reps {
            let r = &task.reps[i];
            if r.eff != cur && !visited[r.eff as usize] && r.own_pre().map_or(true, |f| f == cur) {
                stack.push(i);
                dfs(task, sink_reps, goal, r.eff, visited, stack, out);
                stack.pop();
            }
        }
        visited[cur as usize] = false;
    }
    dfs(task, &sink_reps, goal, origin, &mut visited, &mut stack, &mut out);
    out
}

/// Values each parent must hold along a path: `seq[v][i]` for the i-th
/// step (0-based), `None` when unconstrained so far.
fn required_values(task: &AbstractTask, path: &[usize], v: usize) -> Vec<Option<Value>> {
    path.iter().map(|&i| task.reps[i].pre_on(v)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredPath {
    pub actions: Vec<usize>,
    /// First value required of each parent (by position in
    /// [`IForkDatabase::parents`]), else its goal, else unconstrained.
    pub proxy: Vec<Option<Value>>,
    pub g: Units,
}

#[derive(Debug, Clone)]
pub struct IForkDatabase {
    scale: Scale,
    sink_goal: Value,
    parents: Vec<usize>,
    sizes: Vec<usize>,
    /// Per parent position, `p[from * size + to]`.
    p: Vec<Vec<Units>>,
    /// Stored paths grouped by sink origin value.
    paths: Vec<Vec<StoredPath>>,
}

impl IForkDatabase {
    pub fn build(task: &AbstractTask, scale: Scale) -> Result<IForkDatabase, ShapeError> {
        let sink_goal = check_ifork(task)?;
        let parents: Vec<usize> = (1..task.num_vars()).collect();
        let sizes: Vec<usize> = parents.iter().map(|&v| task.vars[v].domain_size).collect();
        let p: Vec<Vec<Units>> = parents.iter().map(|&v| parent_paths(task, scale, v).into_table()).collect();
        let cost_p = |k: usize, from: Value, to: Value| p[k][from as usize * sizes[k] + to as usize];

        let mut paths = Vec::with_capacity(task.vars[0].domain_size);
        for origin in 0..task.vars[0].domain_size as Value {
            let mut stored = Vec::new();
            for actions in sink_paths(task, origin) {
                let mut g: Units = actions.iter().map(|&i| scale.units(task.reps[i].cost)).sum();
                let mut proxy = Vec::with_capacity(parents.len());
                for (k, &v) in parents.iter().enumerate() {
                    let required = required_values(task, &actions, v);
                    let goal = task.goal[v];
                    let first = required.iter().flatten().next().copied().or(goal);
                    proxy.push(first);
                    let Some(mut cur) = first else { continue };
                    for next in required.iter().flatten().copied().chain(goal) {
                        g = g + cost_p(k, cur, next);
                        cur = next;
                    }
                }
                if !g.is_inf() {
                    stored.push(StoredPath { actions, proxy, g });
                }
            }
            paths.push(stored);
        }
        Ok(IForkDatabase { scale, sink_goal, parents, sizes, p, paths })
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn sink_goal(&self) -> Value {
        self.sink_goal
    }

    /// Local indices of the parents, in proxy order.
    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn paths(&self, origin: Value) -> &[StoredPath] {
        &self.paths[origin as usize]
    }

    pub fn p(&self, position: usize, from: Value, to: Value) -> Cost {
        self.scale.cost(self.p[position][from as usize * self.sizes[position] + to as usize])
    }

    pub fn eval_units(&self, state: &[Value]) -> Units {
        let mut best = Units::INF;
        for path in &self.paths[state[0] as usize] {
            let mut total = path.g;
            for (k, proxy) in path.proxy.iter().enumerate() {
                if let Some(t) = proxy {
                    total = total + self.p[k][state[self.parents[k]] as usize * self.sizes[k] + *t as usize];
                }
            }
            best = best.min(total);
        }
        best
    }

    pub fn eval(&self, state: &[Value]) -> Cost {
        self.scale.cost(self.eval_units(state))
    }
}

pub fn build_ifork_db(task: &AbstractTask) -> Result<IForkDatabase, ShapeError> {
    IForkDatabase::build(task, task_scale(task))
}

pub fn eval_ifork_db(db: &IForkDatabase, state: &[Value]) -> Cost {
    db.eval(state)
}

/// Solves an inverted-fork task from one state: every simple sink path,
/// with parents moved along cheapest paths to each required value just
/// before it is needed and to their goals at the end.
pub fn solve_ifork(task: &AbstractTask, start: &[Value]) -> Result<Solution, ShapeError> {
    check_ifork(task)?;
    let scale = task_scale(task);
    let parents: Vec<usize> = (1..task.num_vars()).collect();
    let apsp: Vec<Apsp> = parents.iter().map(|&v| parent_paths(task, scale, v)).collect();

    let mut best: Option<(Units, Vec<usize>)> = None;
    for path in sink_paths(task, start[0]) {
        let mut total: Units = path.iter().map(|&i| scale.units(task.reps[i].cost)).sum();
        for (k, &v) in parents.iter().enumerate() {
            let mut cur = start[v];
            for next in required_values(task, &path, v).into_iter().flatten().chain(task.goal[v]) {
                total = total + apsp[k].dist(cur, next);
                cur = next;
            }
        }
        if !total.is_inf() && best.as_ref().map_or(true, |b| total < b.0) {
            best = Some((total, path));
        }
    }
    let Some((cost, path)) = best else {
        return Ok(Solution { cost: Cost::Infinite, plan: None });
    };

    let mut plan = Vec::new();
    let mut cur: Vec<Value> = parents.iter().map(|&v| start[v]).collect();
    for &a in &path {
        for (k, &v) in parents.iter().enumerate() {
            if let Some(need) = task.reps[a].pre_on(v) {
                plan.extend(apsp[k].path(cur[k], need).expect("finite leg"));
                cur[k] = need;
            }
        }
        plan.push(a);
    }
    for (k, &v) in parents.iter().enumerate() {
        if let Some(g) = task.goal[v] {
            plan.extend(apsp[k].path(cur[k], g).expect("finite leg"));
        }
    }
    Ok(Solution { cost: scale.cost(cost), plan: Some(plan) })
}
