//! Fork and inverted-fork decomposition with domain abstraction of the
//! center variable, redundancy pruning and the joint uniform cost
//! partition.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::cost::Rational;
use crate::sas_model::{Action, PartialAssignment, State, Task, Value, VarId, VariableDef};
use crate::task_graphs::{causal_graph, dtg, hop_distances, hop_distances_to, CausalGraph, DomainTransitionGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubgraphKind {
    Fork,
    IFork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    F,
    I,
    FI,
}

/// A v-fork (center plus its successors) or v-ifork (center plus its
/// predecessors). Members are sorted and include the center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub kind: SubgraphKind,
    pub center: VarId,
    pub members: Vec<VarId>,
}

impl Subgraph {
    pub fn fork(cg: &CausalGraph, v: VarId) -> Subgraph {
        Self::with_neighbours(SubgraphKind::Fork, v, cg.succ(v))
    }

    pub fn ifork(cg: &CausalGraph, v: VarId) -> Subgraph {
        Self::with_neighbours(SubgraphKind::IFork, v, cg.pred(v))
    }

    fn with_neighbours(kind: SubgraphKind, center: VarId, others: &[VarId]) -> Subgraph {
        let mut members = others.to_vec();
        members.push(center);
        members.sort_unstable();
        Subgraph { kind, center, members }
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Is (u, v) an edge of the subgraph?
    pub fn has_edge(&self, u: VarId, v: VarId) -> bool {
        u != v
            && self.contains(u)
            && self.contains(v)
            && match self.kind {
                SubgraphKind::Fork => u == self.center,
                SubgraphKind::IFork => v == self.center,
            }
    }

    /// Sort key for a topological order: roots and parents first.
    fn topo_key(&self, v: VarId) -> (u8, VarId) {
        let center_first = self.kind == SubgraphKind::Fork;
        match (v == self.center, center_first) {
            (true, true) | (false, false) => (0, v),
            _ => (1, v),
        }
    }
}

pub fn enumerate_subgraphs(task: &Task, cg: &CausalGraph, kind: EnsembleKind) -> Vec<Subgraph> {
    let mut out = Vec::new();
    if matches!(kind, EnsembleKind::F | EnsembleKind::FI) {
        out.extend((0..task.num_vars()).filter(|&v| !cg.succ(v).is_empty()).map(|v| Subgraph::fork(cg, v)));
    }
    if matches!(kind, EnsembleKind::I | EnsembleKind::FI) {
        out.extend(
            (0..task.num_vars())
                .filter(|&v| !cg.pred(v).is_empty() && task.goal.contains_var(v))
                .map(|v| Subgraph::ifork(cg, v)),
        );
    }
    out
}

/// Single-effect piece of an action inside a subgraph, over original
/// variables and values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRep {
    pub var: VarId,
    pub pre: PartialAssignment,
    pub eff: Value,
}

/// Splits an action into one single-effect representative per affected
/// subgraph member, in topological order. A representative of v keeps the
/// action's precondition on v and, for every subgraph edge (u, v), requires
/// eff(a)[u] if the action changes u and pre(a)[u] otherwise.
pub fn split_action(action: &Action, sub: &Subgraph) -> Vec<SplitRep> {
    let mut vars: Vec<VarId> = action.eff.vars().filter(|&v| sub.contains(v)).collect();
    vars.sort_by_key(|&v| sub.topo_key(v));
    vars.into_iter()
        .map(|v| {
            let mut pre = Vec::new();
            if let Some(x) = action.pre.get(v) {
                pre.push((v, x));
            }
            for &u in &sub.members {
                if sub.has_edge(u, v) {
                    if let Some(y) = action.eff.get(u).or_else(|| action.pre.get(u)) {
                        pre.push((u, y));
                    }
                }
            }
            SplitRep {
                var: v,
                pre: PartialAssignment::from_pairs(pre).expect("distinct variables"),
                eff: action.eff.get(v).unwrap(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MappingPolicy {
    /// No abstraction; only for explicit solving in tests and tools.
    Identity,
    /// Value i against all other values.
    LeaveOneOut,
    /// Values closer than i hops to the initial value against the rest.
    DistInitBinary,
    /// Closer than 2i-1 hops from the initial value, exactly 2i-1, farther.
    DistInitTernary,
    /// As above with hop distance to the goal value.
    DistGoalTernary,
}

/// Surjective map of a variable's domain onto {0, .., abstract_size-1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainMapping {
    pub variable: VarId,
    pub map: Vec<Value>,
    pub abstract_size: usize,
    pub policy: MappingPolicy,
    pub index: usize,
}

impl DomainMapping {
    pub fn identity(variable: VarId, domain_size: usize) -> DomainMapping {
        DomainMapping {
            variable,
            map: (0..domain_size as Value).collect(),
            abstract_size: domain_size,
            policy: MappingPolicy::Identity,
            index: 0,
        }
    }

    /// Builds a mapping from raw labels, renumbering used labels onto a
    /// contiguous range while keeping their order.
    fn compacted(variable: VarId, raw: Vec<Value>, policy: MappingPolicy, index: usize) -> DomainMapping {
        let mut used: Vec<Value> = raw.clone();
        used.sort_unstable();
        used.dedup();
        let map = raw.iter().map(|x| used.binary_search(x).unwrap() as Value).collect();
        DomainMapping { variable, map, abstract_size: used.len(), policy, index }
    }

    #[inline]
    pub fn apply(&self, x: Value) -> Value {
        self.map[x as usize]
    }

    /// Original values grouped by abstract value.
    pub fn classes(&self) -> Vec<Vec<Value>> {
        let mut classes = vec![Vec::new(); self.abstract_size];
        for (x, &y) in self.map.iter().enumerate() {
            classes[y as usize].push(x as Value);
        }
        classes
    }

    /// Labels renumbered by first occurrence; equal for equal partitions.
    pub fn canonical(&self) -> Vec<Value> {
        let mut seen: Vec<Value> = Vec::new();
        self.map
            .iter()
            .map(|y| match seen.iter().position(|s| s == y) {
                Some(i) => i as Value,
                None => {
                    seen.push(*y);
                    (seen.len() - 1) as Value
                }
            })
            .collect()
    }
}

fn ternary(d: Option<u32>, i: usize) -> Value {
    let pivot = 2 * i as u32 - 1;
    match d {
        Some(d) if d < pivot => 0,
        Some(d) if d == pivot => 1,
        _ => 2,
    }
}

/// The i-th mapping of a policy. Hop distances ignore costs; unreachable
/// values land in the farthest class.
pub fn make_mapping(
    policy: MappingPolicy,
    dtg: &DomainTransitionGraph,
    init: Value,
    goal: Option<Value>,
    i: usize,
) -> DomainMapping {
    let v = dtg.variable;
    let k = dtg.domain_size;
    let raw: Vec<Value> = match policy {
        MappingPolicy::Identity => return DomainMapping::identity(v, k),
        MappingPolicy::LeaveOneOut => (0..k).map(|x| if x == i { 0 } else { 1 }).collect(),
        MappingPolicy::DistInitBinary => hop_distances(dtg, init)
            .dist
            .iter()
            .map(|d| match d {
                Some(d) if (*d as usize) < i => 0,
                _ => 1,
            })
            .collect(),
        MappingPolicy::DistInitTernary => hop_distances(dtg, init).dist.iter().map(|&d| ternary(d, i)).collect(),
        MappingPolicy::DistGoalTernary => {
            let g = goal.expect("distance-to-goal mapping needs a goal value");
            hop_distances_to(dtg, g).dist.iter().map(|&d| ternary(d, i)).collect()
        }
    };
    DomainMapping::compacted(v, raw, policy, i)
}

/// Index range of a policy for one variable. Distance policies always
/// yield at least index 1.
///
/// With `cap_at_goal`, distance-from-initial policies stop at the goal
/// value's distance: every later index maps the initial and goal values to
/// the same class.
pub fn mapping_indices(
    policy: MappingPolicy,
    dtg: &DomainTransitionGraph,
    init: Value,
    goal: Option<Value>,
    cap_at_goal: bool,
) -> core::ops::RangeInclusive<usize> {
    match policy {
        MappingPolicy::Identity => 0..=0,
        MappingPolicy::LeaveOneOut => 0..=dtg.domain_size - 1,
        MappingPolicy::DistInitBinary => 1..=init_reach(dtg, init, goal, cap_at_goal).max(1),
        MappingPolicy::DistInitTernary => 1..=init_reach(dtg, init, goal, cap_at_goal).div_ceil(2).max(1),
        MappingPolicy::DistGoalTernary => {
            let g = goal.expect("distance-to-goal mapping needs a goal value");
            1..=(hop_distances_to(dtg, g).max_finite() as usize).div_ceil(2).max(1)
        }
    }
}

fn init_reach(dtg: &DomainTransitionGraph, init: Value, goal: Option<Value>, cap_at_goal: bool) -> usize {
    let d = hop_distances(dtg, init);
    match goal.and_then(|g| d.dist[g as usize]) {
        Some(g) if cap_at_goal => g as usize,
        _ => d.max_finite() as usize,
    }
}

/// All mappings of a policy for one variable, dropping repeated partitions.
pub fn mapping_family(
    policy: MappingPolicy,
    dtg: &DomainTransitionGraph,
    init: Value,
    goal: Option<Value>,
    cap_at_goal: bool,
) -> Vec<DomainMapping> {
    let mut out: Vec<DomainMapping> = Vec::new();
    let mut seen: Vec<Vec<Value>> = Vec::new();
    for i in mapping_indices(policy, dtg, init, goal, cap_at_goal) {
        let m = make_mapping(policy, dtg, init, goal, i);
        let canon = m.canonical();
        if !seen.contains(&canon) {
            seen.push(canon);
            out.push(m);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbstractVar {
    pub original: VarId,
    pub domain_size: usize,
}

/// Single-effect abstract action over local variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representative {
    pub action: usize,
    pub var: usize,
    /// Sorted by local variable.
    pub pre: Vec<(usize, Value)>,
    pub eff: Value,
    pub cost: Rational,
    pub redundant: bool,
}

impl Representative {
    pub fn pre_on(&self, local: usize) -> Option<Value> {
        self.pre.iter().find(|e| e.0 == local).map(|e| e.1)
    }

    pub fn own_pre(&self) -> Option<Value> {
        self.pre_on(self.var)
    }

    pub fn is_applicable(&self, state: &[Value]) -> bool {
        self.pre.iter().all(|&(v, x)| state[v] == x)
    }
}

/// A fork or ifork task with its center domain abstracted. Local variable
/// 0 is always the center; the others follow in original order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractTask {
    pub origin: Subgraph,
    pub mapping: DomainMapping,
    pub vars: Vec<AbstractVar>,
    pub init: Vec<Value>,
    pub goal: Vec<Option<Value>>,
    pub reps: Vec<Representative>,
}

impl AbstractTask {
    pub fn kind(&self) -> SubgraphKind {
        self.origin.kind
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn local_of(&self, original: VarId) -> Option<usize> {
        self.vars.iter().position(|v| v.original == original)
    }

    /// Projects and maps an original state.
    pub fn project_into(&self, state: &[Value], out: &mut Vec<Value>) {
        out.clear();
        out.push(self.mapping.apply(state[self.vars[0].original]));
        out.extend(self.vars[1..].iter().map(|v| state[v.original]));
    }

    pub fn project(&self, state: &State) -> Vec<Value> {
        let mut out = Vec::with_capacity(self.vars.len());
        self.project_into(&state.values, &mut out);
        out
    }

    pub fn is_goal(&self, state: &[Value]) -> bool {
        self.goal.iter().zip(state).all(|(g, x)| g.map_or(true, |g| g == *x))
    }

    /// Representatives whose effect is on the given local variable.
    pub fn reps_of(&self, local: usize) -> impl Iterator<Item = (usize, &Representative)> + '_ {
        self.reps.iter().enumerate().filter(move |(_, r)| r.var == local)
    }

    pub fn state_space_size(&self) -> u128 {
        self.vars.iter().fold(1u128, |acc, v| acc.saturating_mul(v.domain_size as u128))
    }

    /// The abstract task as an ordinary task, for explicit search.
    pub fn to_task(&self, task: &Task) -> Task {
        let variables = self
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let def = &task.variables[v.original];
                if i == 0 {
                    let names = self
                        .mapping
                        .classes()
                        .iter()
                        .map(|c| {
                            let parts: Vec<&str> = c.iter().map(|&x| def.value_names[x as usize].as_str()).collect();
                            format!("{{{}}}", parts.join(","))
                        })
                        .collect();
                    VariableDef::new(def.name.clone(), names)
                } else {
                    def.clone()
                }
            })
            .collect();
        let actions = self
            .reps
            .iter()
            .map(|r| {
                Action::new(
                    format!("{}^{}", task.actions[r.action].name, task.variables[self.vars[r.var].original].name),
                    PartialAssignment::of(&r.pre),
                    PartialAssignment::of(&[(r.var, r.eff)]),
                    r.cost,
                )
            })
            .collect();
        let goal = PartialAssignment::of(
            &self.goal.iter().enumerate().filter_map(|(v, g)| g.map(|g| (v, g))).collect::<Vec<_>>(),
        );
        Task::new(variables, State::new(self.init.clone()), goal, actions, true).expect("abstract task is valid")
    }

    /// Keeps only the flagged local variables, renumbering the rest.
    fn retain_vars(&mut self, keep: &[bool]) {
        let mut new_index = vec![usize::MAX; keep.len()];
        let mut next = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_index[i] = next;
                next += 1;
            }
        }
        retain_flagged(&mut self.vars, keep);
        retain_flagged(&mut self.init, keep);
        retain_flagged(&mut self.goal, keep);
        self.reps.retain(|r| keep[r.var]);
        for r in &mut self.reps {
            r.var = new_index[r.var];
            r.pre.retain(|e| keep[e.0]);
            for e in &mut r.pre {
                e.0 = new_index[e.0];
            }
        }
    }
}

fn retain_flagged<T>(v: &mut Vec<T>, keep: &[bool]) {
    let mut i = 0;
    v.retain(|_| {
        i += 1;
        keep[i - 1]
    });
}

/// Builds the abstract task of a subgraph under a mapping of its center,
/// flagging redundant representatives but not yet pruning anything.
pub fn build_abstract_task(task: &Task, sub: &Subgraph, mapping: DomainMapping) -> AbstractTask {
    assert_eq!(mapping.variable, sub.center, "mapping must target the subgraph center");
    let mut order = vec![sub.center];
    order.extend(sub.members.iter().copied().filter(|&v| v != sub.center));
    let local = |v: VarId| order.iter().position(|&o| o == v).unwrap();
    let map_value = |v: VarId, x: Value| if v == sub.center { mapping.apply(x) } else { x };

    let vars = order
        .iter()
        .enumerate()
        .map(|(i, &v)| AbstractVar {
            original: v,
            domain_size: if i == 0 { mapping.abstract_size } else { task.domain_size(v) },
        })
        .collect();
    let init = order.iter().map(|&v| map_value(v, task.initial[v])).collect();
    let goal = order.iter().map(|&v| task.goal.get(v).map(|g| map_value(v, g))).collect();

    let mut reps = Vec::new();
    for (ai, action) in task.actions.iter().enumerate() {
        for sr in split_action(action, sub) {
            let mut pre: Vec<(usize, Value)> = sr.pre.iter().map(|(u, x)| (local(u), map_value(u, x))).collect();
            pre.sort_unstable();
            let var = local(sr.var);
            let eff = map_value(sr.var, sr.eff);
            let redundant = pre.iter().any(|&(u, x)| u == var && x == eff);
            reps.push(Representative { action: ai, var, pre, eff, cost: Rational::zero(), redundant });
        }
    }
    AbstractTask { origin: sub.clone(), mapping, vars, init, goal, reps }
}

/// Drops redundant representatives, then (ifork) parents no sink
/// representative depends on or (fork) leaves without a goal, to a
/// fixpoint. Tasks left with fewer than two variables vanish.
pub fn prune(mut t: AbstractTask) -> Option<AbstractTask> {
    loop {
        t.reps.retain(|r| !r.redundant);
        let n = t.vars.len();
        let mut keep = vec![true; n];
        for (v, k) in keep.iter_mut().enumerate().skip(1) {
            *k = match t.origin.kind {
                SubgraphKind::IFork => t.reps.iter().any(|r| r.var == 0 && r.pre_on(v).is_some()),
                SubgraphKind::Fork => t.goal[v].is_some(),
            };
        }
        if keep.iter().all(|&k| k) {
            break;
        }
        t.retain_vars(&keep);
    }
    (t.vars.len() >= 2).then_some(t)
}

/// The final additive abstraction with its joint uniform cost partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractionEnsemble {
    pub kind: EnsembleKind,
    pub tasks: Vec<AbstractTask>,
    /// N(a): surviving representatives of each original action.
    pub rep_counts: Vec<usize>,
}

impl AbstractionEnsemble {
    /// Sum of partitioned costs of all representatives of an action.
    pub fn allocated_cost(&self, action: usize) -> Rational {
        self.tasks
            .iter()
            .flat_map(|t| t.reps.iter())
            .filter(|r| r.action == action)
            .map(|r| r.cost)
            .sum()
    }
}

/// Splits every action's cost evenly over its surviving representatives.
pub fn uniform_partition(task: &Task, kind: EnsembleKind, mut tasks: Vec<AbstractTask>) -> AbstractionEnsemble {
    let mut rep_counts = vec![0usize; task.actions.len()];
    for r in tasks.iter().flat_map(|t| t.reps.iter()) {
        debug_assert!(!r.redundant);
        rep_counts[r.action] += 1;
    }
    for r in tasks.iter_mut().flat_map(|t| t.reps.iter_mut()) {
        r.cost = task.actions[r.action].cost / Rational::from_integer(rep_counts[r.action] as i128);
    }
    AbstractionEnsemble { kind, tasks, rep_counts }
}

/// Decomposes, abstracts, prunes and partitions.
pub fn build_ensemble(
    task: &Task,
    kind: EnsembleKind,
    root_policy: MappingPolicy,
    sink_policy: MappingPolicy,
) -> AbstractionEnsemble {
    let cg = causal_graph(task);
    let mut tasks = Vec::new();
    for sub in enumerate_subgraphs(task, &cg, kind) {
        let (policy, cap) = match sub.kind {
            SubgraphKind::Fork => (root_policy, false),
            SubgraphKind::IFork => (sink_policy, true),
        };
        let graph = dtg(task, sub.center);
        let goal = task.goal.get(sub.center);
        for m in mapping_family(policy, &graph, task.initial[sub.center], goal, cap) {
            if let Some(t) = prune(build_abstract_task(task, &sub, m)) {
                tasks.push(t);
            }
        }
    }
    uniform_partition(task, kind, tasks)
}

/// Human-readable listing of an ensemble: tasks, variables, representative
/// counts and partitioned costs.
pub fn describe(task: &Task, ensemble: &AbstractionEnsemble) -> String {
    let mut out = String::new();
    for (i, t) in ensemble.tasks.iter().enumerate() {
        let kind = match t.kind() {
            SubgraphKind::Fork => "fork",
            SubgraphKind::IFork => "ifork",
        };
        let center = &task.variables[t.origin.center].name;
        out.push_str(&format!("task {i}: {kind} {center} {:?} #{}\n", t.mapping.policy, t.mapping.index));
        for v in &t.vars {
            out.push_str(&format!("  var {} |D|={}\n", task.variables[v.original].name, v.domain_size));
        }
        let mut actions: Vec<usize> = t.reps.iter().map(|r| r.action).collect();
        actions.dedup();
        for a in actions {
            let count = t.reps.iter().filter(|r| r.action == a).count();
            let cost = t.reps.iter().find(|r| r.action == a).unwrap().cost;
            out.push_str(&format!("  {} x{count} cost {}\n", task.actions[a].name, crate::cost::Cost::from(cost)));
        }
    }
    out
}
