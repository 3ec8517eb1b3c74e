//! Name lookups shared by unit tests.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::sas_model::{Action, PartialAssignment, State, Task, Value, VarId, VariableDef};

pub fn var(t: &Task, name: &str) -> VarId {
    t.variables.iter().position(|v| v.name == name).unwrap_or_else(|| panic!("no variable {name}"))
}

pub fn val(t: &Task, v: VarId, name: &str) -> Value {
    t.variables[v].value_names.iter().position(|x| x == name).unwrap_or_else(|| panic!("no value {name}")) as Value
}

pub fn action(t: &Task, name: &str) -> usize {
    t.actions.iter().position(|a| a.name == name).unwrap_or_else(|| panic!("no action {name}"))
}

pub fn vd(name: &str, k: usize) -> VariableDef {
    VariableDef::new(name, (0..k).map(|i| i.to_string()).collect())
}

/// Builds a task from (domain sizes, init, goal, actions as (pre, eff, cost)).
/// Precondition, effect and cost.
pub type ToyAction<'a> = (&'a [(VarId, Value)], &'a [(VarId, Value)], i128);

pub fn toy(
    domains: &[usize],
    init: &[Value],
    goal: &[(VarId, Value)],
    actions: &[ToyAction],
) -> Task {
    let variables = domains.iter().enumerate().map(|(i, &k)| vd(&alloc::format!("v{i}"), k)).collect();
    let actions: Vec<Action> = actions
        .iter()
        .enumerate()
        .map(|(i, (pre, eff, c))| {
            Action::new(
                alloc::format!("a{i}"),
                PartialAssignment::of(pre),
                PartialAssignment::of(eff),
                (*c).into(),
            )
        })
        .collect();
    Task::new(variables, State::new(init.to_vec()), PartialAssignment::of(goal), actions, true).unwrap()
}

use crate::cost::Cost;
use crate::decomposition::{build_abstract_task, uniform_partition, AbstractTask, DomainMapping, EnsembleKind, Subgraph};
use crate::search::oracle_from;
use crate::task_graphs::causal_graph;

/// The unabstracted fork or ifork of `center`, costs split only inside it.
pub fn lone_task(t: &Task, fork: bool, center: VarId) -> AbstractTask {
    let cg = causal_graph(t);
    let sub = if fork { Subgraph::fork(&cg, center) } else { Subgraph::ifork(&cg, center) };
    let at = build_abstract_task(t, &sub, DomainMapping::identity(center, t.domain_size(center)));
    let kind = if fork { EnsembleKind::F } else { EnsembleKind::I };
    uniform_partition(t, kind, alloc::vec![at]).tasks.remove(0)
}

/// Every state of an abstract task, in lexicographic order.
pub fn all_states(at: &AbstractTask) -> Vec<Vec<Value>> {
    let mut out = alloc::vec![Vec::new()];
    for v in &at.vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..v.domain_size as Value).map(move |x| {
                    let mut s = s.clone();
                    s.push(x);
                    s
                })
            })
            .collect();
    }
    out
}

/// Explicit optimal costs of an abstract task at every state.
pub fn explicit_costs(t: &Task, at: &AbstractTask) -> Vec<(Vec<Value>, Cost)> {
    let tt = at.to_task(t);
    let states = all_states(at);
    let table = oracle_from(&tt, states.iter().cloned().map(State::new), 1 << 20).unwrap();
    states
        .into_iter()
        .map(|s| {
            let c = table.get(&State::new(s.clone())).unwrap_or(Cost::Infinite);
            (s, c)
        })
        .collect()
}
