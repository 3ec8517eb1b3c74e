//! Causal graph, domain transition graphs and hop distances.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::Rational;
use crate::sas_model::{PartialAssignment, Task, Value, VarId};

/// Arc (u, v) iff u != v, v is affected by some action and u is mentioned
/// by the same action's precondition or effect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalGraph {
    succ: Vec<Vec<VarId>>,
    pred: Vec<Vec<VarId>>,
}

impl CausalGraph {
    pub fn succ(&self, v: VarId) -> &[VarId] {
        &self.succ[v]
    }

    pub fn pred(&self, v: VarId) -> &[VarId] {
        &self.pred[v]
    }

    pub fn has_arc(&self, u: VarId, v: VarId) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn num_vars(&self) -> usize {
        self.succ.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn num_arcs(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }
}

pub fn causal_graph(task: &Task) -> CausalGraph {
    let n = task.num_vars();
    let mut succ = vec![Vec::new(); n];
    for a in &task.actions {
        for v in a.eff.vars() {
            for u in a.pre.vars().chain(a.eff.vars()) {
                if u != v {
                    succ[u].push(v);
                }
            }
        }
    }
    let mut pred = vec![Vec::new(); n];
    for (u, vs) in succ.iter_mut().enumerate() {
        vs.sort_unstable();
        vs.dedup();
        for &v in vs.iter() {
            pred[v].push(u);
        }
    }
    CausalGraph { succ, pred }
}

/// One value change of the variable. `from == None` marks an action
/// without precondition on the variable: it can fire from every other value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtgArc {
    pub from: Option<Value>,
    pub to: Value,
    pub outside: PartialAssignment,
    pub cost: Rational,
    pub action: usize,
}

impl DtgArc {
    /// Concrete origins of the arc in a domain of the given size.
    pub fn origins(&self, domain_size: usize) -> impl Iterator<Item = Value> + '_ {
        let to = self.to;
        let fixed = self.from;
        (0..domain_size as Value).filter(move |&x| match fixed {
            Some(f) => x == f,
            None => x != to,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainTransitionGraph {
    pub variable: VarId,
    pub domain_size: usize,
    pub arcs: Vec<DtgArc>,
}

impl DomainTransitionGraph {
    /// All arcs with wildcard origins expanded. Self-loops are dropped.
    pub fn concrete_arcs(&self) -> impl Iterator<Item = (Value, Value, &DtgArc)> + '_ {
        self.arcs.iter().flat_map(move |arc| {
            arc.origins(self.domain_size)
                .filter(move |&x| x != arc.to)
                .map(move |x| (x, arc.to, arc))
        })
    }

    fn hop_adjacency(&self, reverse: bool) -> Vec<Vec<Value>> {
        let mut adj = vec![Vec::new(); self.domain_size];
        for (x, y, _) in self.concrete_arcs() {
            if reverse {
                adj[y as usize].push(x);
            } else {
                adj[x as usize].push(y);
            }
        }
        adj
    }
}

pub fn dtg(task: &Task, v: VarId) -> DomainTransitionGraph {
    let arcs = task
        .actions
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            let to = a.eff.get(v)?;
            let outside = PartialAssignment::from_pairs(a.pre.iter().filter(|&(u, _)| u != v))
                .expect("subset of a valid assignment");
            Some(DtgArc { from: a.pre.get(v), to, outside, cost: a.cost, action: i })
        })
        .collect();
    DomainTransitionGraph { variable: v, domain_size: task.domain_size(v), arcs }
}

/// BFS hop counts from (or, for the goal variant, to) one value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueDistances {
    pub variable: VarId,
    pub anchor: Value,
    pub dist: Vec<Option<u32>>,
}

impl ValueDistances {
    pub fn max_finite(&self) -> u32 {
        self.dist.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// Hop distances d(from, x) for every value x.
pub fn hop_distances(dtg: &DomainTransitionGraph, from: Value) -> ValueDistances {
    bfs(dtg, from, false)
}

/// Hop distances d(x, to) for every value x.
pub fn hop_distances_to(dtg: &DomainTransitionGraph, to: Value) -> ValueDistances {
    bfs(dtg, to, true)
}

fn bfs(dtg: &DomainTransitionGraph, anchor: Value, reverse: bool) -> ValueDistances {
    let adj = dtg.hop_adjacency(reverse);
    let mut dist = vec![None; dtg.domain_size];
    dist[anchor as usize] = Some(0);
    let mut queue = VecDeque::from([anchor]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x as usize].unwrap();
        for &y in &adj[x as usize] {
            if dist[y as usize].is_none() {
                dist[y as usize] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    ValueDistances { variable: dtg.variable, anchor, dist }
}
