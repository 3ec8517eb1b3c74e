//! Seeded random small tasks for property suites.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::cost::Rational;
use crate::sas_model::{Action, PartialAssignment, State, Task, Value, VarId, VariableDef};

#[derive(Debug, Clone, Copy)]
pub struct RandomParams {
    pub max_vars: usize,
    pub max_domain: usize,
    pub max_actions: usize,
    /// Largest integer action cost; zero costs are drawn too.
    pub max_cost: i128,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { max_vars: 6, max_domain: 4, max_actions: 14, max_cost: 3 }
    }
}

pub fn random_task<R: Rng + ?Sized>(rng: &mut R, params: &RandomParams) -> Task {
    let n = rng.gen_range(2..=params.max_vars.max(2));
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=params.max_domain.max(2))).collect();
    let variables = sizes
        .iter()
        .enumerate()
        .map(|(v, &k)| VariableDef::new(format!("x{v}"), (0..k).map(|i| format!("val{i}")).collect()))
        .collect();
    let initial: Vec<Value> = sizes.iter().map(|&k| rng.gen_range(0..k) as Value).collect();

    let num_goals = rng.gen_range(1..=n.min(3));
    let goal_vars = pick_vars(rng, n, num_goals);
    let goal = PartialAssignment::of(
        &goal_vars.iter().map(|&v| (v, rng.gen_range(0..sizes[v]) as Value)).collect::<Vec<_>>(),
    );

    let num_actions = rng.gen_range(n..=params.max_actions.max(n));
    let mut actions = Vec::with_capacity(num_actions);
    for i in 0..num_actions {
        let num_eff = if rng.gen_bool(0.3) { 2 } else { 1 };
        let eff_vars = pick_vars(rng, n, num_eff);
        let mut eff = Vec::new();
        let mut pre = Vec::new();
        for &v in &eff_vars {
            let to = rng.gen_range(0..sizes[v]) as Value;
            eff.push((v, to));
            if rng.gen_bool(0.7) {
                let from = (to as usize + rng.gen_range(1..sizes[v])) % sizes[v];
                pre.push((v, from as Value));
            }
        }
        for (v, &k) in sizes.iter().enumerate() {
            if !eff_vars.contains(&v) && rng.gen_bool(0.3) {
                pre.push((v, rng.gen_range(0..k) as Value));
            }
        }
        let cost = if rng.gen_bool(0.15) { 0 } else { rng.gen_range(1..=params.max_cost.max(1)) };
        actions.push(Action::new(
            format!("a{i}"),
            PartialAssignment::of(&pre),
            PartialAssignment::of(&eff),
            Rational::from_integer(cost),
        ));
    }
    Task::new(variables, State::new(initial), goal, actions, true).expect("random tasks are valid")
}

fn pick_vars<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<VarId> {
    let mut vars: Vec<VarId> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        vars.swap(i, j);
    }
    vars.truncate(k);
    vars.sort_unstable();
    vars
}
