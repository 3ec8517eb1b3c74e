//! Ground SAS+ tasks: variables with finite domains, a complete initial
//! state, a partial goal and actions with exact nonnegative costs.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Index;

use num_traits::Zero;

use crate::cost::Rational;

pub type VarId = usize;
pub type Value = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("variable {0} has an empty domain")]
    EmptyDomain(String),
    #[error("initial state has {found} values but the task has {expected} variables")]
    InitialLength { expected: usize, found: usize },
    #[error("{context}: variable index {var} out of range")]
    VariableOutOfRange { context: String, var: VarId },
    #[error("{context}: value {value} out of range for variable {var}")]
    ValueOutOfRange { context: String, var: VarId, value: Value },
    #[error("{context}: variable {var} assigned twice")]
    DuplicateVariable { context: String, var: VarId },
    #[error("action {0} has an empty effect")]
    EmptyEffect(String),
    #[error("action {0} has a negative cost")]
    NegativeCost(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("action {action} is not applicable: variable {var} is {found}, needs {needed}")]
pub struct Inapplicable {
    pub action: usize,
    pub var: VarId,
    pub needed: Value,
    pub found: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDef {
    pub name: String,
    pub value_names: Vec<String>,
}

impl VariableDef {
    pub fn new(name: impl Into<String>, value_names: Vec<String>) -> Self {
        VariableDef { name: name.into(), value_names }
    }

    pub fn domain_size(&self) -> usize {
        self.value_names.len()
    }
}

/// A partial assignment kept sorted by variable index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PartialAssignment {
    entries: Vec<(VarId, Value)>,
}

impl PartialAssignment {
    pub fn empty() -> Self {
        PartialAssignment { entries: Vec::new() }
    }

    /// Builds an assignment from unordered pairs; returns the offending
    /// variable if one appears twice.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, Value)>>(pairs: I) -> Result<Self, VarId> {
        let mut entries: Vec<(VarId, Value)> = pairs.into_iter().collect();
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(w[0].0);
            }
        }
        Ok(PartialAssignment { entries })
    }

    /// Like [`from_pairs`](Self::from_pairs) but panics on duplicates; for
    /// hand-written tasks.
    pub fn of(pairs: &[(VarId, Value)]) -> Self {
        Self::from_pairs(pairs.iter().copied()).expect("duplicate variable in assignment")
    }

    pub fn get(&self, var: VarId) -> Option<Value> {
        self.entries
            .binary_search_by_key(&var, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn contains_var(&self, var: VarId) -> bool {
        self.get(var).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, Value)> + '_ {
        self.entries.iter().copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn entries(&self) -> &[(VarId, Value)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_satisfied_by(&self, values: &[Value]) -> bool {
        self.entries.iter().all(|&(v, x)| values[v] == x)
    }
}

/// A complete assignment, one value per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub values: Vec<Value>,
}

impl State {
    pub fn new(values: Vec<Value>) -> Self {
        State { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Index<VarId> for State {
    type Output = Value;

    fn index(&self, v: VarId) -> &Value {
        &self.values[v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub pre: PartialAssignment,
    pub eff: PartialAssignment,
    pub cost: Rational,
}

impl Action {
    pub fn new(name: impl Into<String>, pre: PartialAssignment, eff: PartialAssignment, cost: Rational) -> Self {
        Action { name: name.into(), pre, eff, cost }
    }

    pub fn is_applicable(&self, values: &[Value]) -> bool {
        self.pre.is_satisfied_by(values)
    }
}

/// A validated SAS+ task. Construct through [`Task::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub variables: Vec<VariableDef>,
    pub initial: State,
    pub goal: PartialAssignment,
    pub actions: Vec<Action>,
    pub metric_uses_costs: bool,
}

impl Task {
    pub fn new(
        variables: Vec<VariableDef>,
        initial: State,
        goal: PartialAssignment,
        actions: Vec<Action>,
        metric_uses_costs: bool,
    ) -> Result<Task, TaskError> {
        let task = Task { variables, initial, goal, actions, metric_uses_costs };
        task.validate()?;
        Ok(task)
    }

    fn validate(&self) -> Result<(), TaskError> {
        for v in &self.variables {
            if v.domain_size() == 0 {
                return Err(TaskError::EmptyDomain(v.name.clone()));
            }
        }
        if self.initial.len() != self.variables.len() {
            return Err(TaskError::InitialLength {
                expected: self.variables.len(),
                found: self.initial.len(),
            });
        }
        for (v, &x) in self.initial.values.iter().enumerate() {
            self.check_entry("initial state", v, x)?;
        }
        self.check_assignment("goal", &self.goal)?;
        for a in &self.actions {
            if a.eff.is_empty() {
                return Err(TaskError::EmptyEffect(a.name.clone()));
            }
            if a.cost < Rational::zero() {
                return Err(TaskError::NegativeCost(a.name.clone()));
            }
            self.check_assignment(&a.name, &a.pre)?;
            self.check_assignment(&a.name, &a.eff)?;
        }
        Ok(())
    }

    fn check_assignment(&self, context: &str, pa: &PartialAssignment) -> Result<(), TaskError> {
        for w in pa.entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(TaskError::DuplicateVariable { context: context.into(), var: w[0].0 });
            }
        }
        pa.iter().try_for_each(|(v, x)| self.check_entry(context, v, x))
    }

    fn check_entry(&self, context: &str, var: VarId, value: Value) -> Result<(), TaskError> {
        match self.variables.get(var) {
            None => Err(TaskError::VariableOutOfRange { context: context.into(), var }),
            Some(def) if value as usize >= def.domain_size() => {
                Err(TaskError::ValueOutOfRange { context: context.into(), var, value })
            }
            Some(_) => Ok(()),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn domain_size(&self, v: VarId) -> usize {
        self.variables[v].domain_size()
    }

    pub fn is_applicable(&self, state: &State, action: usize) -> bool {
        self.actions[action].is_applicable(&state.values)
    }

    /// Successor state. Inapplicable actions are a contract violation
    /// checked in debug builds; see [`Task::try_apply`].
    pub fn apply(&self, state: &State, action: usize) -> State {
        debug_assert!(self.is_applicable(state, action), "applying inapplicable action {}", self.actions[action].name);
        let mut values = state.values.clone();
        for (v, x) in self.actions[action].eff.iter() {
            values[v] = x;
        }
        State { values }
    }

    pub fn try_apply(&self, state: &State, action: usize) -> Result<State, Inapplicable> {
        for (var, needed) in self.actions[action].pre.iter() {
            if state[var] != needed {
                return Err(Inapplicable { action, var, needed, found: state[var] });
            }
        }
        Ok(self.apply(state, action))
    }

    pub fn is_goal(&self, state: &State) -> bool {
        self.goal.is_satisfied_by(&state.values)
    }

    pub fn applicable_actions<'a>(&'a self, state: &'a State) -> impl Iterator<Item = usize> + 'a {
        (0..self.actions.len()).filter(move |&a| self.actions[a].is_applicable(&state.values))
    }

    pub fn all_costs_integer(&self) -> bool {
        self.actions.iter().all(|a| a.cost.is_integer())
    }

    /// Number of states in the full product space, saturating.
    pub fn state_space_size(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.domain_size() as u128))
    }

    pub fn value_name(&self, var: VarId, value: Value) -> &str {
        &self.variables[var].value_names[value as usize]
    }
}

/// Free-function form of [`Task::is_goal`].
pub fn is_goal(state: &State, task: &Task) -> bool {
    task.is_goal(state)
}
