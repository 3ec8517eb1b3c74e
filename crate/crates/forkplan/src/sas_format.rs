//! Reader and writer for the translator's SAS text format, version 3.
//!
//! Mutex groups are read and dropped. Prevail conditions and effect
//! preconditions both end up in the action's precondition. Axioms, derived
//! variables and conditional effects are refused.

use std::fmt::Write as _;

use forkplan_core::sas_model::TaskError;
use forkplan_core::{Action, PartialAssignment, Rational, State, Task, Value, VarId, VariableDef};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SasError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unsupported feature: {feature}")]
    Unsupported { line: usize, feature: &'static str },
    #[error("invalid task: {0}")]
    Invalid(#[from] TaskError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("action {0} has a non-integer cost")]
    NonIntegerCost(String),
    #[error("action {0} costs other than 1 but the task ignores costs")]
    CostWithoutMetric(String),
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> SasError {
        SasError::Syntax { line: self.last, msg: msg.into() }
    }

    fn next_raw(&mut self) -> Result<&'a str, SasError> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok(l.strip_suffix('\r').unwrap_or(l))
            }
            None => {
                self.last += 1;
                Err(self.err("unexpected end of file"))
            }
        }
    }

    fn expect(&mut self, word: &str) -> Result<(), SasError> {
        let l = self.next_raw()?;
        if l.trim() == word {
            Ok(())
        } else {
            Err(self.err(format!("expected {word}, found {:?}", l.trim())))
        }
    }

    fn int<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, SasError> {
        let l = self.next_raw()?;
        l.trim().parse().map_err(|_| self.err(format!("expected {what}, found {:?}", l.trim())))
    }

    fn ints<const N: usize>(&mut self, what: &str) -> Result<[i64; N], SasError> {
        let l = self.next_raw()?;
        let parts: Vec<i64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| self.err(format!("expected {what}, found {:?}", l.trim())))?;
        parts.try_into().map_err(|_| self.err(format!("expected {what} ({N} integers), found {:?}", l.trim())))
    }

    fn var(&self, x: i64, n: usize) -> Result<VarId, SasError> {
        usize::try_from(x).ok().filter(|&v| v < n).ok_or_else(|| self.err(format!("variable {x} out of range")))
    }

    fn value(&self, x: i64) -> Result<Value, SasError> {
        Value::try_from(x).map_err(|_| self.err(format!("value {x} out of range")))
    }

    fn pair(&mut self, n: usize, what: &str) -> Result<(VarId, Value), SasError> {
        let [v, x] = self.ints::<2>(what)?;
        Ok((self.var(v, n)?, self.value(x)?))
    }
}

pub fn parse_sas(text: &str) -> Result<Task, SasError> {
    let mut r = Lines::new(text);
    r.expect("begin_version")?;
    let version: u32 = r.int("version")?;
    if version != 3 {
        return Err(r.err(format!("unsupported version {version}")));
    }
    r.expect("end_version")?;

    r.expect("begin_metric")?;
    let metric = match r.int::<u8>("metric flag")? {
        0 => false,
        1 => true,
        m => return Err(r.err(format!("metric flag must be 0 or 1, found {m}"))),
    };
    r.expect("end_metric")?;

    let n: usize = r.int("variable count")?;
    let mut variables = Vec::with_capacity(n);
    for _ in 0..n {
        r.expect("begin_variable")?;
        let name = r.next_raw()?.to_string();
        if r.int::<i64>("axiom layer")? != -1 {
            return Err(SasError::Unsupported { line: r.last, feature: "derived variable" });
        }
        let k: usize = r.int("domain size")?;
        let values = (0..k).map(|_| r.next_raw().map(str::to_string)).collect::<Result<_, _>>()?;
        r.expect("end_variable")?;
        variables.push(VariableDef::new(name, values));
    }

    let groups: usize = r.int("mutex group count")?;
    for _ in 0..groups {
        r.expect("begin_mutex_group")?;
        let k: usize = r.int("mutex group size")?;
        for _ in 0..k {
            r.pair(n, "variable and value")?;
        }
        r.expect("end_mutex_group")?;
    }

    r.expect("begin_state")?;
    let mut initial = Vec::with_capacity(n);
    for _ in 0..n {
        let x: i64 = r.int("initial value")?;
        initial.push(r.value(x)?);
    }
    r.expect("end_state")?;

    r.expect("begin_goal")?;
    let k: usize = r.int("goal count")?;
    let pairs = (0..k).map(|_| r.pair(n, "goal variable and value")).collect::<Result<Vec<_>, _>>()?;
    let goal = PartialAssignment::from_pairs(pairs).map_err(|v| r.err(format!("goal assigns variable {v} twice")))?;
    r.expect("end_goal")?;

    let m: usize = r.int("operator count")?;
    let mut actions = Vec::with_capacity(m);
    for _ in 0..m {
        actions.push(parse_operator(&mut r, n, metric)?);
    }

    let axioms: usize = r.int("axiom count")?;
    if axioms > 0 {
        return Err(SasError::Unsupported { line: r.last, feature: "axioms" });
    }
    for (i, l) in r.inner.by_ref() {
        if !l.trim().is_empty() {
            return Err(SasError::Syntax { line: i + 1, msg: format!("trailing content {:?}", l.trim()) });
        }
    }

    Ok(Task::new(variables, State::new(initial), goal, actions, metric)?)
}

fn parse_operator(r: &mut Lines<'_>, n: usize, metric: bool) -> Result<Action, SasError> {
    r.expect("begin_operator")?;
    let start = r.last;
    let name = r.next_raw()?.trim().to_string();
    let mut pre = Vec::new();
    let mut eff = Vec::new();
    let prevail: usize = r.int("prevail count")?;
    for _ in 0..prevail {
        pre.push(r.pair(n, "prevail variable and value")?);
    }
    let effects: usize = r.int("effect count")?;
    for _ in 0..effects {
        let l = r.next_raw()?;
        let nums: Vec<i64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| r.err(format!("malformed effect line {:?}", l.trim())))?;
        match nums.first() {
            Some(0) => {}
            Some(c) if *c > 0 => return Err(SasError::Unsupported { line: r.last, feature: "conditional effect" }),
            _ => return Err(r.err(format!("malformed effect line {:?}", l.trim()))),
        }
        let [v, from, to] = nums[1..].try_into().map_err(|_| r.err(format!("malformed effect line {:?}", l.trim())))?;
        let v = r.var(v, n)?;
        if from != -1 {
            pre.push((v, r.value(from)?));
        }
        eff.push((v, r.value(to)?));
    }
    let cost: i128 = r.int("operator cost")?;
    r.expect("end_operator")?;
    let dup = |what: &str, v: VarId| SasError::Syntax { line: start, msg: format!("operator {name}: {what} variable {v} twice") };
    let pre = PartialAssignment::from_pairs(pre).map_err(|v| dup("precondition on", v))?;
    let eff = PartialAssignment::from_pairs(eff).map_err(|v| dup("effect on", v))?;
    let cost = if metric { cost } else { 1 };
    Ok(Action::new(name.clone(), pre, eff, Rational::from_integer(cost)))
}

pub fn emit_sas(task: &Task) -> Result<String, EmitError> {
    let mut out = String::new();
    let metric = u8::from(task.metric_uses_costs);
    // Writing to a String cannot fail.
    let _ = write!(out, "begin_version\n3\nend_version\nbegin_metric\n{metric}\nend_metric\n{}\n", task.variables.len());
    for v in &task.variables {
        let _ = writeln!(out, "begin_variable\n{}\n-1\n{}", v.name, v.domain_size());
        for name in &v.value_names {
            let _ = writeln!(out, "{name}");
        }
        out.push_str("end_variable\n");
    }
    out.push_str("0\nbegin_state\n");
    for x in &task.initial.values {
        let _ = writeln!(out, "{x}");
    }
    let _ = writeln!(out, "end_state\nbegin_goal\n{}", task.goal.len());
    for (v, x) in task.goal.iter() {
        let _ = writeln!(out, "{v} {x}");
    }
    let _ = writeln!(out, "end_goal\n{}", task.actions.len());
    for a in &task.actions {
        if !a.cost.is_integer() {
            return Err(EmitError::NonIntegerCost(a.name.clone()));
        }
        if !task.metric_uses_costs && a.cost != Rational::from_integer(1) {
            return Err(EmitError::CostWithoutMetric(a.name.clone()));
        }
        let prevail: Vec<_> = a.pre.iter().filter(|&(v, _)| !a.eff.contains_var(v)).collect();
        let _ = writeln!(out, "begin_operator\n{}\n{}", a.name, prevail.len());
        for (v, x) in prevail {
            let _ = writeln!(out, "{v} {x}");
        }
        let _ = writeln!(out, "{}", a.eff.len());
        for (v, x) in a.eff.iter() {
            let from = a.pre.get(v).map_or(-1, i64::from);
            let _ = writeln!(out, "0 {v} {from} {x}");
        }
        let _ = writeln!(out, "{}\nend_operator", a.cost.numer());
    }
    out.push_str("0\n");
    Ok(out)
}
