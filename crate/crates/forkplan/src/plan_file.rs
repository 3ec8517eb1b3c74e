//! Plan files: one parenthesized action name per line and a closing
//! `; cost = X` comment, as read by common plan validators.

use forkplan_core::search::validate_plan;
use forkplan_core::{Cost, Rational, Task};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanFileError {
    #[error("line {line}: expected a parenthesized action, found {found:?}")]
    Malformed { line: usize, found: String },
    #[error("line {line}: unknown action {name:?}")]
    UnknownAction { line: usize, name: String },
}

pub fn write_plan(task: &Task, actions: &[usize], cost: Rational) -> String {
    let mut out = String::new();
    for &a in actions {
        out.push('(');
        out.push_str(&task.actions[a].name);
        out.push_str(")\n");
    }
    out.push_str(&format!("; cost = {}\n", Cost::from(cost)));
    out
}

/// Action indices of a plan file. Names match exactly first, then
/// ignoring ASCII case since validators tend to lowercase.
pub fn read_plan(task: &Task, text: &str) -> Result<Vec<usize>, PlanFileError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let name = line
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| PlanFileError::Malformed { line: i + 1, found: line.to_string() })?
            .trim();
        let idx = task
            .actions
            .iter()
            .position(|a| a.name == name)
            .or_else(|| task.actions.iter().position(|a| a.name.eq_ignore_ascii_case(name)))
            .ok_or_else(|| PlanFileError::UnknownAction { line: i + 1, name: name.to_string() })?;
        out.push(idx);
    }
    Ok(out)
}

/// Reads and replays a plan file; returns its cost.
pub fn check_plan_file(task: &Task, text: &str) -> Result<Rational, String> {
    let actions = read_plan(task, text).map_err(|e| e.to_string())?;
    validate_plan(task, &actions).map_err(|e| e.to_string())
}
