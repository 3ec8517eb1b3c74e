//! Graphviz dumps of the causal graph and of domain transition graphs.

use std::fmt::Write as _;

use forkplan_core::task_graphs::{causal_graph, dtg};
use forkplan_core::{Cost, Task, VarId};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn causal_graph_dot(task: &Task) -> String {
    let cg = causal_graph(task);
    let mut out = String::from("digraph causal_graph {\n");
    for v in &task.variables {
        let _ = writeln!(out, "  {};", quote(&v.name));
    }
    for (u, v) in cg.arcs() {
        let _ = writeln!(out, "  {} -> {};", quote(&task.variables[u].name), quote(&task.variables[v].name));
    }
    out.push_str("}\n");
    out
}

/// Arcs without a precondition on `v` start at a separate `*` node.
pub fn dtg_dot(task: &Task, v: VarId) -> String {
    let g = dtg(task, v);
    let names = &task.variables[v].value_names;
    let mut out = format!("digraph {} {{\n", quote(&format!("dtg {}", task.variables[v].name)));
    for name in names {
        let _ = writeln!(out, "  {};", quote(name));
    }
    if g.arcs.iter().any(|a| a.from.is_none()) {
        out.push_str("  \"*\" [shape=point];\n");
    }
    for arc in &g.arcs {
        let from = arc.from.map_or_else(|| "\"*\"".to_string(), |x| quote(&names[x as usize]));
        let _ = writeln!(
            out,
            "  {from} -> {} [label={}];",
            quote(&names[arc.to as usize]),
            quote(&Cost::from(arc.cost).to_string())
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use forkplan_core::generators::{gripper, running_logistics};

    #[test]
    fn causal_graph_arcs() {
        let t = gripper(1);
        let dot = causal_graph_dot(&t);
        assert!(dot.contains("\"robot\" -> \"b1\";"));
        assert!(!dot.contains("-> \"robot\""));
        assert_eq!(dot.matches("->").count(), causal_graph(&t).num_arcs());
    }

    #[test]
    fn dtg_labels() {
        let t = running_logistics();
        let c1 = t.variables.iter().position(|v| v.name == "c1").unwrap();
        let dot = dtg_dot(&t, c1);
        assert_eq!(dot.matches("->").count(), dtg(&t, c1).arcs.len());
        assert!(dot.contains("[label=\"1\"]"));
        assert!(!dot.contains("\"*\""));
    }
}
