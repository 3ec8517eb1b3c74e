//! Cost-optimal classical planning with fork-decomposition implicit
//! abstraction heuristics.
//!
//! A SAS+ task is decomposed along its causal graph into fork and
//! inverted-fork abstract tasks whose center domains are abstracted to two
//! or three values. Each abstract task is solved exactly by a tractable
//! algorithm, precomputed into a lookup database, and the per-task optimal
//! costs are summed under a joint uniform action cost partition to give an
//! admissible heuristic for A*.
//!
//! The crate is `no_std` and needs only `alloc`. File formats and the
//! command line live in the `forkplan` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod apsp;
#[cfg(test)]
mod testutil;
pub mod cost;
pub mod decomposition;
pub mod fork_engine;
pub mod generators;
pub mod heuristics;
pub mod ifork_engine;
pub mod sas_model;
pub mod search;
pub mod task_graphs;

pub use cost::{Cost, Rational};
pub use sas_model::{Action, PartialAssignment, State, Task, Value, VarId, VariableDef};
