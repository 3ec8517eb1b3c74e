//! File formats and command line for `forkplan-core`: SAS v3 tasks, plan
//! files, Graphviz dumps and the `forkplan` binary.

pub mod cli;
pub mod dot;
pub mod plan_file;
pub mod sas_format;

pub use plan_file::{read_plan, write_plan};
pub use sas_format::{emit_sas, parse_sas, EmitError, SasError};
