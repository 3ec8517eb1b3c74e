//! Command-line front end.
//!
//! Exit status: 0 solved or ok, 1 proven unsolvable (or invalid plan),
//! 2 limit exceeded, 3 usage, input or parse error.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use forkplan_core::decomposition::describe;
use forkplan_core::generators::{generate, GeneratorSpec};
use forkplan_core::heuristics::{
    build_heuristic, Blind, BlindVariant, HMax, Heuristic, HeuristicEnsemble, HeuristicKind, Policies, RootPolicy,
    Rounding, SinkPolicy,
};
use forkplan_core::search::{
    astar_with_interrupt, dijkstra_oracle, OracleError, SearchLimits, SearchOutcome, SearchResult, DEFAULT_ORACLE_CAP,
};
use forkplan_core::{Cost, Task};

use crate::dot::{causal_graph_dot, dtg_dot};
use crate::plan_file::{check_plan_file, write_plan};
use crate::sas_format::{emit_sas, parse_sas};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSOLVABLE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "forkplan", version, about = "Cost-optimal planning with fork-decomposition heuristics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for an optimal plan.
    Plan {
        /// SAS file, or - for standard input.
        task: PathBuf,
        #[command(flatten)]
        heuristic: HeuristicArgs,
        /// Stop after this many expansions.
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Stop after this much wall-clock time.
        #[arg(long)]
        max_seconds: Option<f64>,
        /// Where to write the plan (default: standard output).
        #[arg(long)]
        plan_file: Option<PathBuf>,
        /// Where to write key=value statistics (default: standard error).
        #[arg(long)]
        stats_file: Option<PathBuf>,
    },
    /// Print the heuristic value of the initial state.
    Eval {
        task: PathBuf,
        #[command(flatten)]
        heuristic: HeuristicArgs,
    },
    /// Write a generated task in SAS format.
    Gen {
        family: Family,
        /// Size parameter for gripper and logistics-line.
        n: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact optimal cost by exhaustive search.
    Oracle {
        task: PathBuf,
        /// Refuse tasks with more reachable states than this.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        max_states: usize,
    },
    /// Replay a plan file and print its cost.
    Validate { task: PathBuf, plan: PathBuf },
    /// Debug dumps of the task structure.
    Dump {
        task: PathBuf,
        #[arg(value_enum)]
        what: DumpKind,
        /// Variable name for dtg dumps.
        #[arg(long)]
        var: Option<String>,
        /// Ensemble kind and policies for ensemble dumps.
        #[command(flatten)]
        heuristic: HeuristicArgs,
    },
}

#[derive(Args, Debug)]
struct HeuristicArgs {
    #[arg(long, value_enum, default_value_t = HeuristicArg::Forkifork)]
    heuristic: HeuristicArg,
    #[arg(long, value_enum)]
    root_abstraction: Option<RootArg>,
    #[arg(long, value_enum)]
    sink_abstraction: Option<SinkArg>,
    #[arg(long, value_enum, default_value_t = RoundArg::Auto)]
    round: RoundArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum HeuristicArg {
    Fork,
    Ifork,
    Forkifork,
    Hmax,
    Blind,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RootArg {
    LeaveOneOut,
    DistInitBinary,
}

#[allow(clippy::enum_variant_names)]
#[derive(ValueEnum, Clone, Copy, Debug)]
enum SinkArg {
    DistGoalTernary,
    DistInitTernary,
    DistInitBinary,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RoundArg {
    Auto,
    None,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Gripper,
    LogisticsLine,
    Thm9Pi1,
    Thm9Pi2,
    RunningLogistics,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DumpKind {
    CausalGraph,
    Dtg,
    Ensemble,
}

/// A failure that ends the run with the given exit status.
struct Exit(i32, String);

fn usage(msg: impl Into<String>) -> Exit {
    Exit(EXIT_USAGE, msg.into())
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, path: &Path) -> Result<String, Exit> {
        let mut text = String::new();
        let res = if path == Path::new("-") {
            self.stdin.read_to_string(&mut text).map(|_| ())
        } else {
            std::fs::read_to_string(path).map(|t| text = t)
        };
        res.map_err(|e| usage(format!("{}: {e}", path.display())))?;
        Ok(text)
    }

    fn load(&mut self, path: &Path) -> Result<Task, Exit> {
        let text = self.read(path)?;
        parse_sas(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    fn write(&mut self, path: Option<&Path>, text: &str) -> Result<(), Exit> {
        match path {
            Some(p) if p != Path::new("-") => {
                std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display())))
            }
            _ => self.stdout.write_all(text.as_bytes()).map_err(|e| usage(format!("standard output: {e}"))),
        }
    }

    fn write_err(&mut self, path: Option<&Path>, text: &str) -> Result<(), Exit> {
        match path {
            Some(_) => self.write(path, text),
            None => self.stderr.write_all(text.as_bytes()).map_err(|e| usage(format!("standard error: {e}"))),
        }
    }
}

enum Built<'a> {
    Ensemble(HeuristicEnsemble),
    Other(Box<dyn Heuristic + 'a>),
}

impl Built<'_> {
    fn as_dyn(&self) -> &dyn Heuristic {
        match self {
            Built::Ensemble(h) => h,
            Built::Other(h) => h.as_ref(),
        }
    }
}

impl HeuristicArgs {
    fn kind(&self) -> Option<HeuristicKind> {
        match self.heuristic {
            HeuristicArg::Fork => Some(HeuristicKind::Fork),
            HeuristicArg::Ifork => Some(HeuristicKind::IFork),
            HeuristicArg::Forkifork => Some(HeuristicKind::ForkIFork),
            HeuristicArg::Hmax | HeuristicArg::Blind => None,
        }
    }

    fn policies(&self) -> Result<Policies, Exit> {
        let uses_root = matches!(self.heuristic, HeuristicArg::Fork | HeuristicArg::Forkifork);
        let uses_sink = matches!(self.heuristic, HeuristicArg::Ifork | HeuristicArg::Forkifork);
        if self.root_abstraction.is_some() && !uses_root {
            return Err(usage("--root-abstraction needs --heuristic fork or forkifork"));
        }
        if self.sink_abstraction.is_some() && !uses_sink {
            return Err(usage("--sink-abstraction needs --heuristic ifork or forkifork"));
        }
        let root = match self.root_abstraction {
            Some(RootArg::LeaveOneOut) | None => RootPolicy::LeaveOneOut,
            Some(RootArg::DistInitBinary) => RootPolicy::DistInitBinary,
        };
        let sink = match self.sink_abstraction {
            Some(SinkArg::DistGoalTernary) | None => SinkPolicy::DistGoalTernary,
            Some(SinkArg::DistInitTernary) => SinkPolicy::DistInitTernary,
            Some(SinkArg::DistInitBinary) => SinkPolicy::DistInitBinary,
        };
        Ok(Policies { root, sink })
    }

    fn rounding(&self) -> Rounding {
        match self.round {
            RoundArg::Auto => Rounding::CeilIfIntegerCosts,
            RoundArg::None => Rounding::None,
        }
    }

    fn build<'a>(&self, task: &'a Task) -> Result<Built<'a>, Exit> {
        let policies = self.policies()?;
        Ok(match (self.kind(), self.heuristic) {
            (Some(kind), _) => Built::Ensemble(build_heuristic(task, kind, policies, self.rounding())),
            (None, HeuristicArg::Hmax) => Built::Other(Box::new(HMax::new(task))),
            (None, _) => Built::Other(Box::new(Blind::new(task, BlindVariant::MinActionCost))),
        })
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let out: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    let mut io = Io { stdin, stdout, stderr };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(io.stderr, "forkplan: {msg}");
            code
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<i32, Exit> {
    match command {
        Command::Plan { task, heuristic, max_nodes, max_seconds, plan_file, stats_file } => {
            let task = io.load(&task)?;
            let h = heuristic.build(&task)?;
            let deadline = match max_seconds {
                Some(s) if s.is_finite() && s >= 0.0 => Some(Duration::from_secs_f64(s)),
                Some(s) => return Err(usage(format!("invalid --max-seconds {s}"))),
                None => None,
            };
            let start = Instant::now();
            let mut out_of_time = || deadline.is_some_and(|d| start.elapsed() >= d);
            let mut result =
                astar_with_interrupt(&task, h.as_dyn(), SearchLimits { max_expansions: max_nodes }, &mut out_of_time);
            result.stats.elapsed = start.elapsed();
            report_search(io, &task, &result, plan_file.as_deref(), stats_file.as_deref())
        }
        Command::Eval { task, heuristic } => {
            let task = io.load(&task)?;
            let h = heuristic.build(&task)?;
            let (exact, rounded) = match &h {
                Built::Ensemble(e) => (e.evaluate_exact(&task.initial), e.evaluate(&task.initial)),
                Built::Other(o) => {
                    let v = o.evaluate(&task.initial);
                    (v, v)
                }
            };
            io.write(None, &format!("{exact} (\u{2192} {rounded})\n"))?;
            Ok(EXIT_OK)
        }
        Command::Gen { family, n, output } => {
            let spec = match (family, n) {
                (Family::Gripper | Family::LogisticsLine, None | Some(0)) => {
                    return Err(usage("gripper and logistics-line need a size n >= 1"));
                }
                (Family::Gripper, Some(n)) => GeneratorSpec::Gripper(n),
                (Family::LogisticsLine, Some(n)) => GeneratorSpec::LogisticsLine(n),
                (_, Some(_)) => return Err(usage("this family takes no size parameter")),
                (Family::Thm9Pi1, None) => GeneratorSpec::Thm9Pi1,
                (Family::Thm9Pi2, None) => GeneratorSpec::Thm9Pi2,
                (Family::RunningLogistics, None) => GeneratorSpec::RunningLogistics,
            };
            let text = emit_sas(&generate(spec)).map_err(|e| usage(e.to_string()))?;
            io.write(output.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Oracle { task, max_states } => {
            let task = io.load(&task)?;
            match dijkstra_oracle(&task, &task.initial, max_states) {
                Ok(table) => {
                    let h = table.get(&task.initial).unwrap_or(Cost::Infinite);
                    io.write(None, &format!("{h}\n"))?;
                    Ok(if h.is_finite() { EXIT_OK } else { EXIT_UNSOLVABLE })
                }
                Err(OracleError::CapExceeded(cap)) => {
                    Err(Exit(EXIT_LIMIT, format!("refusing: more than {cap} reachable states")))
                }
            }
        }
        Command::Validate { task, plan } => {
            let task = io.load(&task)?;
            let text = io.read(&plan)?;
            match check_plan_file(&task, &text) {
                Ok(cost) => {
                    io.write(None, &format!("valid, cost = {}\n", Cost::from(cost)))?;
                    Ok(EXIT_OK)
                }
                Err(msg) => Err(Exit(EXIT_UNSOLVABLE, format!("invalid plan: {msg}"))),
            }
        }
        Command::Dump { task, what, var, heuristic } => {
            let task = io.load(&task)?;
            let text = match what {
                DumpKind::CausalGraph => causal_graph_dot(&task),
                DumpKind::Dtg => {
                    let name = var.ok_or_else(|| usage("dtg dumps need --var"))?;
                    let v = task
                        .variables
                        .iter()
                        .position(|d| d.name == name)
                        .ok_or_else(|| usage(format!("no variable named {name:?}")))?;
                    dtg_dot(&task, v)
                }
                DumpKind::Ensemble => {
                    let Some(kind) = heuristic.kind() else {
                        return Err(usage("ensemble dumps need --heuristic fork, ifork or forkifork"));
                    };
                    let h = build_heuristic(&task, kind, heuristic.policies()?, Rounding::None);
                    describe(&task, &h.ensemble)
                }
            };
            io.write(None, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn report_search(
    io: &mut Io<'_>,
    task: &Task,
    result: &SearchResult,
    plan_file: Option<&Path>,
    stats_file: Option<&Path>,
) -> Result<i32, Exit> {
    let s = &result.stats;
    let h0 = s.h_initial.map_or_else(|| "none".to_string(), |h| h.to_string());
    let (code, status, cost) = match &result.outcome {
        SearchOutcome::Solved(plan) => {
            io.write(plan_file, &write_plan(task, &plan.actions, plan.cost))?;
            (EXIT_OK, "solved", Cost::from(plan.cost).to_string())
        }
        SearchOutcome::Unsolvable => (EXIT_UNSOLVABLE, "unsolvable", "none".to_string()),
        SearchOutcome::LimitExceeded => (EXIT_LIMIT, "limit", "none".to_string()),
    };
    let stats = format!(
        "status={status}\nexpanded={}\ngenerated={}\nevaluated={}\nreopened={}\nh_initial={h0}\nplan_cost={cost}\ntime_ms={}\n",
        s.expanded,
        s.generated,
        s.evaluated,
        s.reopened,
        s.elapsed.as_millis()
    );
    io.write_err(stats_file, &stats)?;
    Ok(code)
}
