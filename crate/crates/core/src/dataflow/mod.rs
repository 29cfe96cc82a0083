//! Abstract interpretation of a parsed file into a [`ProgramGraph`].
//!
//! Every entry point (the module body, then each function) is interpreted
//! separately. Imported names evaluate to turtle objects; calls on them
//! create call nodes and return fresh turtles; field reads return the same
//! object. Dataflow edges come from argument and receiver positions, and
//! `immediatelyPrecedes` edges from the call order within each entry point.

mod interp;
mod order;
mod program;
mod value;

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use thiserror::Error;

pub use interp::INLINE_DEPTH;
pub use order::{order_calls, CallTrace};
pub use program::{enumerate_entrypoints, EntryPoint, MAIN_ENTRY};
pub use value::{AbstractValue, Environment, TurtleValue, UNION_CAP};

use crate::frontend::{ImportBinding, SyntaxTree};
use crate::graph::{EdgeKind, GraphEdge, ProgramGraph};
use interp::Interp;
use program::Program;

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Wall-clock limit for one file.
    pub budget: Duration,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("analysis exceeded its budget of {budget:?}")]
    Timeout { budget: Duration },
}

impl AnalysisError {
    pub fn code(&self) -> &'static str {
        match self {
            AnalysisError::Timeout { .. } => "E_TIMEOUT",
        }
    }
}

/// Analyzes one file with the default budget.
pub fn analyze_program(
    tree: &SyntaxTree,
    imports: &[ImportBinding],
    digest: &str,
) -> Result<ProgramGraph, AnalysisError> {
    analyze_program_with(tree, imports, digest, &AnalysisOptions::default())
}

pub fn analyze_program_with(
    tree: &SyntaxTree,
    imports: &[ImportBinding],
    digest: &str,
    options: &AnalysisOptions,
) -> Result<ProgramGraph, AnalysisError> {
    let deadline = Instant::now().checked_add(options.budget);
    let timeout = AnalysisError::Timeout {
        budget: options.budget,
    };
    let program = Program::collect(tree);
    let bindings: HashMap<u32, &ImportBinding> = imports
        .iter()
        .map(|b| (b.range.start().to_u32(), b))
        .collect();
    let mut graph = ProgramGraph::new(digest);
    let seeds = entry_seeds(&program);

    let main = Interp::new(
        tree,
        &program,
        &bindings,
        &mut graph,
        digest,
        &seeds[0],
        Environment::new(),
        deadline,
    )
    .run_main();
    if main.timed_out {
        return Err(timeout);
    }
    let globals: BTreeMap<_, _> = main.env.outermost().clone();
    let mut traces = vec![main.trace];

    for fid in 0..program.funcs.len() {
        let r = Interp::new(
            tree,
            &program,
            &bindings,
            &mut graph,
            digest,
            &seeds[fid + 1],
            Environment::with_globals(globals.clone()),
            deadline,
        )
        .run_function(fid);
        if r.timed_out {
            return Err(timeout.clone());
        }
        traces.push(r.trace);
    }

    for trace in &traces {
        let edges = order::order_calls_until(trace, deadline).map_err(|_| timeout.clone())?;
        for (a, b) in edges {
            graph
                .merge_edge(GraphEdge::new(a, b, EdgeKind::ImmediatelyPrecedes))
                .expect("ordered calls are graph nodes");
        }
    }
    Ok(graph)
}

/// Per-entry strings fed into node ids; repeated qualified names (a
/// function redefined under `if`/`else`) get a `#k` suffix.
fn entry_seeds(program: &Program<'_>) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    program
        .entrypoints()
        .into_iter()
        .map(|e| {
            let n = seen.entry(e.qualified_name.clone()).or_insert(0);
            *n += 1;
            if *n == 1 {
                e.qualified_name
            } else {
                format!("{}#{}", e.qualified_name, *n - 1)
            }
        })
        .collect()
}
