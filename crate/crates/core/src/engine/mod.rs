//! Link-traversal execution: a coordinator owns the frontier and the
//! evaluator, worker threads dereference, and solutions stream out as soon
//! as they are derivable.

mod eval;
mod metrics;
mod policy;
mod run;

pub use metrics::{collect_metrics, QueryMetrics, RunStats};
pub use policy::{
    initial_targets, parse_setups, policy_targets, predicate_only_variables, EngineOptions, Features, PolicyContext,
    PolicyEvent, Reason, Setup, UnknownSetup,
};
pub use run::{execute, Engine, QueryOutcome, QueryRun, Solution, TraceEntry};
