//! Closed-loop harness: a kinematic bicycle ego tracking the planner's
//! output, scripted agents, and the comfort and safety metrics of each run.

mod compare;
mod metrics;
mod runner;
mod scenarios;
mod state;

pub use compare::{compare_samplers, ComparisonRow};
pub use metrics::{executed_profile, metrics_from_trace, ClosedLoopMetrics, ExecutedProfile, TraceRow};
pub use runner::{run_closed_loop, SimConfig, SimRun};
pub use scenarios::{builtin_scenario, scenario_suite, SCENARIO_NAMES};
pub use state::{
    advance_agent, integrate, overlapping, step, track, Event, EventConfig, EventKind, SimState, TrackerConfig,
};
