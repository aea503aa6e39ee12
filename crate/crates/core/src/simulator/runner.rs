use serde::{Deserialize, Serialize};

use super::metrics::{metrics_from_trace, ClosedLoopMetrics, TraceRow};
use super::state::{step, EventConfig, EventKind, SimState, TrackerConfig};
use crate::error::{Error, Result};
use crate::geometry::ReferenceLine;
use crate::planner::{Planner, PlannerDecision};
use crate::time::DT;
use crate::types::{validate_scenario, AgentState, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub tracker: TrackerConfig,
    pub events: EventConfig,
}

/// Executed run: metrics, per-step trace rows and the agents' poses at
/// every row (kept in memory for independent checks).
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub scenario: String,
    pub metrics: ClosedLoopMetrics,
    pub rows: Vec<TraceRow>,
    pub agents: Vec<Vec<(String, f64, f64, AgentState)>>,
    pub decisions: Vec<PlannerDecision>,
}

fn snapshot(state: &SimState) -> Vec<(String, f64, f64, AgentState)> {
    state
        .agents
        .iter()
        .filter_map(|a| a.current().map(|s| (a.id.clone(), a.length, a.width, *s)))
        .collect()
}

fn row(state: &SimState, route: &ReferenceLine, decision: Option<&PlannerDecision>, candidates: usize, events: Vec<EventKind>) -> TraceRow {
    let e = &state.ego;
    let (station, lateral, _) = route.project([e.x, e.y]);
    let (source, maneuver, cost, fallback) = match decision {
        None => (String::new(), String::new(), None, false),
        Some(d) if d.fallback => ("fallback".to_string(), d.chosen.maneuver.name().to_string(), None, true),
        Some(d) => (
            d.chosen.source.name().to_string(),
            d.chosen.maneuver.name().to_string(),
            d.chosen_cost().map(|c| c.total),
            false,
        ),
    };
    let chosen = decision.and_then(|d| d.chosen_rank.map(|r| d.ranked[r].index));
    TraceRow {
        step: state.step,
        t: state.clock,
        x: e.x,
        y: e.y,
        heading: e.heading,
        v: e.v,
        a: e.a,
        phi: e.phi,
        station,
        lateral,
        source,
        maneuver,
        chosen,
        cost,
        candidates,
        fallback,
        events,
    }
}

/// Replans at every 0.1 s tick with `planner` and steps the world until the
/// route end is reached or the scenario time runs out.
pub fn run_closed_loop(scenario: &Scenario, planner: &Planner, config: &SimConfig) -> Result<SimRun> {
    let scenario = validate_scenario(scenario.clone()).map_err(Error::Validation)?;
    let route = ReferenceLine::new(scenario.route.points.clone())?;
    let mut state = SimState::initial(&scenario);
    let mut rows = vec![row(&state, &route, None, 0, Vec::new())];
    let mut agents = vec![snapshot(&state)];
    let mut decisions = Vec::new();
    let steps = ((scenario.duration / DT) + 1e-9).floor() as usize;
    while state.step < steps && !state.completed {
        let frame = state.frame(&scenario);
        let ctx = planner.prepare(&frame)?;
        let set = planner.candidates(&frame, &ctx, state.step as u64)?;
        let previous = state.previous.as_ref().map(|d| &d.chosen);
        let decision = planner.decide(&frame, &ctx, &set, previous)?;
        let logged = state.events.len();
        state = step(&state, &decision, &scenario, &route, &config.tracker, &config.events);
        let new_events = state.events[logged..].iter().map(|e| e.kind.clone()).collect();
        rows.push(row(&state, &route, Some(&decision), set.len(), new_events));
        agents.push(snapshot(&state));
        decisions.push(decision);
    }
    let metrics = metrics_from_trace(&rows, &config.events);
    Ok(SimRun { scenario: scenario.name.clone(), metrics, rows, agents, decisions })
}
