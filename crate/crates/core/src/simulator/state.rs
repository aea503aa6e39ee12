use serde::{Deserialize, Serialize};

use crate::geometry::kinematics::advance_arc;
use crate::geometry::shapes::convex_overlap;
use crate::geometry::{steering_from_curvature, OrientedBox, ReferenceLine};
use crate::planner::PlannerDecision;
use crate::time::{DT, HISTORY_STEPS};
use crate::types::{AgentState, AgentTrack, EgoState, Frame, Pose, Scenario, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    /// Pure-pursuit lookahead as time at the current speed, s.
    pub lookahead_time: f64,
    /// Lookahead floor, m.
    pub min_lookahead: f64,
    /// m/s^2
    pub max_accel: f64,
    /// m/s^2, positive.
    pub max_decel: f64,
    /// rad
    pub max_steer: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self { lookahead_time: 0.6, min_lookahead: 2.0, max_accel: 4.0, max_decel: 8.0, max_steer: 0.6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EventConfig {
    /// Lateral distance to the route that counts as a deviation, m.
    pub deviation: f64,
    /// Distance from the planned position that counts as lost control, m.
    pub lost_control: f64,
    /// m/s^2
    pub discomfort_lat_accel: f64,
    /// m/s^3
    pub discomfort_jerk: f64,
    /// Time a threshold must be exceeded to count, s.
    pub discomfort_sustain: f64,
}

impl Default for EventConfig {
    fn default() -> Self {
        Self { deviation: 2.5, lost_control: 1.5, discomfort_lat_accel: 3.0, discomfort_jerk: 5.0, discomfort_sustain: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum EventKind {
    /// Ego box started overlapping the named agent or `static:<index>`.
    Collision(String),
    Deviation,
    LostControl,
    Fallback,
    Discomfort,
    Completed,
}

impl EventKind {
    /// Compact text form used in trace files.
    pub fn label(&self) -> String {
        match self {
            Self::Collision(with) => format!("collision:{with}"),
            Self::Deviation => "deviation".into(),
            Self::LostControl => "lost_control".into(),
            Self::Fallback => "fallback".into(),
            Self::Discomfort => "discomfort".into(),
            Self::Completed => "completed".into(),
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        Some(match label {
            "deviation" => Self::Deviation,
            "lost_control" => Self::LostControl,
            "fallback" => Self::Fallback,
            "discomfort" => Self::Discomfort,
            "completed" => Self::Completed,
            other => Self::Collision(other.strip_prefix("collision:")?.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub step: usize,
    pub t: f64,
    pub kind: EventKind,
}

/// Everything that changes during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub step: usize,
    pub clock: f64,
    pub ego: EgoState,
    /// Past ego poses, oldest first, current excluded.
    pub ego_history: Vec<Pose>,
    pub agents: Vec<AgentTrack>,
    pub previous: Option<PlannerDecision>,
    pub events: Vec<Event>,
    /// Objects the ego overlapped after the last step.
    pub touching: Vec<String>,
    pub deviating: bool,
    pub lost: bool,
    pub completed: bool,
}

impl SimState {
    pub fn initial(scenario: &Scenario) -> Self {
        Self {
            step: 0,
            clock: 0.0,
            ego: scenario.ego_init,
            ego_history: Vec::new(),
            agents: scenario.agents.iter().map(|a| a.track.clone()).collect(),
            previous: None,
            events: Vec::new(),
            touching: Vec::new(),
            deviating: false,
            lost: false,
            completed: false,
        }
    }

    /// The planner's view of this state.
    pub fn frame(&self, scenario: &Scenario) -> Frame {
        Frame {
            ego: self.ego,
            ego_size: scenario.ego_size,
            ego_history: self.ego_history.clone(),
            agents: self.agents.clone(),
            landmarks: scenario.landmarks.clone(),
            route: scenario.route.clone(),
            static_obstacles: scenario.static_obstacles.clone(),
            stop_lines: scenario.stop_lines.clone(),
            grid: scenario.grid,
        }
    }
}

/// Target point `lookahead` meters along the plan measured from the point
/// nearest the ego, or the plan's end when it is shorter.
fn lookahead_point(ego: &EgoState, plan: &Trajectory, lookahead: f64) -> [f64; 2] {
    let pts: Vec<[f64; 2]> = plan.points().map(|w| w.xy()).collect();
    let p = [ego.x, ego.y];
    let (mut best, mut best_d, mut best_u) = (0usize, f64::INFINITY, 0.0);
    for (i, w) in pts.windows(2).enumerate() {
        let d = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        let u = if len2 > 0.0 { (((p[0] - w[0][0]) * d[0] + (p[1] - w[0][1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
        let q = [w[0][0] + u * d[0], w[0][1] + u * d[1]];
        let dist = (q[0] - p[0]).hypot(q[1] - p[1]);
        if dist < best_d {
            (best, best_d, best_u) = (i, dist, u);
        }
    }
    let mut remaining = lookahead;
    let mut from = {
        let (a, b) = (pts[best], pts[best + 1]);
        [a[0] + best_u * (b[0] - a[0]), a[1] + best_u * (b[1] - a[1])]
    };
    for i in best..pts.len() - 1 {
        let to = pts[i + 1];
        let seg = (to[0] - from[0]).hypot(to[1] - from[1]);
        if seg >= remaining && seg > 0.0 {
            let u = remaining / seg;
            return [from[0] + u * (to[0] - from[0]), from[1] + u * (to[1] - from[1])];
        }
        remaining -= seg;
        from = to;
    }
    *pts.last().expect("plans have points")
}

/// Pure-pursuit steering and speed command for one step. Speed control is
/// proportional with gain `1 / DT`: it asks for the plan's speed at the
/// next waypoint.
pub fn track(ego: &EgoState, plan: &Trajectory, config: &TrackerConfig) -> (f64, f64) {
    let v_ref = plan.waypoints.first().map_or(0.0, |w| w.v.max(0.0));
    let accel = ((v_ref - ego.v) / DT).clamp(-config.max_decel, config.max_accel);
    let ld = (ego.v * config.lookahead_time).max(config.min_lookahead);
    let target = lookahead_point(ego, plan, ld);
    let (dx, dy) = (target[0] - ego.x, target[1] - ego.y);
    let dist2 = dx * dx + dy * dy;
    if dist2 < 0.01 {
        return (accel, ego.phi);
    }
    let (s, c) = ego.heading.sin_cos();
    let lateral = -s * dx + c * dy;
    let kappa = 2.0 * lateral / dist2;
    let phi = steering_from_curvature(kappa, ego.wheelbase).clamp(-config.max_steer, config.max_steer);
    (accel, phi)
}

/// Kinematic bicycle step: speed changes by `accel * DT` (never below
/// zero) and the pose follows an arc of curvature `2 tan(phi) / L`.
pub fn integrate(ego: &EgoState, accel: f64, phi: f64) -> EgoState {
    let v0 = ego.v.max(0.0);
    let mut v1 = v0 + accel * DT;
    let distance = if v1 < 0.0 {
        v1 = 0.0;
        if accel < 0.0 { v0 * v0 / (-2.0 * accel) } else { 0.0 }
    } else {
        0.5 * (v0 + v1) * DT
    };
    let next = EgoState::new(ego.x, ego.y, ego.heading, v1, (v1 - v0) / DT, phi, ego.wheelbase);
    let pose = advance_arc(ego.pose(), distance, next.kappa);
    EgoState { x: pose.x, y: pose.y, heading: pose.heading, ..next }
}

/// Advances an agent by its scripted command, or straight at constant
/// speed once the script has run out.
pub fn advance_agent(track: &mut AgentTrack, wheelbase: f64, command: Option<[f64; 2]>, clock: f64) {
    let cur = *track.current().expect("agents have a current state");
    let v = track.speed().unwrap_or(0.0);
    let [a, steer] = command.unwrap_or([0.0, 0.0]);
    let ego_like = EgoState::new(cur.x, cur.y, cur.heading, v, 0.0, steer, wheelbase);
    let next = integrate(&ego_like, a, steer);
    track.history.push(AgentState { t: clock, x: next.x, y: next.y, heading: next.heading, v: Some(next.v) });
    if track.history.len() > HISTORY_STEPS {
        let drop = track.history.len() - HISTORY_STEPS;
        track.history.drain(..drop);
    }
}

/// Names of everything the ego box overlaps.
pub fn overlapping(ego: &EgoState, scenario: &Scenario, agents: &[AgentTrack]) -> Vec<String> {
    let size = scenario.ego_size;
    let ego_box = OrientedBox::new([ego.x, ego.y], ego.heading, size.length, size.width);
    let mut out = Vec::new();
    for a in agents {
        if let Some(s) = a.current() {
            if ego_box.overlaps(&OrientedBox::new([s.x, s.y], s.heading, a.length, a.width)) {
                out.push(a.id.clone());
            }
        }
    }
    for (i, poly) in scenario.static_obstacles.iter().enumerate() {
        if convex_overlap(&ego_box.corners(), poly) {
            out.push(format!("static:{i}"));
        }
    }
    out
}

/// Runs one 0.1 s tick: the ego tracks the decision, agents follow their
/// scripts, and collision, deviation, lost-control, fallback and completion
/// events are appended.
pub fn step(
    state: &SimState,
    decision: &PlannerDecision,
    scenario: &Scenario,
    route: &ReferenceLine,
    tracker: &TrackerConfig,
    events: &EventConfig,
) -> SimState {
    let mut next = state.clone();
    let (accel, phi) = track(&state.ego, &decision.chosen, tracker);
    next.ego = integrate(&state.ego, accel, phi);
    next.step += 1;
    next.clock = next.step as f64 * DT;
    next.ego_history.push(state.ego.pose());
    if next.ego_history.len() > HISTORY_STEPS {
        next.ego_history.remove(0);
    }
    for (track, script) in next.agents.iter_mut().zip(&scenario.agents) {
        advance_agent(track, script.wheelbase, script.commands.get(state.step).copied(), next.clock);
    }
    let push = |kind: EventKind, log: &mut Vec<Event>| log.push(Event { step: next.step, t: next.clock, kind });
    let mut log = Vec::new();
    if decision.fallback {
        push(EventKind::Fallback, &mut log);
    }
    let touching = overlapping(&next.ego, scenario, &next.agents);
    for name in &touching {
        if !state.touching.contains(name) {
            push(EventKind::Collision(name.clone()), &mut log);
        }
    }
    next.touching = touching;
    let (s, l, _) = route.project([next.ego.x, next.ego.y]);
    let deviating = l.abs() > events.deviation;
    if deviating && !state.deviating {
        push(EventKind::Deviation, &mut log);
    }
    next.deviating = deviating;
    let planned = decision.chosen.waypoints.first().map_or([state.ego.x, state.ego.y], |w| w.xy());
    let lost = (next.ego.x - planned[0]).hypot(next.ego.y - planned[1]) > events.lost_control;
    if lost && !state.lost {
        push(EventKind::LostControl, &mut log);
    }
    next.lost = lost;
    if !state.completed && s >= route.length() - 1e-9 {
        next.completed = true;
        push(EventKind::Completed, &mut log);
    }
    next.events.extend(log);
    next.previous = Some(decision.clone());
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::line;
    use crate::time::{waypoint_time, HORIZON_STEPS};
    use crate::types::{Maneuver, Source, Waypoint};

    fn decision(plan: Trajectory) -> PlannerDecision {
        PlannerDecision { chosen: plan, chosen_rank: None, ranked: Vec::new(), fallback: false, consistency: None }
    }

    #[test]
    fn straight_step_advances_by_v_dt() {
        let ego = EgoState::cruising(0.0, 0.0, 0.0, 8.0);
        let (a, phi) = track(&ego, &line(0.0, 0.0, 0.0, 8.0, Source::Lattice), &TrackerConfig::default());
        let next = integrate(&ego, a, phi);
        assert!((next.x - 0.8).abs() < 1e-6 && next.y.abs() < 1e-12 && next.heading == 0.0);
    }

    #[test]
    fn zero_speed_plan_holds_still() {
        let ego = EgoState::cruising(3.0, 4.0, 1.0, 0.0);
        let (a, phi) = track(&ego, &line(3.0, 4.0, 1.0, 0.0, Source::Lattice), &TrackerConfig::default());
        let next = integrate(&ego, a, phi);
        assert_eq!((next.x, next.y, next.v), (3.0, 4.0, 0.0));
    }

    fn arc(ego: &EgoState, kappa: f64) -> Trajectory {
        let samples = (0..=HORIZON_STEPS)
            .map(|k| {
                let t = waypoint_time(k);
                let p = advance_arc(ego.pose(), ego.v * t, kappa);
                Waypoint { t, x: p.x, y: p.y, heading: p.heading, v: ego.v }
            })
            .collect();
        Trajectory::from_samples(samples, Maneuver::Turn, Source::Curve)
    }

    #[test]
    fn arc_tracking_turns_at_kappa_v() {
        let (kappa, v) = (0.05, 6.0);
        let mut ego = EgoState::new(0.0, 0.0, 0.0, v, 0.0, steering_from_curvature(kappa, 2.8), 2.8);
        for _ in 0..30 {
            let (a, phi) = track(&ego, &arc(&ego, kappa), &TrackerConfig::default());
            ego = integrate(&ego, a, phi);
        }
        let expected = kappa * v * 3.0;
        assert!((ego.heading - expected).abs() <= 0.02 * expected, "{} vs {expected}", ego.heading);
    }

    #[test]
    fn braking_stops_without_reversing() {
        let ego = EgoState::cruising(0.0, 0.0, 0.0, 0.3);
        let next = integrate(&ego, -8.0, 0.0);
        assert_eq!(next.v, 0.0);
        assert!((next.x - 0.09 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn event_labels_round_trip() {
        for k in [EventKind::Collision("lead".into()), EventKind::Deviation, EventKind::LostControl, EventKind::Fallback, EventKind::Discomfort, EventKind::Completed] {
            assert_eq!(EventKind::parse(&k.label()), Some(k));
        }
    }

    #[test]
    fn fallback_is_logged_every_step() {
        let scenario = crate::simulator::builtin_scenario("empty_road").unwrap();
        let route = ReferenceLine::new(scenario.route.points.clone()).unwrap();
        let mut state = SimState::initial(&scenario);
        for _ in 0..3 {
            let mut d = decision(line(state.ego.x, state.ego.y, 0.0, state.ego.v, Source::Curve));
            d.fallback = true;
            state = step(&state, &d, &scenario, &route, &TrackerConfig::default(), &EventConfig::default());
        }
        assert_eq!(state.events.iter().filter(|e| e.kind == EventKind::Fallback).count(), 3);
        assert!((state.clock - 0.3).abs() < 1e-12);
    }
}
