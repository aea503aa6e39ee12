//! Domain types shared by every stage of the stack.
//!
//! All coordinates are in the Ego-ENU frame: x points east, y points north,
//! headings are measured counter-clockwise from east. Lengths are meters,
//! speeds m/s, angles radians.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::kinematics::curvature_from_steering_unchecked;
use crate::raster::GridGeometry;
use crate::time::{waypoint_time, DT, HORIZON_STEPS, HISTORY_STEPS};

pub type Point2 = [f64; 2];
pub type Polygon = Vec<Point2>;

pub const SCENARIO_FORMAT_VERSION: u32 = 1;

const TIME_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub v: f64,
    pub a: f64,
    pub phi: f64,
    pub wheelbase: f64,
    pub kappa: f64,
}

impl EgoState {
    /// Builds a state whose curvature is derived from the steering angle.
    pub fn new(x: f64, y: f64, heading: f64, v: f64, a: f64, phi: f64, wheelbase: f64) -> Self {
        let kappa = curvature_from_steering_unchecked(phi, wheelbase);
        Self { x, y, heading, v, a, phi, wheelbase, kappa }
    }

    /// Straight-driving state at constant speed with a 2.8 m wheelbase.
    pub fn cruising(x: f64, y: f64, heading: f64, v: f64) -> Self {
        Self::new(x, y, heading, v, 0.0, 0.0, 2.8)
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.heading)
    }

    pub fn origin_waypoint(&self) -> Waypoint {
        Waypoint { t: 0.0, x: self.x, y: self.y, heading: self.heading, v: self.v }
    }

    pub fn violations(&self, path: &str) -> Vec<String> {
        let mut out = Vec::new();
        let fields = [
            ("x", self.x),
            ("y", self.y),
            ("heading", self.heading),
            ("v", self.v),
            ("a", self.a),
            ("phi", self.phi),
            ("wheelbase", self.wheelbase),
            ("kappa", self.kappa),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                out.push(format!("{path}.{name} must be finite"));
            }
        }
        if !(self.wheelbase > 0.0) {
            out.push(format!("{path}.wheelbase must be > 0"));
        } else if self.phi.is_finite() && self.kappa.is_finite() {
            let expected = curvature_from_steering_unchecked(self.phi, self.wheelbase);
            if (expected - self.kappa).abs() > 1e-9 {
                out.push(format!(
                    "{path}.kappa = {} disagrees with 2 tan(phi) / L = {expected}",
                    self.kappa
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentClass {
    Vehicle,
    Pedestrian,
    Cyclist,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentTrack {
    pub id: String,
    pub class: AgentClass,
    pub length: f64,
    pub width: f64,
    /// Oldest first; the last entry is the current state.
    pub history: Vec<AgentState>,
}

impl AgentTrack {
    pub fn current(&self) -> Option<&AgentState> {
        self.history.last()
    }

    /// Current speed: the reported value, else a finite difference over the
    /// last two states.
    pub fn speed(&self) -> Option<f64> {
        let last = self.history.last()?;
        if let Some(v) = last.v {
            return Some(v);
        }
        let n = self.history.len();
        if n < 2 {
            return None;
        }
        let prev = &self.history[n - 2];
        let dt = last.t - prev.t;
        Some(((last.x - prev.x).hypot(last.y - prev.y)) / dt)
    }

    pub fn violations(&self, path: &str) -> Vec<String> {
        let mut out = Vec::new();
        let who = format!("{path} (agent '{}')", self.id);
        if !(self.length > 0.0) || !(self.width > 0.0) {
            out.push(format!("{who}: length and width must be > 0"));
        }
        if self.history.is_empty() {
            out.push(format!("{who}: history must contain at least the current state"));
        }
        if self.history.len() > HISTORY_STEPS {
            out.push(format!("{who}: history holds {} states, at most {HISTORY_STEPS} allowed", self.history.len()));
        }
        for (i, s) in self.history.iter().enumerate() {
            let finite = [s.t, s.x, s.y, s.heading].iter().all(|v| v.is_finite())
                && s.v.map_or(true, f64::is_finite);
            if !finite {
                out.push(format!("{who}.history[{i}] has non-finite fields"));
            }
        }
        for (i, pair) in self.history.windows(2).enumerate() {
            let gap = pair[1].t - pair[0].t;
            if (gap - DT).abs() > TIME_TOL {
                out.push(format!(
                    "{who}.history[{}]: spacing {gap:.3} s, expected {DT} s",
                    i + 1
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub v: f64,
}

impl Waypoint {
    pub fn xy(&self) -> Point2 {
        [self.x, self.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Maneuver {
    LaneKeep,
    LaneChangeLeft,
    LaneChangeRight,
    Follow,
    Overtake,
    Stop,
    Turn,
    Generative,
}

impl Maneuver {
    pub const ALL: [Maneuver; 8] = [
        Maneuver::LaneKeep,
        Maneuver::LaneChangeLeft,
        Maneuver::LaneChangeRight,
        Maneuver::Follow,
        Maneuver::Overtake,
        Maneuver::Stop,
        Maneuver::Turn,
        Maneuver::Generative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Maneuver::LaneKeep => "lane_keep",
            Maneuver::LaneChangeLeft => "lane_change_left",
            Maneuver::LaneChangeRight => "lane_change_right",
            Maneuver::Follow => "follow",
            Maneuver::Overtake => "overtake",
            Maneuver::Stop => "stop",
            Maneuver::Turn => "turn",
            Maneuver::Generative => "generative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Curve,
    Retrieval,
    Lattice,
    Imitation,
    Gan,
    Human,
}

impl Source {
    pub const ALL: [Source; 6] = [
        Source::Curve,
        Source::Retrieval,
        Source::Lattice,
        Source::Imitation,
        Source::Gan,
        Source::Human,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Source::Curve => "curve",
            Source::Retrieval => "retrieval",
            Source::Lattice => "lattice",
            Source::Imitation => "imitation",
            Source::Gan => "gan",
            Source::Human => "human",
        }
    }
}

/// A 3 s plan: the state at `t = 0` plus 30 waypoints at `t = 0.1 k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub origin: Waypoint,
    pub waypoints: Vec<Waypoint>,
    pub maneuver: Maneuver,
    pub source: Source,
}

impl Trajectory {
    /// Builds a trajectory from 31 samples (origin first) of a motion profile.
    pub fn from_samples(samples: Vec<Waypoint>, maneuver: Maneuver, source: Source) -> Self {
        debug_assert_eq!(samples.len(), HORIZON_STEPS + 1);
        let mut it = samples.into_iter();
        let origin = it.next().expect("origin sample");
        Self { origin, waypoints: it.collect(), maneuver, source }
    }

    /// Origin followed by the waypoints.
    pub fn points(&self) -> impl Iterator<Item = &Waypoint> {
        std::iter::once(&self.origin).chain(self.waypoints.iter())
    }

    pub fn last(&self) -> &Waypoint {
        self.waypoints.last().unwrap_or(&self.origin)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.waypoints.len() != HORIZON_STEPS {
            out.push(format!("trajectory has {} waypoints, expected {HORIZON_STEPS}", self.waypoints.len()));
        }
        if self.origin.t.abs() > 1e-9 {
            out.push("trajectory origin must sit at t = 0".into());
        }
        for (i, w) in self.points().enumerate() {
            if ![w.t, w.x, w.y, w.heading, w.v].iter().all(|v| v.is_finite()) {
                out.push(format!("waypoint {i} has non-finite fields"));
            }
            if w.v < 0.0 {
                out.push(format!("waypoint {i} has negative speed {}", w.v));
            }
            if i > 0 && (w.t - waypoint_time(i)).abs() > 1e-9 {
                out.push(format!("waypoint {i} at t = {}, expected {}", w.t, waypoint_time(i)));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteSource {
    LaneCenter,
    CommutingHistory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub points: Vec<Point2>,
    pub source: RouteSource,
    pub target_speed: f64,
}

impl Route {
    pub fn violations(&self, path: &str) -> Vec<String> {
        let mut out = Vec::new();
        if self.points.len() < 2 {
            out.push(format!("{path}.points needs at least 2 points"));
        }
        for (i, pair) in self.points.windows(2).enumerate() {
            if (pair[1][0] - pair[0][0]).hypot(pair[1][1] - pair[0][1]) < 1e-6 {
                out.push(format!("{path}.points[{}] duplicates its predecessor", i + 1));
            }
        }
        if self.points.iter().flatten().any(|v| !v.is_finite()) {
            out.push(format!("{path}.points must be finite"));
        }
        if !(self.target_speed >= 0.0) {
            out.push(format!("{path}.target_speed must be >= 0"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandmarkKind {
    LaneCenter,
    LaneDivider,
    RoadBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub kind: LandmarkKind,
    pub points: Vec<Point2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightState {
    Permitted,
    Yield,
    Prohibited,
}

/// Stop line footprint with the traffic-light permissibility of the ego route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopLine {
    pub polygon: Polygon,
    pub state: LightState,
}

/// Open-loop motion program for a non-ego agent: its initial track plus one
/// `(acceleration, steering)` command per simulator step. After the commands
/// run out the agent holds speed and goes straight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentScript {
    pub track: AgentTrack,
    #[serde(default = "default_wheelbase")]
    pub wheelbase: f64,
    #[serde(default)]
    pub commands: Vec<[f64; 2]>,
}

fn default_wheelbase() -> f64 {
    2.8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleSize {
    pub length: f64,
    pub width: f64,
}

impl Default for VehicleSize {
    fn default() -> Self {
        Self { length: 4.8, width: 1.9 }
    }
}

/// Spatial extent and resolution of the ego-centered grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub width_m: f64,
    pub height_m: f64,
    pub resolution: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { width_m: 100.0, height_m: 100.0, resolution: 0.2 }
    }
}

impl GridSpec {
    pub fn violations(&self) -> Vec<String> {
        if self.resolution > 0.0 && self.width_m > 0.0 && self.height_m > 0.0 {
            Vec::new()
        } else {
            vec!["grid: resolution and extent must be > 0".into()]
        }
    }

    pub fn cols(&self) -> usize {
        (self.width_m / self.resolution).round() as usize
    }

    pub fn rows(&self) -> usize {
        (self.height_m / self.resolution).round() as usize
    }

    /// Grid geometry whose center lies at `center`.
    pub fn centered_at(&self, center: Point2) -> GridGeometry {
        let rows = self.rows();
        let cols = self.cols();
        let res = self.resolution;
        // Snap to the resolution lattice so translated scenes rasterize identically.
        let ox = ((center[0] - 0.5 * (cols as f64 - 1.0) * res) / res).round() * res;
        let oy = ((center[1] - 0.5 * (rows as f64 - 1.0) * res) / res).round() * res;
        GridGeometry::new([ox, oy], res, rows, cols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub format_version: u32,
    pub name: String,
    pub ego_init: EgoState,
    #[serde(default)]
    pub ego_size: VehicleSize,
    #[serde(default)]
    pub agents: Vec<AgentScript>,
    pub route: Route,
    #[serde(default)]
    pub landmarks: Vec<Landmark>,
    #[serde(default)]
    pub static_obstacles: Vec<Polygon>,
    #[serde(default)]
    pub stop_lines: Vec<StopLine>,
    pub duration: f64,
    #[serde(default)]
    pub grid: GridSpec,
}

impl Scenario {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.format_version != SCENARIO_FORMAT_VERSION {
            out.push(format!(
                "format_version {} is not supported (expected {SCENARIO_FORMAT_VERSION})",
                self.format_version
            ));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            out.push("duration must be > 0".into());
        }
        out.extend(self.ego_init.violations("ego_init"));
        if !(self.ego_size.length > 0.0 && self.ego_size.width > 0.0) {
            out.push("ego_size: length and width must be > 0".into());
        }
        for (i, a) in self.agents.iter().enumerate() {
            out.extend(a.track.violations(&format!("agents[{i}].track")));
            if !(a.wheelbase > 0.0) {
                out.push(format!("agents[{i}].wheelbase must be > 0"));
            }
        }
        out.extend(self.route.violations("route"));
        for (i, lm) in self.landmarks.iter().enumerate() {
            if lm.points.len() < 2 {
                out.push(format!("landmarks[{i}].points needs at least 2 points"));
            }
        }
        for (i, poly) in self.static_obstacles.iter().enumerate() {
            if poly.len() < 3 {
                out.push(format!("static_obstacles[{i}] needs at least 3 vertices"));
            }
        }
        for (i, sl) in self.stop_lines.iter().enumerate() {
            if sl.polygon.len() < 3 {
                out.push(format!("stop_lines[{i}].polygon needs at least 3 vertices"));
            }
        }
        out.extend(self.grid.violations());
        out
    }
}

/// Returns the scenario unchanged when every invariant holds, otherwise the
/// list of violations with their field paths.
pub fn validate_scenario(scenario: Scenario) -> std::result::Result<Scenario, Vec<String>> {
    let violations = scenario.violations();
    if violations.is_empty() {
        Ok(scenario)
    } else {
        Err(violations)
    }
}

/// One planning frame: what perception hands the planner at a single tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub ego: EgoState,
    pub ego_size: VehicleSize,
    /// Past ego poses, oldest first, current pose excluded.
    pub ego_history: Vec<Pose>,
    pub agents: Vec<AgentTrack>,
    pub landmarks: Vec<Landmark>,
    pub route: Route,
    pub static_obstacles: Vec<Polygon>,
    pub stop_lines: Vec<StopLine>,
    pub grid: GridSpec,
}

impl Frame {
    /// Frame at the start of a scenario.
    pub fn initial(scenario: &Scenario) -> Self {
        Self {
            ego: scenario.ego_init,
            ego_size: scenario.ego_size,
            ego_history: Vec::new(),
            agents: scenario.agents.iter().map(|a| a.track.clone()).collect(),
            landmarks: scenario.landmarks.clone(),
            route: scenario.route.clone(),
            static_obstacles: scenario.static_obstacles.clone(),
            stop_lines: scenario.stop_lines.clone(),
            grid: scenario.grid,
        }
    }

    pub fn geometry(&self) -> GridGeometry {
        self.grid.centered_at([self.ego.x, self.ego.y])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub candidates: Vec<Trajectory>,
    pub counts: BTreeMap<Source, usize>,
    /// Set when a generator was asked to run with an empty sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl CandidateSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_trajectories(trajectories: Vec<Trajectory>) -> Self {
        let mut set = Self::new();
        for t in trajectories {
            set.push(t);
        }
        set
    }

    pub fn push(&mut self, trajectory: Trajectory) {
        *self.counts.entry(trajectory.source).or_insert(0) += 1;
        self.candidates.push(trajectory);
    }

    pub fn extend(&mut self, other: CandidateSet) {
        for t in other.candidates {
            self.push(t);
        }
        if self.warning.is_none() {
            self.warning = other.warning;
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Trajectory> {
        self.candidates.iter()
    }

    /// Keeps candidates for which `keep` holds, preserving order.
    pub fn retain(&mut self, mut keep: impl FnMut(&Trajectory) -> bool) {
        self.candidates.retain(|t| keep(t));
        self.counts.clear();
        for t in &self.candidates {
            *self.counts.entry(t.source).or_insert(0) += 1;
        }
    }
}
