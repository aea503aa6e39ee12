//! Deterministic synthetic driving dataset.
//!
//! Each frame is drawn from one of five scene classes. Its "human" ground
//! truth is the lattice candidate that a hidden expert cost model likes
//! best. The lattice used here sweeps a superset of the planner's default
//! end states under looser kinematic filtering. A scene whose expert choice
//! fails the safety checks is redrawn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{CostModel, TrainingFrame};
use crate::planner::{check_candidate, GanFrame, GenContext, Planner, PlannerConfig, SafetyVerdict, SamplerToggles};
use crate::samplers::{KinematicLimits, LatticeConfig};
use crate::types::{
    AgentClass, AgentState, AgentTrack, EgoState, Frame, GridSpec, Landmark, LandmarkKind, LightState, Point2, Pose,
    Route, RouteSource, Source, StopLine, Trajectory, VehicleSize,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioClass {
    Cruise,
    LaneChange,
    Follow,
    Stop,
    Turn,
}

impl ScenarioClass {
    pub const ALL: [ScenarioClass; 5] =
        [ScenarioClass::Cruise, ScenarioClass::LaneChange, ScenarioClass::Follow, ScenarioClass::Stop, ScenarioClass::Turn];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cruise => "cruise",
            Self::LaneChange => "lane_change",
            Self::Follow => "follow",
            Self::Stop => "stop",
            Self::Turn => "turn",
        }
    }
}

/// Relative class frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassWeights {
    pub cruise: f64,
    pub lane_change: f64,
    pub follow: f64,
    pub stop: f64,
    pub turn: f64,
}

impl Default for ClassWeights {
    fn default() -> Self {
        Self { cruise: 1.0, lane_change: 1.0, follow: 1.0, stop: 1.0, turn: 1.0 }
    }
}

impl ClassWeights {
    pub fn only(class: ScenarioClass) -> Self {
        let mut w = Self { cruise: 0.0, lane_change: 0.0, follow: 0.0, stop: 0.0, turn: 0.0 };
        *w.get_mut(class) = 1.0;
        w
    }

    pub fn get(&self, class: ScenarioClass) -> f64 {
        match class {
            ScenarioClass::Cruise => self.cruise,
            ScenarioClass::LaneChange => self.lane_change,
            ScenarioClass::Follow => self.follow,
            ScenarioClass::Stop => self.stop,
            ScenarioClass::Turn => self.turn,
        }
    }

    fn get_mut(&mut self, class: ScenarioClass) -> &mut f64 {
        match class {
            ScenarioClass::Cruise => &mut self.cruise,
            ScenarioClass::LaneChange => &mut self.lane_change,
            ScenarioClass::Follow => &mut self.follow,
            ScenarioClass::Stop => &mut self.stop,
            ScenarioClass::Turn => &mut self.turn,
        }
    }

    fn validate(&self) -> Result<()> {
        let ws = ScenarioClass::ALL.map(|c| self.get(c));
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) || ws.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidInput("class weights must be non-negative with a positive sum".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    pub frames: usize,
    pub seed: u64,
    pub classes: ClassWeights,
    /// Scene draws tried per frame before giving up.
    pub max_retries: usize,
    /// The hidden cost model whose preferences the ground truth follows.
    pub expert: CostModel,
    pub grid: GridSpec,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            frames: 250,
            seed: 2024,
            classes: ClassWeights::default(),
            max_retries: 20,
            expert: CostModel { weights: [5.0, 5.0, 2.0, 1.5, 3.0, 0.0], alpha: 1.0, beta: 1.0 },
            grid: GridSpec { width_m: 80.0, height_m: 80.0, resolution: 0.2 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFrame {
    pub class: ScenarioClass,
    pub frame: Frame,
    pub gt: Trajectory,
}

/// Lattice used for ground truth: every default end state plus extra ones,
/// filtered with loose limits.
pub fn expert_lattice() -> LatticeConfig {
    let mut cfg = LatticeConfig::default();
    cfg.speed_offsets.extend([-3.0, -0.5, 0.5, 3.0]);
    cfg.cruise_times.extend([2.5, 5.0]);
    cfg.lateral_offsets.extend([0.4, -0.4, 2.5, -2.5]);
    cfg.lateral_times.push(3.0);
    cfg.limits = KinematicLimits { max_accel: 8.0, max_curvature: 0.4, max_jerk: 80.0, max_lat_accel: 6.0 };
    cfg
}

fn lane(y: f64) -> Landmark {
    Landmark { kind: LandmarkKind::LaneCenter, points: vec![[-60.0, y], [200.0, y]] }
}

fn base_frame(v: f64, route: Route, grid: GridSpec) -> Frame {
    let ego = EgoState::cruising(0.0, 0.0, 0.0, v);
    let ego_history = (1..15).rev().map(|k| Pose::new(-v * 0.1 * k as f64, 0.0, 0.0)).collect();
    Frame {
        ego,
        ego_size: VehicleSize::default(),
        ego_history,
        agents: Vec::new(),
        landmarks: vec![lane(0.0), lane(3.5), lane(-3.5)],
        route,
        static_obstacles: Vec::new(),
        stop_lines: Vec::new(),
        grid,
    }
}

fn straight(y: f64, target_speed: f64) -> Route {
    Route { points: vec![[-20.0, y], [200.0, y]], source: RouteSource::LaneCenter, target_speed }
}

/// Constant-velocity history of a vehicle currently at `(x, y)`.
fn vehicle(id: &str, x: f64, y: f64, v: f64) -> AgentTrack {
    let history = (0..15)
        .rev()
        .map(|k| AgentState { t: -0.1 * k as f64, x: x - v * 0.1 * k as f64, y, heading: 0.0, v: Some(v) })
        .collect();
    AgentTrack { id: id.into(), class: AgentClass::Vehicle, length: 4.5, width: 1.8, history }
}

fn draw_scene(class: ScenarioClass, rng: &mut ChaCha8Rng, grid: GridSpec) -> Frame {
    match class {
        ScenarioClass::Cruise => {
            let v = rng.random_range(4.0..15.0);
            let target = (v + rng.random_range(-3.0..3.0f64)).max(2.0);
            base_frame(v, straight(0.0, target), grid)
        }
        ScenarioClass::LaneChange => {
            let v = rng.random_range(6.0..14.0);
            let side = if rng.random_bool(0.5) { 3.5 } else { -3.5 };
            base_frame(v, straight(side, v), grid)
        }
        ScenarioClass::Follow => {
            let v = rng.random_range(7.0..14.0);
            let lead_v = rng.random_range(2.0..v - 2.0);
            let gap = rng.random_range(15.0..32.0);
            let mut f = base_frame(v, straight(0.0, v), grid);
            f.agents.push(vehicle("lead", gap, 0.0, lead_v));
            // Traffic in both neighbor lanes keeps the lead from being passed.
            f.agents.push(vehicle("left", gap + rng.random_range(-3.0..3.0), 3.5, lead_v));
            f.agents.push(vehicle("right", gap + rng.random_range(-3.0..3.0), -3.5, lead_v));
            f
        }
        ScenarioClass::Stop => {
            let v = rng.random_range(3.0..10.0);
            let d = rng.random_range(v * v / 4.0 + 8.0..v * v / 4.0 + 25.0);
            let mut f = base_frame(v, straight(0.0, v), grid);
            f.stop_lines.push(StopLine {
                polygon: vec![[d, -5.5], [d + 0.5, -5.5], [d + 0.5, 5.5], [d, 5.5]],
                state: LightState::Prohibited,
            });
            f
        }
        ScenarioClass::Turn => {
            let v = rng.random_range(3.0..7.0);
            let r = rng.random_range(14.0..30.0);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let start = rng.random_range(0.0..12.0);
            let mut points: Vec<Point2> = vec![[-20.0, 0.0]];
            let n = 40;
            for i in 0..=n {
                let th = std::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
                points.push([start + r * th.sin(), sign * r * (1.0 - th.cos())]);
            }
            points.push([start + r, sign * (r + 40.0)]);
            let route = Route { points, source: RouteSource::CommutingHistory, target_speed: v };
            let mut f = base_frame(v, route, grid);
            f.landmarks.clear();
            f
        }
    }
}

fn pick_class(weights: &ClassWeights, rng: &mut ChaCha8Rng) -> ScenarioClass {
    let total: f64 = ScenarioClass::ALL.iter().map(|c| weights.get(*c)).sum();
    let mut u = rng.random_range(0.0..total);
    for c in ScenarioClass::ALL {
        let w = weights.get(c);
        if u < w {
            return c;
        }
        u -= w;
    }
    *ScenarioClass::ALL.iter().rev().find(|c| weights.get(**c) > 0.0).expect("validated")
}

/// Planner that produces ground truth: lattice only, expert lattice, hidden
/// expert cost.
pub fn expert_planner(config: &DatasetConfig) -> Planner {
    let planner_cfg = PlannerConfig {
        samplers: SamplerToggles { lattice: true, ..SamplerToggles::NONE },
        lattice: expert_lattice(),
        ..PlannerConfig::default()
    };
    Planner::new(planner_cfg, config.expert)
}

/// The expert's choice: the cheapest expert-lattice candidate under the
/// hidden cost. `None` when the lattice is empty or the choice fails the
/// safety checks, which makes the scene infeasible.
pub fn expert_ground_truth(planner: &Planner, frame: &Frame) -> Result<Option<Trajectory>> {
    let ctx = planner.prepare(frame)?;
    let set = planner.candidates(frame, &ctx, 0)?;
    let best = set
        .iter()
        .map(|c| (planner.model.energy(&ctx.planes.feature_sums(c).0), c))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let Some((_, best)) = best else { return Ok(None) };
    let verdict = check_candidate(best, frame.ego_size, &ctx.occupancy, &ctx.footprints, &planner.config.safety);
    Ok((verdict == SafetyVerdict::Passed).then(|| Trajectory { source: Source::Human, ..best.clone() }))
}

pub fn generate_synthetic_dataset(config: &DatasetConfig) -> Result<Vec<DatasetFrame>> {
    config.classes.validate()?;
    if config.max_retries == 0 {
        return Err(Error::InvalidInput("max_retries must be at least 1".into()));
    }
    let planner = expert_planner(config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.frames);
    for i in 0..config.frames {
        let class = pick_class(&config.classes, &mut rng);
        let mut gt = None;
        for _ in 0..config.max_retries {
            let frame = draw_scene(class, &mut rng, config.grid);
            if let Some(t) = expert_ground_truth(&planner, &frame)? {
                gt = Some((frame, t));
                break;
            }
        }
        let (frame, gt) = gt.ok_or_else(|| {
            Error::InvalidInput(format!(
                "frame {i}: no feasible {} scene after {} attempts",
                class.name(),
                config.max_retries
            ))
        })?;
        out.push(DatasetFrame { class, frame, gt });
    }
    Ok(out)
}

/// Max-margin training frames: each ground truth against the candidates
/// `planner` produces on its frame.
pub fn training_frames(dataset: &[DatasetFrame], planner: &Planner) -> Result<Vec<TrainingFrame>> {
    dataset
        .iter()
        .map(|d| {
            let ctx = planner.prepare(&d.frame)?;
            let set = planner.candidates(&d.frame, &ctx, 0)?;
            TrainingFrame::new(&ctx.planes, &d.gt, &set)
        })
        .collect()
}

pub fn gan_frames(dataset: &[DatasetFrame], planner: &Planner) -> Result<Vec<GanFrame>> {
    dataset
        .iter()
        .map(|d| {
            let ctx = planner.prepare(&d.frame)?;
            Ok(GanFrame { context: GenContext::new(&d.frame.ego, &d.frame.route)?, planes: ctx.planes, gt: d.gt.clone() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(classes: ClassWeights, frames: usize) -> DatasetConfig {
        DatasetConfig { frames, classes, seed: 5, ..DatasetConfig::default() }
    }

    #[test]
    fn all_cruise_gives_straight_ground_truth() {
        let data = generate_synthetic_dataset(&small(ClassWeights::only(ScenarioClass::Cruise), 10)).unwrap();
        assert_eq!(data.len(), 10);
        for d in &data {
            assert_eq!(d.class, ScenarioClass::Cruise);
            assert!(d.gt.waypoints.iter().all(|w| w.y.abs() < 1e-6), "{:?}", d.gt.waypoints.last());
        }
    }

    #[test]
    fn fixed_seed_gives_identical_bytes() {
        let cfg = small(ClassWeights::default(), 6);
        let a = serde_json::to_string(&generate_synthetic_dataset(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_synthetic_dataset(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_class_is_feasible() {
        for c in ScenarioClass::ALL {
            let data = generate_synthetic_dataset(&small(ClassWeights::only(c), 3)).unwrap();
            assert!(data.iter().all(|d| d.class == c));
        }
    }

    #[test]
    fn zero_weights_are_rejected() {
        let mut cfg = small(ClassWeights::default(), 1);
        cfg.classes = ClassWeights { cruise: 0.0, lane_change: 0.0, follow: 0.0, stop: 0.0, turn: 0.0 };
        assert!(generate_synthetic_dataset(&cfg).is_err());
    }
}
