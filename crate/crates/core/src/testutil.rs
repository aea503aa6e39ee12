//! Small scenes shared by unit tests.

use crate::planner::{PlanContext, Planner, PlannerConfig};
use crate::evaluator::CostModel;
use crate::time::{waypoint_time, HORIZON_STEPS};
use crate::types::{
    EgoState, Frame, GridSpec, Maneuver, Polygon, Route, RouteSource, Source, Trajectory, VehicleSize, Waypoint,
};

pub fn straight_route(target_speed: f64) -> Route {
    Route { points: vec![[-20.0, 0.0], [200.0, 0.0]], source: RouteSource::LaneCenter, target_speed }
}

/// Ego at the origin heading east on a straight route, 60 x 30 m grid.
pub fn frame(v: f64) -> Frame {
    Frame {
        ego: EgoState::cruising(0.0, 0.0, 0.0, v),
        ego_size: VehicleSize::default(),
        ego_history: Vec::new(),
        agents: Vec::new(),
        landmarks: Vec::new(),
        route: straight_route(v),
        static_obstacles: Vec::new(),
        stop_lines: Vec::new(),
        grid: GridSpec { width_m: 80.0, height_m: 30.0, resolution: 0.2 },
    }
}

pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
    vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]]
}

pub fn context(frame: &Frame) -> PlanContext {
    Planner::new(PlannerConfig::default(), CostModel::default()).prepare(frame).unwrap()
}

/// Constant-speed line along `heading` through `(x0, y0)`.
pub fn line(x0: f64, y0: f64, heading: f64, v: f64, source: Source) -> Trajectory {
    let (s, c) = heading.sin_cos();
    let samples = (0..=HORIZON_STEPS)
        .map(|k| {
            let t = waypoint_time(k);
            Waypoint { t, x: x0 + v * t * c, y: y0 + v * t * s, heading, v }
        })
        .collect();
    Trajectory::from_samples(samples, Maneuver::LaneKeep, source)
}
