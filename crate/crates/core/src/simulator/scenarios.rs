//! Built-in closed-loop scenarios. Each lasts under 10 s of simulated time.

use crate::types::{
    AgentClass, AgentScript, AgentState, AgentTrack, EgoState, GridSpec, Landmark, LandmarkKind, Point2, Route,
    RouteSource, Scenario, VehicleSize, SCENARIO_FORMAT_VERSION,
};

pub const SCENARIO_NAMES: [&str; 5] = ["lead_brake", "static_obstacle", "cut_in", "right_turn", "empty_road"];

fn lane(y: f64, x0: f64, x1: f64) -> Landmark {
    Landmark { kind: LandmarkKind::LaneCenter, points: vec![[x0, y], [x1, y]] }
}

fn vehicle(id: &str, x: f64, y: f64, heading: f64, v: f64, commands: Vec<[f64; 2]>) -> AgentScript {
    AgentScript {
        track: AgentTrack {
            id: id.into(),
            class: AgentClass::Vehicle,
            length: 4.5,
            width: 1.8,
            history: vec![AgentState { t: 0.0, x, y, heading, v: Some(v) }],
        },
        wheelbase: 2.8,
        commands,
    }
}

fn base(name: &str, ego: EgoState, route: Route, duration: f64) -> Scenario {
    Scenario {
        format_version: SCENARIO_FORMAT_VERSION,
        name: name.into(),
        ego_init: ego,
        ego_size: VehicleSize::default(),
        agents: Vec::new(),
        route,
        landmarks: Vec::new(),
        static_obstacles: Vec::new(),
        stop_lines: Vec::new(),
        duration,
        grid: GridSpec::default(),
    }
}

fn straight_route(length: f64, target_speed: f64) -> Route {
    Route { points: vec![[0.0, 0.0], [length, 0.0]], source: RouteSource::LaneCenter, target_speed }
}

/// Lead vehicle 30 m ahead brakes at 6 m/s^2 to a stop after 1 s.
pub fn lead_brake() -> Scenario {
    let mut s = base("lead_brake", EgoState::cruising(0.0, 0.0, 0.0, 10.0), straight_route(200.0, 10.0), 8.0);
    let mut commands = vec![[0.0, 0.0]; 10];
    commands.extend(vec![[-6.0, 0.0]; 20]);
    s.agents.push(vehicle("lead", 30.0, 0.0, 0.0, 10.0, commands));
    s.landmarks = vec![lane(0.0, -50.0, 250.0), lane(3.5, -50.0, 250.0)];
    s
}

/// A 2 m box blocks the ego lane 35 m ahead.
pub fn static_obstacle() -> Scenario {
    let mut s = base("static_obstacle", EgoState::cruising(0.0, 0.0, 0.0, 8.0), straight_route(200.0, 8.0), 8.0);
    s.static_obstacles.push(vec![[34.0, -1.0], [36.0, -1.0], [36.0, 1.0], [34.0, 1.0]]);
    s.landmarks = vec![lane(0.0, -50.0, 250.0), lane(3.5, -50.0, 250.0)];
    s
}

/// A slower car in the left lane swerves into the ego lane just ahead.
pub fn cut_in() -> Scenario {
    let mut s = base("cut_in", EgoState::cruising(0.0, 0.0, 0.0, 10.0), straight_route(200.0, 10.0), 8.0);
    let mut commands = vec![[0.0, 0.0]; 5];
    commands.extend(vec![[0.0, -0.077]; 10]);
    commands.extend(vec![[0.0, 0.077]; 10]);
    s.agents.push(vehicle("cutter", 14.0, 3.5, 0.0, 8.0, commands));
    s.landmarks = vec![lane(0.0, -50.0, 250.0), lane(3.5, -50.0, 250.0)];
    s
}

/// Right turn of radius 12 m following a recorded commuting trajectory,
/// with no lane landmarks at all.
pub fn right_turn() -> Scenario {
    let r = 12.0;
    let mut points: Vec<Point2> = vec![[-20.0, 0.0]];
    let n = 48;
    for i in 0..=n {
        let th = std::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
        points.push([r * th.sin(), -r * (1.0 - th.cos())]);
    }
    points.push([r, -30.0]);
    let route = Route { points, source: RouteSource::CommutingHistory, target_speed: 6.0 };
    base("right_turn", EgoState::cruising(-15.0, 0.0, 0.0, 6.0), route, 9.5)
}

/// Nothing but a 70 m straight route at 10 m/s.
pub fn empty_road() -> Scenario {
    base("empty_road", EgoState::cruising(0.0, 0.0, 0.0, 10.0), straight_route(70.0, 10.0), 9.5)
}

pub fn builtin_scenario(name: &str) -> Option<Scenario> {
    Some(match name {
        "lead_brake" => lead_brake(),
        "static_obstacle" => static_obstacle(),
        "cut_in" => cut_in(),
        "right_turn" => right_turn(),
        "empty_road" => empty_road(),
        _ => return None,
    })
}

pub fn scenario_suite() -> Vec<Scenario> {
    SCENARIO_NAMES.iter().filter_map(|n| builtin_scenario(n)).collect()
}
