use super::{accumulate_lane_prior, ground_truth_grid, LanePrior, PredictionGrid};
use crate::error::{invalid, Result};
use crate::geometry::{wrap_angle, ReferenceLine};
use crate::raster::GridGeometry;
use crate::time::{waypoint_time, HORIZON, HORIZON_STEPS};
use crate::types::{AgentTrack, Landmark, Maneuver, Source, Trajectory, Waypoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastConfig {
    /// Half-width of a lane corridor in meters.
    pub lane_half_width: f64,
    /// Lanes kept from the accumulated prior.
    pub top_k: usize,
    /// Largest heading difference to a lane for an agent to follow it.
    pub max_heading_diff: f64,
    pub lane_following: bool,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self { lane_half_width: 1.75, top_k: 2, max_heading_diff: std::f64::consts::FRAC_PI_4, lane_following: true }
    }
}

/// Agent forecasts together with their rasterized grid and the lane prior
/// that shaped them.
#[derive(Debug, Clone)]
pub struct Forecast {
    pub trajectories: Vec<Trajectory>,
    pub grid: PredictionGrid,
    pub lane_prior: LanePrior,
}

/// Straight-line motion at the current speed and heading.
pub fn constant_velocity_forecast(agent: &AgentTrack) -> Option<Trajectory> {
    let cur = agent.current()?;
    let v = agent.speed().unwrap_or(0.0).max(0.0);
    let (sin, cos) = cur.heading.sin_cos();
    let samples = (0..=HORIZON_STEPS)
        .map(|k| {
            let t = waypoint_time(k);
            Waypoint { t, x: cur.x + v * cos * t, y: cur.y + v * sin * t, heading: cur.heading, v }
        })
        .collect();
    Some(Trajectory::from_samples(samples, Maneuver::LaneKeep, Source::Human))
}

fn lane_forecast(agent: &AgentTrack, lane: &ReferenceLine, v: f64) -> Trajectory {
    let cur = agent.current().expect("agent has a current state");
    let (s0, l0, _) = lane.project([cur.x, cur.y]);
    let samples = (0..=HORIZON_STEPS)
        .map(|k| {
            let t = waypoint_time(k);
            if k == 0 {
                return Waypoint { t, x: cur.x, y: cur.y, heading: cur.heading, v };
            }
            let s = s0 + v * t;
            // the initial offset fades out over the horizon
            let l = l0 * (1.0 - t / HORIZON);
            let p = lane.point_at(s);
            let tan = lane.tangent_at(s);
            Waypoint { t, x: p[0] - l * tan[1], y: p[1] + l * tan[0], heading: lane.heading_at(s), v }
        })
        .collect();
    Trajectory::from_samples(samples, Maneuver::LaneKeep, Source::Human)
}

/// Two-pass forecast. Constant-velocity futures are rasterized, the lane
/// prior is accumulated from that grid, and every agent inside the corridor
/// of a selected lane and roughly aligned with it is re-forecast along the
/// lane centerline at its current speed. Agents without a current state are
/// skipped. The returned grid covers the final forecasts.
///
/// Fails when an agent's speed is unobservable: fewer than two history
/// states and no reported speed.
pub fn forecast_agents(
    agents: &[AgentTrack],
    landmarks: &[Landmark],
    geometry: GridGeometry,
    config: &ForecastConfig,
) -> Result<Forecast> {
    if let Some(a) = agents.iter().find(|a| a.current().is_some() && a.speed().is_none()) {
        return Err(invalid(format!("agent '{}' needs two history states or an explicit speed", a.id)));
    }
    let present: Vec<&AgentTrack> = agents.iter().filter(|a| a.current().is_some()).collect();
    let sizes: Vec<(f64, f64)> = present.iter().map(|a| (a.length, a.width)).collect();
    let mut trajectories: Vec<Trajectory> =
        present.iter().filter_map(|a| constant_velocity_forecast(a)).collect();
    let cv_grid = ground_truth_grid(&trajectories, &sizes, geometry);
    let lane_prior = accumulate_lane_prior(&cv_grid, landmarks, config.lane_half_width, config.top_k);
    if !config.lane_following || lane_prior.selected.is_empty() {
        return Ok(Forecast { trajectories, grid: cv_grid, lane_prior });
    }
    let horizon_reach = |v: f64| v * HORIZON + 10.0;
    let lanes: Vec<ReferenceLine> = lane_prior
        .selected
        .iter()
        .filter_map(|&i| ReferenceLine::new(landmarks[i].points.clone()).ok())
        .collect();
    for (traj, agent) in trajectories.iter_mut().zip(&present) {
        let cur = agent.current().expect("filtered");
        let v = agent.speed().unwrap_or(0.0).max(0.0);
        let best = lanes
            .iter()
            .filter_map(|lane| {
                let (s, l, _) = lane.project([cur.x, cur.y]);
                let dh = wrap_angle(cur.heading - lane.heading_at(s)).abs();
                (l.abs() <= config.lane_half_width && dh <= config.max_heading_diff).then_some((l.abs(), lane))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((_, lane)) = best {
            *traj = lane_forecast(agent, &lane.extended(horizon_reach(v)), v);
        }
    }
    let grid = ground_truth_grid(&trajectories, &sizes, geometry);
    Ok(Forecast { trajectories, grid, lane_prior })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{AgentClass, AgentState, LandmarkKind};

    fn agent(x: f64, y: f64, heading: f64, v: f64) -> AgentTrack {
        AgentTrack {
            id: "a".into(),
            class: AgentClass::Vehicle,
            length: 4.5,
            width: 1.8,
            history: vec![AgentState { t: 0.0, x, y, heading, v: Some(v) }],
        }
    }

    #[test]
    fn constant_velocity_is_straight() {
        let f = constant_velocity_forecast(&agent(1.0, 2.0, 0.0, 5.0)).unwrap();
        assert_eq!(f.waypoints.len(), HORIZON_STEPS);
        assert!((f.last().x - 16.0).abs() < 1e-9);
        assert!((f.last().y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unobservable_speed_is_an_error() {
        let mut a = agent(0.0, 0.0, 0.0, 1.0);
        a.history[0].v = None;
        let geo = GridGeometry::new([-5.0, -5.0], 0.5, 20, 20);
        assert!(forecast_agents(&[a], &[], geo, &ForecastConfig::default()).is_err());
    }

    #[test]
    fn follows_curved_lane() {
        let r = 30.0;
        let pts: Vec<[f64; 2]> = (0..=60)
            .map(|i| {
                let th = i as f64 * std::f64::consts::FRAC_PI_2 / 60.0;
                [r * th.sin(), r - r * th.cos()]
            })
            .collect();
        let lanes = vec![Landmark { kind: LandmarkKind::LaneCenter, points: pts.clone() }];
        let geo = GridGeometry::new([-10.0, -20.0], 0.5, 120, 120);
        let a = agent(0.0, 0.0, 0.0, 6.0);
        let out = forecast_agents(&[a], &lanes, geo, &ForecastConfig::default()).unwrap();
        assert_eq!(out.lane_prior.selected, vec![0]);
        let line = ReferenceLine::new(pts).unwrap();
        for w in &out.trajectories[0].waypoints {
            let (s, l, _) = line.project(w.xy());
            assert!((s - 6.0 * w.t).abs() < 1e-3, "t={} s={s}", w.t);
            assert!(l.abs() < 1e-6);
        }
    }
}
