use serde::{Deserialize, Serialize};

use crate::geometry::kinematics::advance_arc;
use crate::geometry::{clothoid_point, curvature_from_steering, ClothoidParams};
use crate::time::{waypoint_time, HORIZON_STEPS};
use crate::types::{CandidateSet, EgoState, Maneuver, Pose, Source, Trajectory, Waypoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurveConfig {
    /// Constant accelerations applied to every shape, m/s^2.
    pub accelerations: Vec<f64>,
    /// Steering angles for the circle family, rad.
    pub steering_angles: Vec<f64>,
    /// Clothoid scales `a`, m.
    pub clothoid_scales: Vec<f64>,
    pub straight: bool,
    pub circle: bool,
    pub clothoid: bool,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            accelerations: vec![-4.0, -2.0, -1.0, 0.0, 1.0],
            steering_angles: vec![-0.2, -0.1, -0.05, -0.02, 0.02, 0.05, 0.1, 0.2],
            clothoid_scales: vec![20.0, 40.0, 80.0, 160.0],
            straight: true,
            circle: true,
            clothoid: true,
        }
    }
}

/// Speed and travelled distance at `t` under constant acceleration `a`,
/// stopping at zero speed instead of reversing.
fn speed_distance(v0: f64, a: f64, t: f64) -> (f64, f64) {
    let v0 = v0.max(0.0);
    if a < 0.0 {
        let t_stop = v0 / -a;
        if t >= t_stop {
            return (0.0, 0.5 * v0 * t_stop);
        }
    }
    ((v0 + a * t).max(0.0), v0 * t + 0.5 * a * t * t)
}

fn build(ego: &EgoState, a: f64, maneuver: Maneuver, pose_at: impl Fn(f64) -> Pose) -> Trajectory {
    let samples = (0..=HORIZON_STEPS)
        .map(|k| {
            if k == 0 {
                return ego.origin_waypoint();
            }
            let t = waypoint_time(k);
            let (v, d) = speed_distance(ego.v, a, t);
            let p = pose_at(d);
            Waypoint { t, x: p.x, y: p.y, heading: p.heading, v }
        })
        .collect();
    Trajectory::from_samples(samples, maneuver, Source::Curve)
}

/// Clothoid continuing from the ego's current curvature. `sign` picks the
/// side (+1 left, -1 right) the curvature grows towards.
fn clothoid_pose(ego: &EgoState, scale: f64, sign: f64) -> impl Fn(f64) -> Pose {
    let params = ClothoidParams { start: [0.0, 0.0], tangent: [1.0, 0.0], normal: [0.0, sign], scale };
    let xi0 = sign * ego.kappa * scale * scale / std::f64::consts::PI;
    let point = move |xi: f64| clothoid_point(&params, xi).expect("valid frame");
    let p0 = point(xi0);
    let h0 = sign * params.turning(xi0);
    let (sin0, cos0) = h0.sin_cos();
    let (sin_e, cos_e) = ego.heading.sin_cos();
    let (ex, ey, eh) = (ego.x, ego.y, ego.heading);
    move |d: f64| {
        let xi = xi0 + d;
        let p = point(xi);
        let (dx, dy) = (p[0] - p0[0], p[1] - p0[1]);
        // into the frame tangent at xi0, then onto the ego pose
        let (lx, ly) = (cos0 * dx + sin0 * dy, -sin0 * dx + cos0 * dy);
        Pose::new(ex + cos_e * lx - sin_e * ly, ey + sin_e * lx + cos_e * ly, eh + sign * params.turning(xi) - h0)
    }
}

/// Straight, constant-curvature and clothoid candidates from the ego pose,
/// each under every configured constant acceleration. An empty sweep yields
/// an empty set with a warning.
pub fn curve_sampler(ego: &EgoState, config: &CurveConfig) -> CandidateSet {
    let mut set = CandidateSet::new();
    let pose = ego.pose();
    for &a in &config.accelerations {
        if config.straight {
            set.push(build(ego, a, Maneuver::LaneKeep, |d| advance_arc(pose, d, 0.0)));
        }
        if config.circle {
            for &phi in &config.steering_angles {
                let Ok(kappa) = curvature_from_steering(phi, ego.wheelbase) else { continue };
                set.push(build(ego, a, Maneuver::Turn, |d| advance_arc(pose, d, kappa)));
            }
        }
        if config.clothoid {
            for &scale in config.clothoid_scales.iter().filter(|s| **s > 0.0) {
                for sign in [1.0, -1.0] {
                    set.push(build(ego, a, Maneuver::Turn, clothoid_pose(ego, scale, sign)));
                }
            }
        }
    }
    if set.is_empty() {
        set.warning = Some("curve sampler sweep is empty".into());
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::steering_from_curvature;

    fn only(accel: f64) -> CurveConfig {
        CurveConfig {
            accelerations: vec![accel],
            steering_angles: vec![],
            clothoid_scales: vec![],
            straight: true,
            circle: false,
            clothoid: false,
        }
    }

    #[test]
    fn straight_constant_speed() {
        let ego = EgoState::cruising(0.0, 0.0, 0.0, 10.0);
        let set = curve_sampler(&ego, &only(0.0));
        assert_eq!(set.len(), 1);
        for (k, w) in set.candidates[0].waypoints.iter().enumerate() {
            assert!((w.x - (k + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn braking_stops_without_reversing() {
        let ego = EgoState::cruising(0.0, 0.0, 0.0, 4.0);
        let t = &curve_sampler(&ego, &only(-4.0)).candidates[0];
        assert!((t.last().x - 2.0).abs() < 1e-9);
        assert_eq!(t.last().v, 0.0);
    }

    #[test]
    fn circle_heading_change() {
        let ego = EgoState::cruising(3.0, -1.0, 0.4, 10.0);
        let phi = steering_from_curvature(0.05, ego.wheelbase);
        let cfg = CurveConfig { steering_angles: vec![phi], circle: true, straight: false, ..only(0.0) };
        let t = &curve_sampler(&ego, &cfg).candidates[0];
        assert!((t.last().heading - 0.4 - 1.5).abs() < 1e-6);
    }

    #[test]
    fn clothoid_continues_ego_curvature() {
        let mut ego = EgoState::cruising(0.0, 0.0, 1.0, 8.0);
        ego.kappa = 0.02;
        let cfg = CurveConfig { clothoid_scales: vec![40.0], clothoid: true, straight: false, ..only(0.0) };
        let set = curve_sampler(&ego, &cfg);
        assert_eq!(set.len(), 2);
        for t in &set.candidates {
            let w = &t.waypoints[0];
            // first step follows the initial curvature closely
            let expected = advance_arc(ego.pose(), 0.8, 0.02);
            assert!((w.x - expected.x).hypot(w.y - expected.y) < 1e-3);
        }
    }

    #[test]
    fn empty_sweep_warns() {
        let ego = EgoState::cruising(0.0, 0.0, 0.0, 10.0);
        let cfg = CurveConfig { accelerations: vec![], ..Default::default() };
        let set = curve_sampler(&ego, &cfg);
        assert!(set.is_empty() && set.warning.is_some());
    }
}
