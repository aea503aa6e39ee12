use serde::{Deserialize, Serialize};

use crate::geometry::wrap_angle;
use crate::time::DT;
use crate::types::{CandidateSet, Trajectory};

/// Segments shorter than this carry no usable heading, so curvature is not
/// estimated across them.
const MIN_SEGMENT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KinematicLimits {
    /// m/s^2
    pub max_accel: f64,
    /// 1/m
    pub max_curvature: f64,
    /// m/s^3
    pub max_jerk: f64,
    /// m/s^2
    pub max_lat_accel: f64,
}

impl Default for KinematicLimits {
    fn default() -> Self {
        Self { max_accel: 6.0, max_curvature: 0.3, max_jerk: 50.0, max_lat_accel: 4.0 }
    }
}

/// Finite-difference profile of a trajectory (origin included).
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicProfile {
    /// Chord speeds of the 30 segments.
    pub speed: Vec<f64>,
    pub accel: Vec<f64>,
    pub jerk: Vec<f64>,
    /// Turning per meter at interior points where both neighboring
    /// segments are long enough.
    pub curvature: Vec<f64>,
    pub lat_accel: Vec<f64>,
}

pub fn kinematic_profile(traj: &Trajectory) -> KinematicProfile {
    let pts: Vec<[f64; 2]> = traj.points().map(|w| w.xy()).collect();
    let seg: Vec<[f64; 2]> = pts.windows(2).map(|w| [w[1][0] - w[0][0], w[1][1] - w[0][1]]).collect();
    let len: Vec<f64> = seg.iter().map(|d| d[0].hypot(d[1])).collect();
    let speed: Vec<f64> = len.iter().map(|l| l / DT).collect();
    let accel: Vec<f64> = speed.windows(2).map(|w| (w[1] - w[0]) / DT).collect();
    let jerk: Vec<f64> = accel.windows(2).map(|w| (w[1] - w[0]) / DT).collect();
    let mut curvature = Vec::new();
    let mut lat_accel = Vec::new();
    for i in 1..seg.len() {
        if len[i - 1] < MIN_SEGMENT || len[i] < MIN_SEGMENT {
            continue;
        }
        let turn = wrap_angle(seg[i][1].atan2(seg[i][0]) - seg[i - 1][1].atan2(seg[i - 1][0]));
        let k = turn / (0.5 * (len[i - 1] + len[i]));
        let v = 0.5 * (speed[i - 1] + speed[i]);
        curvature.push(k);
        lat_accel.push(v * v * k);
    }
    KinematicProfile { speed, accel, jerk, curvature, lat_accel }
}

impl KinematicLimits {
    pub fn admits(&self, traj: &Trajectory) -> bool {
        let p = kinematic_profile(traj);
        let within = |xs: &[f64], lim: f64| xs.iter().all(|x| x.abs() <= lim);
        within(&p.accel, self.max_accel)
            && within(&p.jerk, self.max_jerk)
            && within(&p.curvature, self.max_curvature)
            && within(&p.lat_accel, self.max_lat_accel)
    }
}

/// Drops candidates that violate any limit; survivors keep their order.
pub fn kinematic_filter(mut set: CandidateSet, limits: &KinematicLimits) -> CandidateSet {
    set.retain(|t| limits.admits(t));
    set
}
