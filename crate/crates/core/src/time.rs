//! The shared time base. Every module plans on the same 10 Hz clock with a
//! 1.5 s history window and a 3.0 s planning horizon.

/// Step between consecutive frames, waypoints and simulator ticks.
pub const DT: f64 = 0.1;
/// Number of future waypoints in a trajectory and layers in a prediction grid.
pub const HORIZON_STEPS: usize = 30;
/// Number of past frames kept for agents and the ego.
pub const HISTORY_STEPS: usize = 15;
/// Planning horizon in seconds.
pub const HORIZON: f64 = HORIZON_STEPS as f64 * DT;

/// Time stamp of waypoint `k` (`k = 0` is the trajectory origin).
#[inline]
pub fn waypoint_time(k: usize) -> f64 {
    k as f64 * DT
}

/// Index of the horizon layer nearest to `t` (layer `i` holds `t = 0.1 (i + 1)`).
#[inline]
pub fn layer_for_time(t: f64) -> usize {
    let k = (t / DT).round() as i64;
    (k - 1).clamp(0, HORIZON_STEPS as i64 - 1) as usize
}
