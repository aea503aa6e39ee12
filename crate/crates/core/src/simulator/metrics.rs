use serde::{Deserialize, Serialize};

use super::state::{EventConfig, EventKind};
use crate::geometry::wrap_angle;
use crate::time::DT;

/// One simulator tick as written to a trace file. Row 0 is the initial
/// state; row `k` is the state after step `k` together with the decision
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub v: f64,
    pub a: f64,
    pub phi: f64,
    /// Route station and signed lateral offset of the ego.
    pub station: f64,
    pub lateral: f64,
    /// Chosen plan's source tag, `fallback`, or empty on row 0.
    pub source: String,
    pub maneuver: String,
    /// Index of the chosen plan in the frame's candidate set.
    pub chosen: Option<usize>,
    pub cost: Option<f64>,
    pub candidates: usize,
    pub fallback: bool,
    pub events: Vec<EventKind>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClosedLoopMetrics {
    pub mean_lat_accel: f64,
    pub max_lat_accel: f64,
    pub mean_jerk: f64,
    pub max_jerk: f64,
    /// Mean absolute steering change per step, rad.
    pub mean_steer_change: f64,
    pub collisions: usize,
    pub deviations: usize,
    pub lost_control: usize,
    pub discomfort: usize,
    pub fallbacks: usize,
    pub completion_time: f64,
    pub completed: bool,
    pub distance: f64,
    /// Collisions plus fallbacks per driven kilometer; `None` before any
    /// distance is driven.
    pub interventions_per_km: Option<f64>,
    pub steps: usize,
}

/// Finite-difference motion of an executed trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutedProfile {
    /// Chord speed of each step.
    pub speed: Vec<f64>,
    /// `speed * heading rate` per step.
    pub lat_accel: Vec<f64>,
    pub jerk: Vec<f64>,
}

pub fn executed_profile(rows: &[TraceRow]) -> ExecutedProfile {
    let speed: Vec<f64> = rows.windows(2).map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y) / DT).collect();
    let lat_accel: Vec<f64> = rows
        .windows(2)
        .zip(&speed)
        .map(|(w, v)| v * wrap_angle(w[1].heading - w[0].heading) / DT)
        .collect();
    let accel: Vec<f64> = speed.windows(2).map(|w| (w[1] - w[0]) / DT).collect();
    let jerk: Vec<f64> = accel.windows(2).map(|w| (w[1] - w[0]) / DT).collect();
    ExecutedProfile { speed, lat_accel, jerk }
}

/// Runs of at least `min_len` consecutive flagged samples.
fn sustained_runs(flags: &[bool], min_len: usize) -> usize {
    let mut count = 0;
    let mut run = 0;
    for &f in flags.iter().chain(std::iter::once(&false)) {
        if f {
            run += 1;
        } else {
            if run >= min_len {
                count += 1;
            }
            run = 0;
        }
    }
    count
}

fn mean_max(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let abs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
    (abs.iter().sum::<f64>() / abs.len() as f64, abs.iter().copied().fold(0.0, f64::max))
}

/// Metrics of an executed trace. Event counts come from the rows; comfort
/// figures and discomfort events from finite differences of the poses.
pub fn metrics_from_trace(rows: &[TraceRow], config: &EventConfig) -> ClosedLoopMetrics {
    let profile = executed_profile(rows);
    let (mean_lat_accel, max_lat_accel) = mean_max(&profile.lat_accel);
    let (mean_jerk, max_jerk) = mean_max(&profile.jerk);
    let steer: Vec<f64> = rows.windows(2).map(|w| w[1].phi - w[0].phi).collect();
    let mean_steer_change = mean_max(&steer).0;
    // jerk sample j spans steps j..j+3; flag it on its middle segment
    let flags: Vec<bool> = (0..profile.lat_accel.len())
        .map(|k| {
            profile.lat_accel[k].abs() > config.discomfort_lat_accel
                || (k >= 1 && profile.jerk.get(k - 1).is_some_and(|j| j.abs() > config.discomfort_jerk))
        })
        .collect();
    let sustain = ((config.discomfort_sustain / DT) - 1e-9).ceil().max(1.0) as usize;
    let discomfort = sustained_runs(&flags, sustain);
    let count = |pred: &dyn Fn(&EventKind) -> bool| rows.iter().flat_map(|r| &r.events).filter(|e| pred(e)).count();
    let collisions = count(&|e| matches!(e, EventKind::Collision(_)));
    let fallbacks = count(&|e| *e == EventKind::Fallback);
    let completed_at = rows.iter().find(|r| r.events.contains(&EventKind::Completed)).map(|r| r.t);
    let distance: f64 = profile.speed.iter().map(|v| v * DT).sum();
    ClosedLoopMetrics {
        mean_lat_accel,
        max_lat_accel,
        mean_jerk,
        max_jerk,
        mean_steer_change,
        collisions,
        deviations: count(&|e| *e == EventKind::Deviation),
        lost_control: count(&|e| *e == EventKind::LostControl),
        discomfort,
        fallbacks,
        completion_time: completed_at.unwrap_or_else(|| rows.last().map_or(0.0, |r| r.t)),
        completed: completed_at.is_some(),
        distance,
        interventions_per_km: (distance > 0.0).then(|| (collisions + fallbacks) as f64 / (distance / 1000.0)),
        steps: rows.len().saturating_sub(1),
    }
}
