use serde::{Deserialize, Serialize};

use crate::geometry::{OrientedBox, ReferenceLine};
use crate::time::{waypoint_time, HORIZON_STEPS};
use crate::types::{Trajectory, VehicleSize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StConfig {
    /// Lateral clearance added to the ego half-width when deciding whether
    /// an agent occupies the corridor, m.
    pub lateral_margin: f64,
    /// Headway buffer in seconds of ego speed added to both band edges.
    pub headway: f64,
}

impl Default for StConfig {
    fn default() -> Self {
        Self { lateral_margin: 0.3, headway: 0.5 }
    }
}

/// Station interval an agent blocks at each step `k = 0..=30`.
#[derive(Debug, Clone, PartialEq)]
pub struct StObstacle {
    /// Index into the forecast list.
    pub agent: usize,
    pub bands: Vec<Option<(f64, f64)>>,
}

impl StObstacle {
    pub fn first_present(&self) -> Option<usize> {
        self.bands.iter().position(Option::is_some)
    }

    pub fn last_present(&self) -> Option<usize> {
        self.bands.iter().rposition(Option::is_some)
    }

    /// Rate of the lower band edge between its first and last appearance.
    pub fn speed(&self) -> f64 {
        match (self.first_present(), self.last_present()) {
            (Some(a), Some(b)) if b > a => {
                let lo = |k: usize| self.bands[k].expect("present").0;
                (lo(b) - lo(a)) / (waypoint_time(b) - waypoint_time(a))
            }
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StLabel {
    /// The agent is not in the corridor at this step.
    Free,
    /// Behind the band.
    Follow,
    /// Ahead of the band.
    Overtake,
    Occupied,
}

/// Station-time occupancy of the reference corridor over the horizon.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StGraph {
    pub obstacles: Vec<StObstacle>,
}

impl StGraph {
    pub fn label(&self, obstacle: usize, s: f64, k: usize) -> StLabel {
        match self.obstacles[obstacle].bands.get(k).copied().flatten() {
            None => StLabel::Free,
            Some((lo, _)) if s < lo => StLabel::Follow,
            Some((_, hi)) if s > hi => StLabel::Overtake,
            Some(_) => StLabel::Occupied,
        }
    }

    /// Whether station `s` at step `k` lies outside every band.
    pub fn is_free(&self, s: f64, k: usize) -> bool {
        (0..self.obstacles.len()).all(|o| self.label(o, s, k) != StLabel::Occupied)
    }
}

/// Projects every forecast box onto the reference line. An agent occupies
/// the corridor at a step when its lateral extent reaches within the ego
/// half-width plus margin; its station extent is then widened by the ego
/// half-length plus a headway buffer at the current ego speed.
/// `sizes[i]` is `(length, width)` of agent `i`.
pub fn build_st_graph(
    reference: &ReferenceLine,
    forecasts: &[Trajectory],
    sizes: &[(f64, f64)],
    ego_size: VehicleSize,
    ego_speed: f64,
    config: &StConfig,
) -> StGraph {
    let half_width = 0.5 * ego_size.width + config.lateral_margin;
    let pad = 0.5 * ego_size.length + config.headway * ego_speed.max(0.0);
    let mut obstacles = Vec::new();
    for (i, (traj, &(length, width))) in forecasts.iter().zip(sizes).enumerate() {
        let bands: Vec<Option<(f64, f64)>> = traj
            .points()
            .take(HORIZON_STEPS + 1)
            .map(|w| {
                let corners = OrientedBox::new(w.xy(), w.heading, length, width).corners();
                let (mut s_lo, mut s_hi, mut l_lo, mut l_hi) =
                    (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
                for c in corners.iter().chain(std::iter::once(&w.xy())) {
                    let (s, l, _) = reference.project(*c);
                    s_lo = s_lo.min(s);
                    s_hi = s_hi.max(s);
                    l_lo = l_lo.min(l);
                    l_hi = l_hi.max(l);
                }
                (l_hi >= -half_width && l_lo <= half_width).then_some((s_lo - pad, s_hi + pad))
            })
            .collect();
        if bands.iter().any(Option::is_some) {
            obstacles.push(StObstacle { agent: i, bands });
        }
    }
    StGraph { obstacles }
}
