use serde::{Deserialize, Serialize};

use super::runner::{run_closed_loop, SimConfig};
use crate::error::Result;
use crate::planner::{Planner, SamplerToggles};
use crate::types::Scenario;

/// Metrics of one sampler combination summed or averaged over scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub combo: String,
    pub scenarios: usize,
    pub collisions: usize,
    pub deviations: usize,
    pub lost_control: usize,
    pub discomfort: usize,
    pub fallbacks: usize,
    pub completed: usize,
    /// Means over scenarios.
    pub mean_lat_accel: f64,
    pub mean_jerk: f64,
    pub mean_steer_change: f64,
    /// Maxima over scenarios.
    pub max_lat_accel: f64,
    pub max_jerk: f64,
    pub distance: f64,
    pub interventions_per_km: Option<f64>,
}

/// Runs every combination over every scenario. Scenarios are processed in
/// name order, so rows do not depend on the order they were given in.
pub fn compare_samplers(
    scenarios: &[Scenario],
    combos: &[SamplerToggles],
    planner: &Planner,
    config: &SimConfig,
) -> Result<Vec<ComparisonRow>> {
    let mut ordered: Vec<&Scenario> = scenarios.iter().collect();
    ordered.sort_by(|a, b| a.name.cmp(&b.name));
    let mut rows = Vec::with_capacity(combos.len());
    for combo in combos {
        let mut p = planner.clone();
        p.config.samplers = *combo;
        let runs = ordered.iter().map(|s| run_closed_loop(s, &p, config)).collect::<Result<Vec<_>>>()?;
        let n = runs.len().max(1) as f64;
        let sum = |f: &dyn Fn(&super::ClosedLoopMetrics) -> f64| runs.iter().map(|r| f(&r.metrics)).sum::<f64>();
        let max = |f: &dyn Fn(&super::ClosedLoopMetrics) -> f64| runs.iter().map(|r| f(&r.metrics)).fold(0.0, f64::max);
        let count = |f: &dyn Fn(&super::ClosedLoopMetrics) -> usize| runs.iter().map(|r| f(&r.metrics)).sum::<usize>();
        let collisions = count(&|m| m.collisions);
        let fallbacks = count(&|m| m.fallbacks);
        let distance = sum(&|m| m.distance);
        rows.push(ComparisonRow {
            combo: combo.label(),
            scenarios: runs.len(),
            collisions,
            deviations: count(&|m| m.deviations),
            lost_control: count(&|m| m.lost_control),
            discomfort: count(&|m| m.discomfort),
            fallbacks,
            completed: count(&|m| m.completed as usize),
            mean_lat_accel: sum(&|m| m.mean_lat_accel) / n,
            mean_jerk: sum(&|m| m.mean_jerk) / n,
            mean_steer_change: sum(&|m| m.mean_steer_change) / n,
            max_lat_accel: max(&|m| m.max_lat_accel),
            max_jerk: max(&|m| m.max_jerk),
            distance,
            interventions_per_km: (distance > 0.0).then(|| (collisions + fallbacks) as f64 / (distance / 1000.0)),
        });
    }
    Ok(rows)
}
