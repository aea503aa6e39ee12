use serde::{Deserialize, Serialize};

use super::features::{feature, FeaturePlanes, FEATURE_COUNT};
use super::field::{sample_soft, Field};
use super::volume::CostModel;
use crate::types::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaypointCost {
    pub t: f64,
    pub volume: f64,
    pub occupancy: f64,
    pub prediction: f64,
}

/// Energy of a trajectory split into its three terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total: f64,
    /// Sum of volume samples.
    pub volume_term: f64,
    /// `alpha` times the sum of occupancy samples.
    pub occupancy_term: f64,
    /// `beta` times the sum of prediction samples.
    pub prediction_term: f64,
    pub samples: Vec<WaypointCost>,
    pub out_of_extent: bool,
}

impl CostBreakdown {
    /// Plain-text form: a `key value` summary followed by a per-waypoint
    /// table. Floats use shortest round-trip formatting.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "total {}\nvolume {}\noccupancy {}\nprediction {}\nout_of_extent {}\nt,volume,occupancy,prediction\n",
            self.total, self.volume_term, self.occupancy_term, self.prediction_term, self.out_of_extent
        );
        for s in &self.samples {
            out.push_str(&format!("{},{},{},{}\n", s.t, s.volume, s.occupancy, s.prediction));
        }
        out
    }

    fn from_samples(samples: Vec<WaypointCost>, alpha: f64, beta: f64, out_of_extent: bool) -> Self {
        let volume_term: f64 = samples.iter().map(|s| s.volume).sum();
        let occupancy_term = alpha * samples.iter().map(|s| s.occupancy).sum::<f64>();
        let prediction_term = beta * samples.iter().map(|s| s.prediction).sum::<f64>();
        Self {
            total: volume_term + occupancy_term + prediction_term,
            volume_term,
            occupancy_term,
            prediction_term,
            samples,
            out_of_extent,
        }
    }
}

/// `E(s) = sum_t C(s_t) + alpha O(s_t) + beta G(s_t)` with every term
/// sampled softly at the 30 waypoints.
pub fn trajectory_cost(
    traj: &Trajectory,
    volume: &dyn Field,
    occupancy: &dyn Field,
    grid: &dyn Field,
    alpha: f64,
    beta: f64,
) -> CostBreakdown {
    let mut out = false;
    let samples = traj
        .waypoints
        .iter()
        .map(|w| {
            let c = sample_soft(volume, w.x, w.y, w.t);
            let o = sample_soft(occupancy, w.x, w.y, w.t);
            let g = sample_soft(grid, w.x, w.y, w.t);
            out |= c.out_of_extent || o.out_of_extent || g.out_of_extent;
            WaypointCost { t: w.t, volume: c.value, occupancy: o.value, prediction: g.value }
        })
        .collect();
    CostBreakdown::from_samples(samples, alpha, beta, out)
}

/// [`trajectory_cost`] of the model's volume, computed from one feature
/// sample per waypoint.
pub fn evaluate(model: &CostModel, planes: &FeaturePlanes, traj: &Trajectory) -> CostBreakdown {
    let mut out = false;
    let samples = traj
        .waypoints
        .iter()
        .map(|w| {
            let f = planes.sample(w.x, w.y, w.t);
            out |= f.out_of_extent;
            WaypointCost {
                t: w.t,
                volume: model.weights.iter().zip(&f.values).map(|(a, b)| a * b).sum(),
                occupancy: f.values[feature::OCCUPANCY],
                prediction: f.values[feature::PREDICTION],
            }
        })
        .collect();
    CostBreakdown::from_samples(samples, model.alpha, model.beta, out)
}

/// Energy and its gradient with respect to each waypoint position.
pub fn energy_with_gradient(model: &CostModel, planes: &FeaturePlanes, traj: &Trajectory) -> (f64, Vec<[f64; 2]>) {
    let mut energy = 0.0;
    let mut grads = Vec::with_capacity(traj.waypoints.len());
    let mut coef = model.weights;
    coef[feature::OCCUPANCY] += model.alpha;
    coef[feature::PREDICTION] += model.beta;
    for w in &traj.waypoints {
        let f = planes.sample(w.x, w.y, w.t);
        let mut g = [0.0; 2];
        for i in 0..FEATURE_COUNT {
            energy += coef[i] * f.values[i];
            g[0] += coef[i] * f.grads[i][0];
            g[1] += coef[i] * f.grads[i][1];
        }
        grads.push(g);
    }
    (energy, grads)
}

/// Sum of per-waypoint Euclidean distances.
pub fn l2_sum(a: &Trajectory, b: &Trajectory) -> f64 {
    a.waypoints.iter().zip(&b.waypoints).map(|(p, q)| (p.x - q.x).hypot(p.y - q.y)).sum()
}

/// `Diff = sum |gt_t - cand_t| + sum O(cand_t) + sum G(cand_t)`.
pub fn diff_metric(gt: &Trajectory, cand: &Trajectory, occupancy: &dyn Field, grid: &dyn Field) -> f64 {
    let along: f64 = cand
        .waypoints
        .iter()
        .map(|w| sample_soft(occupancy, w.x, w.y, w.t).value + sample_soft(grid, w.x, w.y, w.t).value)
        .sum();
    l2_sum(gt, cand) + along
}
