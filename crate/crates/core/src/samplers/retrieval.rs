use serde::{Deserialize, Serialize};

use super::expert_db::ExpertTrajectoryDb;
use crate::geometry::{from_fixed_oriented, to_fixed_oriented};
use crate::types::{CandidateSet, EgoState, Source, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalConfig {
    /// Weights of `|dv|`, `|da|`, `|dkappa|`.
    pub beta: [f64; 3],
    /// Entries with weighted distance strictly below this are returned.
    pub threshold: f64,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self { beta: [1.0, 5.0, 40.0], threshold: 1.0 }
    }
}

/// Moves a recorded trajectory rigidly so its origin coincides with the
/// ego pose.
pub fn reanchor(traj: &Trajectory, ego: &EgoState) -> Trajectory {
    let o = &traj.origin;
    let local = to_fixed_oriented(traj, &EgoState::cruising(o.x, o.y, o.heading, o.v));
    let mut out = from_fixed_oriented(&local, ego);
    out.origin = ego.origin_waypoint();
    out.source = Source::Retrieval;
    out
}

/// Every stored trajectory whose initial state lies within the weighted
/// distance of the ego state, re-anchored at the ego, in storage order.
pub fn retrieval_sampler(ego: &EgoState, db: &ExpertTrajectoryDb, config: &RetrievalConfig) -> CandidateSet {
    let query = [ego.v, ego.a, ego.kappa];
    let hits = db.tree().within(&query, &config.beta, config.threshold);
    CandidateSet::from_trajectories(hits.into_iter().map(|i| reanchor(&db.entries[i].trajectory, ego)).collect())
}
