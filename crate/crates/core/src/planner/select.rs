use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{evaluate, CostBreakdown, CostModel, FeaturePlanes};
use crate::types::{CandidateSet, Trajectory};

/// Outcome of the safety checks on one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SafetyVerdict {
    /// Not examined because enough candidates had already passed.
    Unchecked,
    Passed,
    /// Ego box overlaps static occupancy at waypoint `step` (1-based).
    StaticCollision { step: usize },
    /// Inflated ego box overlaps forecast agent `agent` at waypoint `step`.
    DynamicCollision { agent: usize, step: usize },
    Kinematic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    /// Position in the candidate set that was ranked.
    pub index: usize,
    pub trajectory: Trajectory,
    pub cost: CostBreakdown,
    pub verdict: SafetyVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerDecision {
    pub chosen: Trajectory,
    /// Index into `ranked` of the chosen candidate; `None` for the fallback.
    pub chosen_rank: Option<usize>,
    /// Candidates by ascending cost.
    pub ranked: Vec<RankedCandidate>,
    pub fallback: bool,
    /// Mean distance of the chosen plan to the previous one, m.
    pub consistency: Option<f64>,
}

impl PlannerDecision {
    pub fn chosen_cost(&self) -> Option<&CostBreakdown> {
        self.chosen_rank.map(|r| &self.ranked[r].cost)
    }
}

/// Orders scored candidates by cost, then source tag, then original index.
pub fn rank(scored: Vec<(usize, Trajectory, CostBreakdown)>) -> Vec<RankedCandidate> {
    let mut ranked: Vec<RankedCandidate> = scored
        .into_iter()
        .map(|(index, trajectory, cost)| RankedCandidate { index, trajectory, cost, verdict: SafetyVerdict::Unchecked })
        .collect();
    ranked.sort_by(|a, b| {
        a.cost
            .total
            .total_cmp(&b.cost.total)
            .then(a.trajectory.source.cmp(&b.trajectory.source))
            .then(a.index.cmp(&b.index))
    });
    ranked
}

/// Ranks every candidate by its energy and picks the cheapest.
pub fn select_best(set: &CandidateSet, model: &CostModel, planes: &FeaturePlanes) -> Result<PlannerDecision> {
    if set.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let scored = set.iter().enumerate().map(|(i, t)| (i, t.clone(), evaluate(model, planes, t))).collect();
    let ranked = rank(scored);
    Ok(PlannerDecision { chosen: ranked[0].trajectory.clone(), chosen_rank: Some(0), ranked, fallback: false, consistency: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{context, frame, line, rect};
    use crate::types::Source;

    #[test]
    fn single_candidate_is_chosen() {
        let ctx = context(&frame(5.0));
        let t = line(0.0, 0.0, 0.0, 5.0, Source::Lattice);
        let d = select_best(&CandidateSet::from_trajectories(vec![t.clone()]), &CostModel::default(), &ctx.planes).unwrap();
        assert_eq!(d.chosen, t);
        assert_eq!(d.chosen_rank, Some(0));
    }

    #[test]
    fn empty_set_is_an_error() {
        let ctx = context(&frame(5.0));
        assert!(matches!(
            select_best(&CandidateSet::new(), &CostModel::default(), &ctx.planes),
            Err(Error::EmptyCandidates)
        ));
    }

    #[test]
    fn free_candidate_beats_occupied_band() {
        let mut f = frame(5.0);
        f.static_obstacles.push(rect(-5.0, 1.5, 30.0, 2.5));
        let ctx = context(&f);
        let blocked = line(0.0, 2.0, 0.0, 5.0, Source::Curve);
        let free = line(0.0, -2.0, 0.0, 5.0, Source::Lattice);
        let set = CandidateSet::from_trajectories(vec![blocked, free.clone()]);
        let d = select_best(&set, &CostModel::default(), &ctx.planes).unwrap();
        assert_eq!(d.chosen, free);
    }

    #[test]
    fn ranking_matches_brute_force_sort() {
        let ctx = context(&frame(5.0));
        let model = CostModel::default();
        let set = CandidateSet::from_trajectories(
            (0..12).map(|i| line(0.0, 0.3 * i as f64 - 1.5, 0.02 * i as f64 - 0.1, 4.0, Source::Lattice)).collect(),
        );
        let d = select_best(&set, &model, &ctx.planes).unwrap();
        let mut oracle: Vec<(f64, usize)> =
            set.iter().enumerate().map(|(i, t)| (evaluate(&model, &ctx.planes, t).total, i)).collect();
        oracle.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let got: Vec<usize> = d.ranked.iter().map(|r| r.index).collect();
        assert_eq!(got, oracle.iter().map(|o| o.1).collect::<Vec<_>>());
    }

    #[test]
    fn ties_follow_source_order() {
        let ctx = context(&frame(5.0));
        let t = line(0.0, 0.0, 0.0, 5.0, Source::Lattice);
        let mut c = t.clone();
        c.source = Source::Curve;
        let d = select_best(&CandidateSet::from_trajectories(vec![t, c]), &CostModel::default(), &ctx.planes).unwrap();
        assert_eq!(d.ranked[0].index, 1);
    }

    #[test]
    fn ranking_is_scale_invariant() {
        let mut f = frame(5.0);
        f.static_obstacles.push(rect(10.0, -0.5, 12.0, 0.5));
        let ctx = context(&f);
        let set = CandidateSet::from_trajectories(
            (0..8).map(|i| line(0.0, 0.4 * i as f64 - 1.6, 0.0, 3.0 + i as f64 * 0.5, Source::Lattice)).collect(),
        );
        let m = CostModel::default();
        let scaled = CostModel { weights: m.weights.map(|w| 3.5 * w), alpha: 3.5 * m.alpha, beta: 3.5 * m.beta };
        let order = |m: &CostModel| -> Vec<usize> {
            select_best(&set, m, &ctx.planes).unwrap().ranked.iter().map(|r| r.index).collect()
        };
        assert_eq!(order(&m), order(&scaled));
    }
}
