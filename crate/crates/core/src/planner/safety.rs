use serde::{Deserialize, Serialize};

use super::imitation::mean_distance;
use super::select::{PlannerDecision, SafetyVerdict};
use crate::geometry::shapes::convex_overlap;
use crate::geometry::{wrap_angle, OrientedBox};
use crate::raster::{CellLabel, OccupancyGrid};
use crate::samplers::KinematicLimits;
use crate::time::{waypoint_time, HORIZON_STEPS};
use crate::types::{EgoState, Maneuver, Source, Trajectory, VehicleSize, Waypoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SafetyConfig {
    /// Validated candidates kept before the consistency choice.
    pub reserve: usize,
    /// Cost per meter of mean deviation from the previous plan.
    pub lambda: f64,
    /// Ego box growth at each end for agent checks, m.
    pub longitudinal_margin: f64,
    /// Ego box growth on each side for agent checks, m.
    pub lateral_margin: f64,
    pub limits: KinematicLimits,
    /// Deceleration of the fallback plan, m/s^2.
    pub fallback_decel: f64,
}

impl Default for SafetyConfig {
    fn default() -> Self {
        Self {
            reserve: 3,
            lambda: 0.1,
            longitudinal_margin: 0.5,
            lateral_margin: 0.3,
            limits: KinematicLimits::default(),
            fallback_decel: 3.0,
        }
    }
}

/// A forecast agent: future track plus footprint.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentFootprint {
    pub trajectory: Trajectory,
    pub length: f64,
    pub width: f64,
}

/// Ego boxes swept from the origin through every waypoint, spaced no more
/// than half a cell apart, paired with the 1-based step they lead up to.
fn swept_boxes(traj: &Trajectory, size: VehicleSize, spacing: f64) -> Vec<(usize, OrientedBox)> {
    let pts: Vec<&Waypoint> = traj.points().collect();
    let mut out = Vec::new();
    for k in 1..pts.len() {
        let (a, b) = (pts[k - 1], pts[k]);
        let d = (b.x - a.x).hypot(b.y - a.y);
        let n = ((d / spacing).ceil() as usize).max(1);
        let dh = wrap_angle(b.heading - a.heading);
        let first = if k == 1 { 0 } else { 1 };
        for j in first..=n {
            let u = j as f64 / n as f64;
            let c = [a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)];
            out.push((k, OrientedBox::new(c, a.heading + u * dh, size.length, size.width)));
        }
    }
    out
}

/// First waypoint step at which the swept ego box touches a static cell.
/// A cell counts when its square overlaps the box, which is never looser
/// than testing cell centers.
pub fn static_collision_step(traj: &Trajectory, size: VehicleSize, occ: &OccupancyGrid) -> Option<usize> {
    let geom = occ.geometry;
    let half = 0.5 * geom.resolution;
    for (step, b) in swept_boxes(traj, size, half) {
        let corners = b.corners();
        let (lo, hi) = b.bounds();
        let Some(((r0, r1), (c0, c1))) = geom.cell_range([lo[0] - half, lo[1] - half], [hi[0] + half, hi[1] + half])
        else {
            continue;
        };
        for r in r0..=r1 {
            for c in c0..=c1 {
                if occ.label(r, c) != CellLabel::Static {
                    continue;
                }
                let [x, y] = geom.cell_center(r, c);
                let cell = [[x - half, y - half], [x + half, y - half], [x + half, y + half], [x - half, y + half]];
                if convex_overlap(&cell, &corners) {
                    return Some(step);
                }
            }
        }
    }
    None
}

/// First `(agent, step)` at which the inflated ego box overlaps an agent
/// box at the same timestep.
pub fn dynamic_collision(
    traj: &Trajectory,
    size: VehicleSize,
    agents: &[AgentFootprint],
    config: &SafetyConfig,
) -> Option<(usize, usize)> {
    for (k, w) in traj.waypoints.iter().enumerate() {
        let ego = OrientedBox::new(w.xy(), w.heading, size.length, size.width)
            .inflated(config.longitudinal_margin, config.lateral_margin);
        for (i, a) in agents.iter().enumerate() {
            if let Some(p) = a.trajectory.waypoints.get(k) {
                if ego.overlaps(&OrientedBox::new(p.xy(), p.heading, a.length, a.width)) {
                    return Some((i, k + 1));
                }
            }
        }
    }
    None
}

pub fn check_candidate(
    traj: &Trajectory,
    size: VehicleSize,
    occ: &OccupancyGrid,
    agents: &[AgentFootprint],
    config: &SafetyConfig,
) -> SafetyVerdict {
    if let Some(step) = static_collision_step(traj, size, occ) {
        return SafetyVerdict::StaticCollision { step };
    }
    if let Some((agent, step)) = dynamic_collision(traj, size, agents, config) {
        return SafetyVerdict::DynamicCollision { agent, step };
    }
    if !config.limits.admits(traj) {
        return SafetyVerdict::Kinematic;
    }
    SafetyVerdict::Passed
}

/// Mean distance between `traj` and the previous plan advanced by one
/// step: waypoint `k` is compared with the previous plan's waypoint `k+1`.
pub fn plan_deviation(traj: &Trajectory, previous: &Trajectory) -> f64 {
    let shifted = Trajectory { waypoints: previous.waypoints[1.min(previous.waypoints.len())..].to_vec(), ..previous.clone() };
    mean_distance(traj, &shifted)
}

/// Straight-line braking along the current heading at `decel` until stop.
pub fn fallback_trajectory(ego: &EgoState, decel: f64) -> Trajectory {
    let v0 = ego.v.max(0.0);
    let t_stop = v0 / decel.max(1e-6);
    let (sin, cos) = ego.heading.sin_cos();
    let samples = (0..=HORIZON_STEPS)
        .map(|k| {
            if k == 0 {
                return ego.origin_waypoint();
            }
            let t = waypoint_time(k).min(t_stop);
            let s = v0 * t - 0.5 * decel * t * t;
            let v = (v0 - decel * waypoint_time(k)).max(0.0);
            Waypoint { t: waypoint_time(k), x: ego.x + s * cos, y: ego.y + s * sin, heading: ego.heading, v }
        })
        .collect();
    Trajectory::from_samples(samples, Maneuver::Stop, Source::Curve)
}

/// Walks the ranked candidates in cost order and checks each for static
/// overlap, agent overlap and kinematic limits until `reserve` have passed.
/// Among those the plan minimizing `cost + lambda * deviation` from the
/// previous plan is chosen. When nothing passes the result is a braking
/// fallback with the flag set.
pub fn safety_layer(
    mut decision: PlannerDecision,
    ego: &EgoState,
    size: VehicleSize,
    occ: &OccupancyGrid,
    agents: &[AgentFootprint],
    previous: Option<&Trajectory>,
    config: &SafetyConfig,
) -> PlannerDecision {
    let mut passed = Vec::new();
    for (rank, cand) in decision.ranked.iter_mut().enumerate() {
        if passed.len() >= config.reserve.max(1) {
            break;
        }
        cand.verdict = check_candidate(&cand.trajectory, size, occ, agents, config);
        if cand.verdict == SafetyVerdict::Passed {
            passed.push(rank);
        }
    }
    let score = |rank: usize| {
        let c = &decision.ranked[rank];
        let dev = previous.map_or(0.0, |p| plan_deviation(&c.trajectory, p));
        (c.cost.total + config.lambda * dev, dev)
    };
    let best = passed.iter().map(|&r| (r, score(r))).min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)));
    match best {
        Some((rank, (_, dev))) => {
            decision.chosen = decision.ranked[rank].trajectory.clone();
            decision.chosen_rank = Some(rank);
            decision.fallback = false;
            decision.consistency = previous.map(|_| dev);
        }
        None => {
            decision.chosen = fallback_trajectory(ego, config.fallback_decel);
            decision.chosen_rank = None;
            decision.fallback = true;
            decision.consistency = previous.map(|p| plan_deviation(&decision.chosen, p));
        }
    }
    decision
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::CostModel;
    use crate::planner::select_best;
    use crate::testutil::{context, frame, line, rect};
    use crate::types::{CandidateSet, Frame};

    fn decide(f: &Frame, set: Vec<Trajectory>, previous: Option<&Trajectory>, cfg: &SafetyConfig) -> PlannerDecision {
        let ctx = context(f);
        let pre = select_best(&CandidateSet::from_trajectories(set), &CostModel::default(), &ctx.planes).unwrap();
        safety_layer(pre, &f.ego, f.ego_size, &ctx.occupancy, &ctx.footprints, previous, cfg)
    }

    #[test]
    fn free_candidates_keep_the_pre_safety_choice() {
        let f = frame(5.0);
        let ctx = context(&f);
        let set: Vec<Trajectory> = (0..5).map(|i| line(0.0, 0.0, 0.01 * i as f64, 5.0, Source::Lattice)).collect();
        let pre = select_best(&CandidateSet::from_trajectories(set.clone()), &CostModel::default(), &ctx.planes).unwrap();
        let post = decide(&f, set, None, &SafetyConfig { lambda: 0.0, ..SafetyConfig::default() });
        assert_eq!(post.chosen, pre.chosen);
        assert!(!post.fallback);
        assert_eq!(post.ranked[0].verdict, SafetyVerdict::Passed);
    }

    #[test]
    fn colliding_best_gives_way_to_the_next() {
        let mut f = frame(5.0);
        // a thin post the cost field barely sees but the box check does
        f.static_obstacles.push(rect(10.0, -0.1, 10.2, 0.1));
        let mut model_view = decide(&f, vec![line(0.0, 0.0, 0.0, 5.0, Source::Lattice)], None, &SafetyConfig::default());
        assert!(model_view.fallback);
        let straight = line(0.0, 0.0, 0.0, 5.0, Source::Lattice);
        let swerve = line(0.0, 0.0, 0.12, 5.0, Source::Lattice);
        model_view = decide(&f, vec![straight, swerve.clone()], None, &SafetyConfig::default());
        assert!(!model_view.fallback);
        assert_eq!(model_view.chosen, swerve);
        let blocked = model_view.ranked.iter().find(|r| r.trajectory.waypoints[29].y.abs() < 1e-9).unwrap();
        assert!(matches!(blocked.verdict, SafetyVerdict::StaticCollision { .. }));
    }

    #[test]
    fn exhaustion_falls_back_to_braking() {
        let mut f = frame(6.0);
        f.static_obstacles.push(rect(3.0, -10.0, 4.0, 10.0));
        let set: Vec<Trajectory> = (0..4).map(|i| line(0.0, 0.0, 0.05 * i as f64, 6.0, Source::Lattice)).collect();
        let d = decide(&f, set, None, &SafetyConfig::default());
        assert!(d.fallback);
        assert!(d.chosen_rank.is_none());
        assert_eq!(d.chosen.maneuver, Maneuver::Stop);
        let last = d.chosen.last();
        assert!((last.x - 6.0).abs() < 1e-9 && last.v == 0.0 && last.y == 0.0);
        assert!(d.chosen.is_valid());
    }

    #[test]
    fn consistency_prefers_the_previous_plan() {
        let f = frame(5.0);
        let a = line(0.0, 0.0, 0.0, 5.0, Source::Lattice);
        let b = line(0.0, 0.0, 0.03, 5.0, Source::Lattice);
        let previous = line(-0.5 * 0.03f64.cos(), -0.5 * 0.03f64.sin(), 0.03, 5.0, Source::Lattice);
        let base = decide(&f, vec![a.clone(), b.clone()], None, &SafetyConfig::default());
        assert_eq!(base.chosen, a);
        let sticky = decide(&f, vec![a, b.clone()], Some(&previous), &SafetyConfig { lambda: 100.0, ..SafetyConfig::default() });
        assert_eq!(sticky.chosen, b);
        assert!(sticky.consistency.unwrap() < 1e-9);
    }

    #[test]
    fn agents_are_checked_at_matching_steps() {
        let f = frame(5.0);
        let ego = line(0.0, 0.0, 0.0, 5.0, Source::Lattice);
        let oncoming = AgentFootprint { trajectory: line(30.0, 0.0, std::f64::consts::PI, 5.0, Source::Human), length: 4.5, width: 1.8 };
        let hit = dynamic_collision(&ego, f.ego_size, &[oncoming], &SafetyConfig::default());
        assert!(matches!(hit, Some((0, k)) if k > 20));
        let beside = AgentFootprint { trajectory: line(0.0, 3.5, 0.0, 5.0, Source::Human), length: 4.5, width: 1.8 };
        assert!(dynamic_collision(&ego, f.ego_size, &[beside], &SafetyConfig::default()).is_none());
    }

    #[test]
    fn deviation_compares_against_the_shifted_plan() {
        let previous = line(-0.5, 0.0, 0.0, 5.0, Source::Lattice);
        let current = line(0.0, 0.0, 0.0, 5.0, Source::Lattice);
        assert!(plan_deviation(&current, &previous) < 1e-12);
    }
}
