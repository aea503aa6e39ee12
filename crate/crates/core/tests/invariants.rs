//! Property tests over randomly drawn inputs.

use std::f64::consts::PI;
use std::sync::OnceLock;

use mapless_planner::evaluator::{sample_soft, CostModel};
use mapless_planner::geometry::{
    fit_quintic, from_fixed_oriented, frenet_to_cartesian, to_fixed_oriented, wrap_angle, FrenetState, ReferenceLine,
};
use mapless_planner::planner::{multimodal_imitation_loss, select_best, Planner, PlannerConfig, PlanContext};
use mapless_planner::prediction::{focal_loss, PredictionGrid};
use mapless_planner::raster::{history_brightness, CostField, GridGeometry};
use mapless_planner::samplers::{kinematic_filter, KdTree, KinematicLimits};
use mapless_planner::simulator::builtin_scenario;
use mapless_planner::types::{CandidateSet, EgoState, Frame};
use proptest::prelude::*;

fn scene() -> &'static (PlanContext, CandidateSet) {
    static S: OnceLock<(PlanContext, CandidateSet)> = OnceLock::new();
    S.get_or_init(|| {
        let frame = Frame::initial(&builtin_scenario("cut_in").unwrap());
        let planner = Planner::new(PlannerConfig::default(), CostModel::default());
        let ctx = planner.prepare(&frame).unwrap();
        let set = planner.candidates(&frame, &ctx, 0).unwrap();
        (ctx, set)
    })
}

fn costs(model: &CostModel) -> Vec<(usize, f64)> {
    let (ctx, set) = scene();
    select_best(set, model, &ctx.planes).unwrap().ranked.iter().map(|r| (r.index, r.cost.total)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrapped_angles_are_canonical(a in -1e3f64..1e3) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI - 1e-12 && w <= PI + 1e-12);
        let turns = (a - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn frenet_round_trip_on_an_arc(s in 1.0f64..60.0, l in -5.0f64..5.0) {
        let pts: Vec<[f64; 2]> = (0..=240).map(|i| {
            let th = i as f64 * 0.01;
            [25.0 * th.sin(), 25.0 * (1.0 - th.cos())]
        }).collect();
        let line = ReferenceLine::new(pts).unwrap();
        // inside a polyline bend the projection is unique only within the local tube
        let l = if l > 0.0 { l.min(0.9 * line.local_radius(s, l)) } else { l };
        let p = frenet_to_cartesian(&FrenetState::at(s, l), &line).unwrap();
        let (s2, l2, _) = line.project([p.x, p.y]);
        prop_assert!((s - s2).abs() < 1e-6 && (l - l2).abs() < 1e-6);
    }

    #[test]
    fn fixed_oriented_frame_round_trips(x in -100.0f64..100.0, y in -100.0f64..100.0, h in -PI..PI, v in 0.0f64..20.0) {
        let (_, set) = scene();
        let ego = EgoState::cruising(x, y, h, v);
        let t = &set.candidates[set.len() / 2];
        let back = from_fixed_oriented(&to_fixed_oriented(t, &ego), &ego);
        for (a, b) in t.points().zip(back.points()) {
            prop_assert!((a.x - b.x).abs() < 1e-9 && (a.y - b.y).abs() < 1e-9);
            prop_assert!(wrap_angle(a.heading - b.heading).abs() < 1e-9);
        }
    }

    #[test]
    fn kd_tree_matches_a_linear_scan(
        pts in prop::collection::vec((0.0f64..20.0, -3.0f64..3.0, -0.2f64..0.2), 1..200),
        q in (0.0f64..20.0, -3.0f64..3.0, -0.2f64..0.2),
        threshold in 0.1f64..4.0,
    ) {
        let pts: Vec<[f64; 3]> = pts.into_iter().map(|(a, b, c)| [a, b, c]).collect();
        let q = [q.0, q.1, q.2];
        let beta = [1.0, 5.0, 40.0];
        let mut got = KdTree::build(pts.clone()).within(&q, &beta, threshold);
        got.sort_unstable();
        let want: Vec<usize> = (0..pts.len())
            .filter(|&i| (0..3).map(|d| beta[d] * (pts[i][d] - q[d]).abs()).sum::<f64>() <= threshold)
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn soft_samples_stay_within_the_field_range(
        values in prop::collection::vec(-5.0f64..5.0, 64),
        x in -1.9f64..1.9,
        y in -1.9f64..1.9,
    ) {
        let mut field = CostField::zeros(GridGeometry::new([-1.75, -1.75], 0.5, 8, 8));
        field.values.copy_from_slice(&values);
        let v = sample_soft(&field, x, y, 0.0).value;
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }

    #[test]
    fn ranking_ignores_joint_positive_scaling(k in 0.01f64..100.0) {
        let m = CostModel::default();
        let scaled = CostModel { weights: m.weights.map(|w| w * k), alpha: m.alpha * k, beta: m.beta * k };
        // candidates with equal energy may swap on rounding, nothing else may
        let base = costs(&m);
        let cost_of: std::collections::HashMap<usize, f64> = base.iter().cloned().collect();
        let reordered: Vec<f64> = costs(&scaled).iter().map(|(i, _)| cost_of[i]).collect();
        for w in reordered.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12 * w[1].abs().max(1.0), "{} before {}", w[0], w[1]);
        }
        prop_assert!(reordered[0] <= base[0].1 + 1e-12 * base[0].1.abs().max(1.0));
    }

    #[test]
    fn focal_loss_is_non_negative(p in prop::collection::vec(0.0f32..=1.0, 16), g in prop::collection::vec(0.0f32..=1.0, 16)) {
        let geom = GridGeometry::new([0.0, 0.0], 1.0, 4, 4);
        let mut pred = PredictionGrid::zeros(geom);
        let mut truth = PredictionGrid::zeros(geom);
        for layer in 0..pred.layers {
            for i in 0..16 {
                pred.set(layer, i / 4, i % 4, p[i]);
                truth.set(layer, i / 4, i % 4, g[i].round());
            }
        }
        let l = focal_loss(&pred, &truth).unwrap();
        prop_assert!(l.is_finite() && l >= 0.0);
    }

    #[test]
    fn history_fades_monotonically(age in 0usize..40, alpha in 0.0f64..0.5) {
        let b = history_brightness(age, alpha);
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert!(history_brightness(age + 1, alpha) <= b);
    }

    #[test]
    fn quintic_meets_its_boundary_conditions(
        s0 in prop::array::uniform3(-30.0f64..30.0),
        s1 in prop::array::uniform3(-30.0f64..30.0),
        t1 in 0.5f64..6.0,
    ) {
        let q = fit_quintic(s0, s1, t1).unwrap();
        let (a, b) = (q.state_at(0.0), q.state_at(t1));
        for d in 0..3 {
            prop_assert!((a[d] - s0[d]).abs() < 1e-8 && (b[d] - s1[d]).abs() < 1e-7);
        }
    }

    #[test]
    fn imitation_loss_picks_the_closest_mode(a in 0usize..40, b in 0usize..40, c in 0usize..40) {
        let (_, set) = scene();
        let n = set.len();
        let modes = vec![set.candidates[a % n].clone(), set.candidates[b % n].clone()];
        let gt = &set.candidates[c % n];
        let (loss, idx) = multimodal_imitation_loss(&modes, gt);
        prop_assert!(modes.iter().all(|m| loss <= mapless_planner::planner::mean_distance(m, gt)));
        prop_assert_eq!(loss, mapless_planner::planner::mean_distance(&modes[idx], gt));
    }
}

#[test]
fn kinematic_filter_only_keeps_admissible_plans() {
    let (_, set) = scene();
    let tight = KinematicLimits { max_accel: 1.0, ..KinematicLimits::default() };
    let kept = kinematic_filter(set.clone(), &tight);
    assert!(kept.len() < set.len());
    assert!(kept.candidates.iter().all(|t| tight.admits(t)));
    assert_eq!(kept.counts.values().sum::<usize>(), kept.len());
}

