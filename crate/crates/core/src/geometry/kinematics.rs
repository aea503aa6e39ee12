use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, Result};
use crate::types::{EgoState, Pose, Trajectory};

/// Path curvature of the bicycle model for steering angle `phi` and
/// wheelbase `wheelbase`: `2 tan(phi) / L`.
pub fn curvature_from_steering(phi: f64, wheelbase: f64) -> Result<f64> {
    if !(wheelbase > 0.0) {
        return Err(invalid(format!("wheelbase must be > 0, got {wheelbase}")));
    }
    if !(phi.abs() < FRAC_PI_2) {
        return Err(invalid(format!("steering angle must satisfy |phi| < pi/2, got {phi}")));
    }
    Ok(curvature_from_steering_unchecked(phi, wheelbase))
}

pub(crate) fn curvature_from_steering_unchecked(phi: f64, wheelbase: f64) -> f64 {
    2.0 * phi.tan() / wheelbase
}

/// Inverse of [`curvature_from_steering`].
pub fn steering_from_curvature(kappa: f64, wheelbase: f64) -> f64 {
    (0.5 * kappa * wheelbase).atan()
}

/// Advances `pose` by `distance` along an arc of constant curvature `kappa`.
pub fn advance_arc(pose: Pose, distance: f64, kappa: f64) -> Pose {
    let dtheta = kappa * distance;
    let (x, y) = if dtheta.abs() < 1e-9 {
        // second-order expansion keeps the straight limit exact
        let mid = pose.heading + 0.5 * dtheta;
        (pose.x + distance * mid.cos(), pose.y + distance * mid.sin())
    } else {
        let h1 = pose.heading + dtheta;
        (
            pose.x + (h1.sin() - pose.heading.sin()) / kappa,
            pose.y - (h1.cos() - pose.heading.cos()) / kappa,
        )
    };
    Pose::new(x, y, pose.heading + dtheta)
}

fn rotate(x: f64, y: f64, angle: f64) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    (c * x - s * y, s * x + c * y)
}

/// Expresses an Ego-ENU trajectory in the ego's fixed-oriented frame: the
/// ego sits at the origin and its heading points along +x.
pub fn to_fixed_oriented(traj: &Trajectory, ego: &EgoState) -> Trajectory {
    let mut out = traj.clone();
    for w in std::iter::once(&mut out.origin).chain(out.waypoints.iter_mut()) {
        let (x, y) = rotate(w.x - ego.x, w.y - ego.y, -ego.heading);
        w.x = x;
        w.y = y;
        w.heading -= ego.heading;
    }
    out
}

/// Inverse of [`to_fixed_oriented`].
pub fn from_fixed_oriented(traj: &Trajectory, ego: &EgoState) -> Trajectory {
    let mut out = traj.clone();
    for w in std::iter::once(&mut out.origin).chain(out.waypoints.iter_mut()) {
        let (x, y) = rotate(w.x, w.y, ego.heading);
        w.x = x + ego.x;
        w.y = y + ego.y;
        w.heading += ego.heading;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Maneuver, Source, Waypoint};

    #[test]
    fn zero_steering_is_straight() {
        assert_eq!(curvature_from_steering(0.0, 2.8).unwrap(), 0.0);
    }

    #[test]
    fn direct_substitution() {
        let k = curvature_from_steering(0.1, 2.8).unwrap();
        assert!((k - 2.0 * 0.1f64.tan() / 2.8).abs() < 1e-15);
        assert!((k - 0.07167).abs() < 1e-5);
    }

    #[test]
    fn small_angle_approximation_within_one_percent() {
        for i in 1..=100 {
            let phi = 0.1 * i as f64 / 100.0;
            for sign in [-1.0, 1.0] {
                let exact = curvature_from_steering(sign * phi, 2.8).unwrap();
                let approx = 2.0 * sign * phi / 2.8;
                assert!(((approx - exact) / exact).abs() < 0.01);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(curvature_from_steering(FRAC_PI_2, 2.8).is_err());
        assert!(curvature_from_steering(0.1, 0.0).is_err());
        assert!(curvature_from_steering(-2.0, 2.8).is_err());
    }

    #[test]
    fn arc_closes_after_full_turn() {
        let k = 0.1;
        let p = advance_arc(Pose::new(1.0, 2.0, 0.3), std::f64::consts::TAU / k, k);
        assert!((p.x - 1.0).abs() < 1e-9 && (p.y - 2.0).abs() < 1e-9);
    }

    fn sample_traj() -> Trajectory {
        let pts = (0..=30)
            .map(|k| Waypoint { t: k as f64 * 0.1, x: k as f64, y: 0.5 * k as f64, heading: 0.4, v: 10.0 })
            .collect();
        Trajectory::from_samples(pts, Maneuver::LaneKeep, Source::Curve)
    }

    #[test]
    fn fixed_oriented_identity_and_quarter_turn() {
        let t = sample_traj();
        let ego = EgoState::cruising(0.0, 0.0, 0.0, 10.0);
        assert_eq!(to_fixed_oriented(&t, &ego), t);

        let mut t = sample_traj();
        t.waypoints[0].x = 0.0;
        t.waypoints[0].y = 5.0;
        let ego = EgoState::cruising(0.0, 0.0, FRAC_PI_2, 10.0);
        let f = to_fixed_oriented(&t, &ego);
        assert!((f.waypoints[0].x - 5.0).abs() < 1e-12);
        assert!(f.waypoints[0].y.abs() < 1e-12);
    }
}
