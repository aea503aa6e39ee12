use crate::types::Trajectory;

/// Mean per-waypoint Euclidean distance.
pub fn mean_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    let n = a.waypoints.len().min(b.waypoints.len());
    if n == 0 {
        return 0.0;
    }
    a.waypoints.iter().zip(&b.waypoints).map(|(p, q)| (p.x - q.x).hypot(p.y - q.y)).sum::<f64>() / n as f64
}

/// Distance of the closest mode to the ground truth and that mode's index
/// (first on ties). No modes give `(inf, 0)`.
pub fn multimodal_imitation_loss(modes: &[Trajectory], gt: &Trajectory) -> (f64, usize) {
    let mut best = (f64::INFINITY, 0);
    for (i, m) in modes.iter().enumerate() {
        let d = mean_distance(m, gt);
        if d < best.0 {
            best = (d, i);
        }
    }
    best
}
