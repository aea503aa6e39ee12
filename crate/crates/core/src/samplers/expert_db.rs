use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kdtree::KdTree;
use crate::error::{invalid, Result};
use crate::geometry::to_fixed_oriented;
use crate::time::DT;
use crate::types::{EgoState, Trajectory};

/// `(v bin, a bin, kappa bin)`.
pub type BinKey = [i64; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpertDbConfig {
    /// Bin widths for `(v, a, kappa)`.
    pub bin_sizes: [f64; 3],
    /// Upper bound on clusters per bin.
    pub clusters_per_bin: usize,
    pub kmeans_iterations: usize,
    pub seed: u64,
}

impl Default for ExpertDbConfig {
    fn default() -> Self {
        Self { bin_sizes: [1.0, 0.5, 0.01], clusters_per_bin: 8, kmeans_iterations: 50, seed: 7 }
    }
}

/// Initial `(v0, a0, kappa0)` of a recorded trajectory: the origin speed,
/// the first speed difference, and the signed curvature of the circle
/// through the origin and the first two waypoints.
pub fn initial_state(traj: &Trajectory) -> [f64; 3] {
    let p0 = traj.origin.xy();
    let (p1, p2) = match traj.waypoints.as_slice() {
        [a, b, ..] => (a.xy(), b.xy()),
        _ => (p0, p0),
    };
    let v1 = traj.waypoints.first().map_or(traj.origin.v, |w| w.v);
    [traj.origin.v, (v1 - traj.origin.v) / DT, circumcircle_curvature(p0, p1, p2)]
}

/// Signed curvature (left turns positive) of the circle through three
/// points; zero when they are collinear or coincide.
pub fn circumcircle_curvature(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let ab = (b[0] - a[0]).hypot(b[1] - a[1]);
    let bc = (c[0] - b[0]).hypot(c[1] - b[1]);
    let ca = (a[0] - c[0]).hypot(a[1] - c[1]);
    let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let denom = ab * bc * ca;
    if denom < 1e-12 {
        0.0
    } else {
        2.0 * cross / denom
    }
}

/// Left-closed bins starting at zero: `floor(x / size)`.
pub fn bin_key(state: &[f64; 3], sizes: &[f64; 3]) -> BinKey {
    [0, 1, 2].map(|d| (state[d] / sizes[d]).floor() as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbEntry {
    pub key: BinKey,
    pub state: [f64; 3],
    /// The recorded trajectory, unchanged.
    pub trajectory: Trajectory,
}

/// Binned and clustered library of recorded trajectories with a k-d tree
/// over the initial states of the retained representatives.
#[derive(Debug, Clone)]
pub struct ExpertTrajectoryDb {
    pub bin_sizes: [f64; 3],
    pub entries: Vec<DbEntry>,
    tree: KdTree,
}

impl ExpertTrajectoryDb {
    /// Wraps already selected entries (e.g. loaded from disk).
    pub fn from_entries(bin_sizes: [f64; 3], entries: Vec<DbEntry>) -> Self {
        let tree = KdTree::build(entries.iter().map(|e| e.state).collect());
        Self { bin_sizes, entries, tree }
    }

    pub fn tree(&self) -> &KdTree {
        &self.tree
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of occupied bins.
    pub fn bin_count(&self) -> usize {
        let mut keys: Vec<BinKey> = self.entries.iter().map(|e| e.key).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }
}

/// Flattened waypoints in the trajectory's own start frame.
fn shape_vector(traj: &Trajectory) -> Vec<f64> {
    let o = &traj.origin;
    let local = to_fixed_oriented(traj, &EgoState::cruising(o.x, o.y, o.heading, o.v));
    local.waypoints.iter().flat_map(|w| [w.x, w.y]).collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means with k-means++ seeding; returns the cluster index of each point.
fn kmeans(points: &[Vec<f64>], k: usize, iterations: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = points.len();
    let mut centers: Vec<Vec<f64>> = vec![points[rng.random_range(0..n)].clone()];
    while centers.len() < k {
        let d: Vec<f64> =
            points.iter().map(|p| centers.iter().map(|c| dist2(p, c)).fold(f64::INFINITY, f64::min)).collect();
        let total: f64 = d.iter().sum();
        if total <= 0.0 {
            break;
        }
        let mut target = rng.random::<f64>() * total;
        let mut pick = n - 1;
        for (i, di) in d.iter().enumerate() {
            if target < *di {
                pick = i;
                break;
            }
            target -= di;
        }
        centers.push(points[pick].clone());
    }
    let mut assign = vec![0usize; n];
    for _ in 0..iterations {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let best = (0..centers.len())
                .min_by(|&a, &b| dist2(p, &centers[a]).total_cmp(&dist2(p, &centers[b])).then(a.cmp(&b)))
                .expect("at least one center");
            if best != assign[i] {
                assign[i] = best;
                changed = true;
            }
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points.iter().zip(&assign).filter(|(_, a)| **a == c).map(|(p, _)| p).collect();
            if members.is_empty() {
                continue;
            }
            for (j, v) in center.iter_mut().enumerate() {
                *v = members.iter().map(|m| m[j]).sum::<f64>() / members.len() as f64;
            }
        }
        if !changed {
            break;
        }
    }
    // report against the final centers so medoids use them
    assign
        .iter()
        .enumerate()
        .map(|(i, _)| {
            (0..centers.len())
                .min_by(|&a, &b| dist2(&points[i], &centers[a]).total_cmp(&dist2(&points[i], &centers[b])).then(a.cmp(&b)))
                .expect("at least one center")
        })
        .collect()
}

/// Bins the recorded trajectories by initial state, clusters each bin on
/// its start-frame shape, and keeps the member closest to every cluster
/// mean. Identical shapes collapse into one cluster.
pub fn build_expert_db(raw: &[Trajectory], config: &ExpertDbConfig) -> Result<ExpertTrajectoryDb> {
    if raw.is_empty() {
        return Err(invalid("expert database needs at least one trajectory"));
    }
    if config.bin_sizes.iter().any(|s| !(*s > 0.0)) || config.clusters_per_bin == 0 {
        return Err(invalid("bin sizes and clusters per bin must be positive"));
    }
    let mut bins: BTreeMap<BinKey, Vec<usize>> = BTreeMap::new();
    let states: Vec<[f64; 3]> = raw.iter().map(initial_state).collect();
    for (i, s) in states.iter().enumerate() {
        if s.iter().any(|x| !x.is_finite()) {
            return Err(invalid(format!("trajectory {i} has a non-finite initial state")));
        }
        bins.entry(bin_key(s, &config.bin_sizes)).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut entries = Vec::new();
    for (key, members) in bins {
        let shapes: Vec<Vec<f64>> = members.iter().map(|&i| shape_vector(&raw[i])).collect();
        let mut distinct = shapes.clone();
        distinct.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        distinct.dedup();
        let k = config.clusters_per_bin.min(distinct.len());
        let assign = kmeans(&shapes, k, config.kmeans_iterations, &mut rng);
        let clusters = assign.iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..clusters {
            let idx: Vec<usize> = (0..members.len()).filter(|&j| assign[j] == c).collect();
            if idx.is_empty() {
                continue;
            }
            let dim = shapes[idx[0]].len();
            let mean: Vec<f64> =
                (0..dim).map(|d| idx.iter().map(|&j| shapes[j][d]).sum::<f64>() / idx.len() as f64).collect();
            let best = *idx
                .iter()
                .min_by(|&&a, &&b| dist2(&shapes[a], &mean).total_cmp(&dist2(&shapes[b], &mean)).then(a.cmp(&b)))
                .expect("non-empty cluster");
            let i = members[best];
            entries.push(DbEntry { key, state: states[i], trajectory: raw[i].clone() });
        }
    }
    Ok(ExpertTrajectoryDb::from_entries(config.bin_sizes, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Maneuver, Source, Waypoint};

    fn straight(v: f64) -> Trajectory {
        let samples = (0..=30)
            .map(|k| {
                let t = k as f64 * DT;
                Waypoint { t, x: v * t, y: 0.0, heading: 0.0, v }
            })
            .collect();
        Trajectory::from_samples(samples, Maneuver::LaneKeep, Source::Human)
    }

    #[test]
    fn identical_inputs_collapse() {
        let raw = vec![straight(5.0); 3];
        let db = build_expert_db(&raw, &ExpertDbConfig::default()).unwrap();
        assert_eq!(db.len(), 1);
    }

    #[test]
    fn bin_edges_left_closed() {
        let sizes = [1.0, 0.5, 0.01];
        // edges sit at integer multiples of the size: [5, 6) holds both
        assert_eq!(bin_key(&[5.4, 0.0, 0.0], &sizes), bin_key(&[5.6, 0.0, 0.0], &sizes));
        assert_ne!(bin_key(&[4.9, 0.0, 0.0], &sizes), bin_key(&[5.0, 0.0, 0.0], &sizes));
        assert_eq!(bin_key(&[5.0, -0.5, -0.01], &sizes), [5, -1, -1]);
        let db = build_expert_db(&[straight(5.6), straight(6.1)], &ExpertDbConfig::default()).unwrap();
        assert_eq!(db.bin_count(), 2);
    }

    #[test]
    fn circumcircle_of_unit_circle() {
        let k = circumcircle_curvature([1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]);
        assert!((k - 1.0).abs() < 1e-12);
        assert!((circumcircle_curvature([-1.0, 0.0], [0.0, 1.0], [1.0, 0.0]) + 1.0).abs() < 1e-12);
        assert_eq!(circumcircle_curvature([0.0, 0.0], [1.0, 0.0], [2.0, 0.0]), 0.0);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(build_expert_db(&[], &ExpertDbConfig::default()).is_err());
    }
}
