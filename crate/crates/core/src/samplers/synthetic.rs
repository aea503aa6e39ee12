use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lattice::{lattice_sampler, LatticeConfig};
use super::st_graph::StGraph;
use crate::geometry::{from_fixed_oriented, FrenetState, ReferenceLine};
use crate::types::{EgoState, Source, Trajectory};

/// Arc of signed curvature `kappa` (straight when zero) starting at the
/// origin along +x, sampled every meter.
fn arc(kappa: f64, length: f64) -> ReferenceLine {
    let n = length.ceil() as usize;
    let pts = (0..=n)
        .map(|i| {
            let s = i as f64;
            if kappa.abs() < 1e-9 {
                [s, 0.0]
            } else {
                [(kappa * s).sin() / kappa, (1.0 - (kappa * s).cos()) / kappa]
            }
        })
        .collect();
    ReferenceLine::new(pts).expect("distinct samples")
}

/// Stand-in for recorded human driving: lattice trajectories over random
/// road curvatures and initial speeds and accelerations, each placed at a
/// random pose. `per_scene` candidates are drawn from every scene.
pub fn synthetic_expert_trajectories(scenes: usize, per_scene: usize, seed: u64) -> Vec<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = LatticeConfig::default();
    let mut out = Vec::new();
    for _ in 0..scenes {
        let kappa = if rng.random_bool(0.4) { 0.0 } else { rng.random_range(-0.03..0.03) };
        let v = rng.random_range(0.0..18.0);
        let a = rng.random_range(-1.5..1.5);
        let target = (v + rng.random_range(-4.0..4.0f64)).max(0.0);
        let reference = arc(kappa, 150.0);
        let init = FrenetState { s: 0.0, s_dot: v, s_ddot: a, l: 0.0, l_prime: 0.0, l_pprime: 0.0 };
        let mut set = lattice_sampler(&init, &reference, &StGraph::default(), target, &config).candidates;
        set.shuffle(&mut rng);
        let pose = EgoState::cruising(rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0), rng.random_range(-3.1..3.1), v);
        for t in set.into_iter().take(per_scene) {
            let mut t = from_fixed_oriented(&t, &pose);
            t.source = Source::Human;
            out.push(t);
        }
    }
    out
}
