use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::evaluator::route_extension;
use crate::geometry::{fit_quartic, fit_quintic, FrenetState, ReferenceLine};
use crate::time::{waypoint_time, HORIZON, HORIZON_STEPS};
use crate::types::{CandidateSet, EgoState, Maneuver, Route, Source, Trajectory, Waypoint};

/// Conditioning features: ego speed, acceleration, target speed, lateral
/// offset from the route, and route curvature 10, 20 and 30 m ahead.
pub const CONTEXT_DIM: usize = 7;
/// Generated terminal conditions: end speed, end acceleration, end offset.
pub const OUTPUT_DIM: usize = 3;

/// How far behind the ego the reference keeps the route, m.
const REFERENCE_BACK: f64 = 10.0;

/// Everything the generator conditions on for one frame.
#[derive(Debug, Clone)]
pub struct GenContext {
    pub ego: EgoState,
    pub reference: ReferenceLine,
    pub init: FrenetState,
    pub features: [f64; CONTEXT_DIM],
}

/// Route cut a little behind the ego and extended straight far enough for
/// any 3 s plan.
pub fn planning_reference(route: &Route, ego: &EgoState) -> Result<ReferenceLine> {
    let full = ReferenceLine::new(route.points.clone())?;
    let (s, _, _) = full.project([ego.x, ego.y]);
    let trimmed = full.trimmed_from((s - REFERENCE_BACK).max(0.0));
    Ok(trimmed.extended(route_extension(ego.v.max(route.target_speed))))
}

impl GenContext {
    pub fn new(ego: &EgoState, route: &Route) -> Result<Self> {
        let reference = planning_reference(route, ego)?;
        let init = reference.frenet_state_of(ego.x, ego.y, ego.heading, ego.v, ego.a, ego.kappa);
        let curv = |d: f64| 10.0 * reference.curvature_at(init.s + d);
        let features = [
            ego.v / 10.0,
            ego.a / 2.0,
            route.target_speed / 10.0,
            init.l / 3.5,
            curv(10.0),
            curv(20.0),
            curv(30.0),
        ];
        Ok(Self { ego: *ego, reference, init, features })
    }
}

/// Latent draws: fixed anchors for the deterministic multi-modal planner,
/// Gaussian samples for the adversarial one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatentMode {
    Anchors,
    Gaussian,
}

/// `M` deterministic latents: the zero vector, then `+e_j`, `-e_j` in turn.
pub fn anchor_latents(dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let mut m = vec![0.0; dim];
            if i > 0 && dim > 0 {
                let j = (i - 1) / 2 % dim;
                m[j] = if i % 2 == 1 { 1.0 } else { -1.0 };
            }
            m
        })
        .collect()
}

pub fn gaussian_latents(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| StandardNormal.sample(rng)).collect()).collect()
}

/// Affine map from `[context | latent]` to the terminal conditions of a
/// longitudinal quartic `s(t)` and a lateral quintic `l(t)` over the 3 s
/// horizon. Start conditions come from the ego, so every output starts at
/// the ego state. The profile coefficients are linear in the terminal
/// conditions, which makes the whole map affine in the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyGenerator {
    pub latent_dim: usize,
    /// Row-major `OUTPUT_DIM x (CONTEXT_DIM + latent_dim)`.
    pub weights: Vec<f64>,
    pub bias: [f64; OUTPUT_DIM],
    /// Draws per frame.
    pub modes: usize,
}

/// Waypoint positions and their sensitivities to the three outputs.
#[derive(Debug, Clone)]
pub struct Decoded {
    pub trajectory: Trajectory,
    /// `d p_k / d output_o` for each waypoint `k` and output `o`.
    pub jacobian: Vec<[[f64; 2]; OUTPUT_DIM]>,
}

impl ToyGenerator {
    /// End speed follows the target speed and the end offset returns to the
    /// route; latent weights start Gaussian with the given scale.
    pub fn new(latent_dim: usize, modes: usize, latent_scale: f64, seed: u64) -> Self {
        let cols = CONTEXT_DIM + latent_dim;
        let mut weights = vec![0.0; OUTPUT_DIM * cols];
        weights[2] = 10.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, latent_scale.max(0.0)).expect("finite scale");
        for o in 0..OUTPUT_DIM {
            for j in 0..latent_dim {
                weights[o * cols + CONTEXT_DIM + j] = normal.sample(&mut rng);
            }
        }
        Self { latent_dim, weights, bias: [0.0; OUTPUT_DIM], modes }
    }

    pub fn cols(&self) -> usize {
        CONTEXT_DIM + self.latent_dim
    }

    pub fn input(&self, ctx: &GenContext, latent: &[f64]) -> Vec<f64> {
        ctx.features.iter().chain(latent.iter()).copied().collect()
    }

    pub fn outputs(&self, ctx: &GenContext, latent: &[f64]) -> [f64; OUTPUT_DIM] {
        let x = self.input(ctx, latent);
        let cols = self.cols();
        let mut y = self.bias;
        for (o, yo) in y.iter_mut().enumerate() {
            *yo += self.weights[o * cols..(o + 1) * cols].iter().zip(&x).map(|(w, v)| w * v).sum::<f64>();
        }
        y
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != OUTPUT_DIM * self.cols() {
            return Err(invalid("generator weight count does not match its latent size"));
        }
        if !self.weights.iter().chain(self.bias.iter()).all(|w| w.is_finite()) {
            return Err(invalid("generator parameters must be finite"));
        }
        Ok(())
    }

    /// Trajectory for terminal conditions `y`; the end speed is clamped at
    /// zero (with zero sensitivity while clamped).
    pub fn decode(ctx: &GenContext, y: [f64; OUTPUT_DIM], source: Source) -> Decoded {
        let fs = &ctx.init;
        let v_end = y[0].max(0.0);
        let v_live = if y[0] > 0.0 { 1.0 } else { 0.0 };
        let (v0, a0) = (fs.s_dot.max(0.0), fs.s_ddot);
        let lon = fit_quartic(fs.s, v0, a0, v_end, y[1], HORIZON).expect("positive horizon");
        let sens_v = fit_quartic(0.0, 0.0, 0.0, 1.0, 0.0, HORIZON).expect("positive horizon");
        let sens_a = fit_quartic(0.0, 0.0, 0.0, 0.0, 1.0, HORIZON).expect("positive horizon");
        // lateral motion in time: l(t) from the ego's lateral state
        let l_dot0 = fs.l_prime * v0;
        let l_ddot0 = fs.l_pprime * v0 * v0 + fs.l_prime * a0;
        let lat = fit_quintic([fs.l, l_dot0, l_ddot0], [y[2], 0.0, 0.0], HORIZON).expect("positive horizon");
        let sens_l = fit_quintic([0.0; 3], [1.0, 0.0, 0.0], HORIZON).expect("positive horizon");
        let len = ctx.reference.length();
        let mut jacobian = Vec::with_capacity(HORIZON_STEPS);
        let samples = (0..=HORIZON_STEPS)
            .map(|k| {
                if k == 0 {
                    return ctx.ego.origin_waypoint();
                }
                let t = waypoint_time(k);
                let [s, s_dot, _] = lon.state_at(t);
                let [l, l_dot, _] = lat.state_at(t);
                let sc = s.clamp(0.0, len);
                let base = ctx.reference.point_at(sc);
                let tan = ctx.reference.tangent_at(sc);
                let n = [-tan[1], tan[0]];
                let ds = if s > 0.0 && s < len { 1.0 } else { 0.0 };
                let dp_ds = [tan[0] * ds, tan[1] * ds];
                let (sv, sa, sl) = (sens_v.eval(t) * v_live, sens_a.eval(t), sens_l.eval(t));
                jacobian.push([
                    [dp_ds[0] * sv, dp_ds[1] * sv],
                    [dp_ds[0] * sa, dp_ds[1] * sa],
                    [n[0] * sl, n[1] * sl],
                ]);
                let l_prime = (l_dot / s_dot.abs().max(0.5)).clamp(-1.0, 1.0);
                Waypoint {
                    t,
                    x: base[0] + l * n[0],
                    y: base[1] + l * n[1],
                    heading: ctx.reference.heading_at(sc) + l_prime.atan(),
                    v: s_dot.hypot(l_dot),
                }
            })
            .collect();
        Decoded { trajectory: Trajectory::from_samples(samples, Maneuver::Generative, source), jacobian }
    }

    pub fn generate(&self, ctx: &GenContext, latent: &[f64], source: Source) -> Decoded {
        Self::decode(ctx, self.outputs(ctx, latent), source)
    }
}

/// `count` generator trajectories for one frame. Anchored latents give the
/// deterministic multi-modal planner (`imitation` source); Gaussian latents
/// drawn from `seed` give the adversarial one (`gan` source).
pub fn sample_generator(gen: &ToyGenerator, ctx: &GenContext, count: usize, mode: LatentMode, seed: u64) -> CandidateSet {
    let (latents, source) = match mode {
        LatentMode::Anchors => (anchor_latents(gen.latent_dim, count), Source::Imitation),
        LatentMode::Gaussian => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (gaussian_latents(gen.latent_dim, count, &mut rng), Source::Gan)
        }
    };
    CandidateSet::from_trajectories(latents.iter().map(|m| gen.generate(ctx, m, source).trajectory).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::straight_route;

    fn ctx(v: f64) -> GenContext {
        GenContext::new(&EgoState::cruising(1.0, 0.4, 0.05, v), &straight_route(8.0)).unwrap()
    }

    #[test]
    fn single_draw_is_a_singleton() {
        let gen = ToyGenerator::new(4, 1, 0.5, 3);
        assert_eq!(sample_generator(&gen, &ctx(6.0), 1, LatentMode::Gaussian, 1).len(), 1);
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let gen = ToyGenerator::new(4, 8, 0.5, 3);
        let a = sample_generator(&gen, &ctx(6.0), 8, LatentMode::Gaussian, 42);
        let b = sample_generator(&gen, &ctx(6.0), 8, LatentMode::Gaussian, 42);
        assert_eq!(a, b);
    }

    #[test]
    fn draws_are_diverse() {
        let gen = ToyGenerator::new(4, 16, 0.5, 3);
        let set = sample_generator(&gen, &ctx(6.0), 16, LatentMode::Gaussian, 9);
        let trajs: Vec<_> = set.iter().collect();
        let max = trajs
            .iter()
            .flat_map(|a| trajs.iter().map(move |b| crate::planner::mean_distance(a, b)))
            .fold(0.0, f64::max);
        assert!(max > 0.0);
    }

    #[test]
    fn starts_at_the_ego() {
        let c = ctx(6.0);
        let gen = ToyGenerator::new(4, 8, 1.0, 5);
        for t in sample_generator(&gen, &c, 8, LatentMode::Anchors, 0).iter() {
            assert!(t.is_valid(), "{:?}", t.violations());
            assert_eq!(t.origin, c.ego.origin_waypoint());
            assert_eq!(t.source, Source::Imitation);
            let w = &t.waypoints[0];
            let step = (w.x - c.ego.x).hypot(w.y - c.ego.y);
            assert!((step - 0.6).abs() < 0.05, "{step}");
        }
    }

    #[test]
    fn anchors_start_with_the_zero_latent() {
        let a = anchor_latents(2, 5);
        assert_eq!(a, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let c = ctx(6.0);
        let y = [7.0, 0.3, 0.9];
        let d = ToyGenerator::decode(&c, y, Source::Gan);
        let h = 1e-6;
        for o in 0..OUTPUT_DIM {
            let shifted = |delta: f64| {
                let mut yy = y;
                yy[o] += delta;
                ToyGenerator::decode(&c, yy, Source::Gan).trajectory
            };
            let (p, m) = (shifted(h), shifted(-h));
            for k in [0, 9, 29] {
                let fd = [(p.waypoints[k].x - m.waypoints[k].x) / (2.0 * h), (p.waypoints[k].y - m.waypoints[k].y) / (2.0 * h)];
                for axis in 0..2 {
                    assert!((fd[axis] - d.jacobian[k][o][axis]).abs() < 1e-6, "o {o} k {k} axis {axis}");
                }
            }
        }
    }

    #[test]
    fn default_generator_holds_target_speed() {
        let gen = ToyGenerator::new(4, 1, 0.0, 0);
        let y = gen.outputs(&ctx(6.0), &[0.0; 4]);
        assert!((y[0] - 8.0).abs() < 1e-12 && y[1] == 0.0 && y[2] == 0.0);
    }
}
