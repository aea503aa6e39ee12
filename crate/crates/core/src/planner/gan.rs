use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generator::{anchor_latents, gaussian_latents, GenContext, LatentMode, ToyGenerator, OUTPUT_DIM};
use super::imitation::multimodal_imitation_loss;
use crate::error::{invalid, Error, Result};
use crate::evaluator::{energy_with_gradient, CostModel, FeaturePlanes, TrainingFrame, FEATURE_COUNT};
use crate::types::{CandidateSet, Source, Trajectory};

/// One training frame for the generator.
#[derive(Debug, Clone)]
pub struct GanFrame {
    pub context: GenContext,
    pub planes: FeaturePlanes,
    pub gt: Trajectory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GanConfig {
    /// Imitation-only epochs before the adversarial phase.
    pub pretrain_epochs: usize,
    pub epochs: usize,
    pub generator_lr: f64,
    pub evaluator_lr: f64,
    /// Weight of the mean evaluator energy in the generator loss.
    pub energy_weight: f64,
    pub imitation_weight: f64,
    /// Keep the evaluator fixed and train only the generator.
    pub freeze_evaluator: bool,
    pub latents: LatentMode,
    pub seed: u64,
    /// Loss magnitude treated as divergence.
    pub divergence: f64,
}

impl Default for GanConfig {
    fn default() -> Self {
        Self {
            pretrain_epochs: 100,
            epochs: 200,
            generator_lr: 0.02,
            evaluator_lr: 0.01,
            energy_weight: 0.05,
            imitation_weight: 1.0,
            freeze_evaluator: false,
            latents: LatentMode::Gaussian,
            seed: 11,
            divergence: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanReport {
    pub generator: ToyGenerator,
    pub evaluator: CostModel,
    /// Mean generator loss per epoch, pretraining included.
    pub generator_trace: Vec<f64>,
    /// Mean evaluator hinge loss per adversarial epoch.
    pub evaluator_trace: Vec<f64>,
}

/// Adam over a flat parameter vector.
#[derive(Debug, Clone)]
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    lr: f64,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize, lr: f64) -> Self {
        Self { m: vec![0.0; n], v: vec![0.0; n], t: 0, lr }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = Self::B1 * self.m[i] + (1.0 - Self::B1) * grad[i];
            self.v[i] = Self::B2 * self.v[i] + (1.0 - Self::B2) * grad[i] * grad[i];
            params[i] -= self.lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + Self::EPS);
        }
    }
}

fn flatten(gen: &ToyGenerator) -> Vec<f64> {
    gen.weights.iter().chain(gen.bias.iter()).copied().collect()
}

fn unflatten(gen: &mut ToyGenerator, params: &[f64]) {
    let n = gen.weights.len();
    gen.weights.copy_from_slice(&params[..n]);
    gen.bias.copy_from_slice(&params[n..]);
}

/// Generator loss over all frames and its parameter gradient:
/// `imitation_weight * min-over-modes L2 + energy_weight * mean energy`.
fn generator_step(
    gen: &ToyGenerator,
    evaluator: &CostModel,
    frames: &[GanFrame],
    latents: &[Vec<Vec<f64>>],
    energy_weight: f64,
    imitation_weight: f64,
    source: Source,
) -> (f64, Vec<f64>, Vec<CandidateSet>) {
    let cols = gen.cols();
    let mut grad = vec![0.0; gen.weights.len() + OUTPUT_DIM];
    let mut total = 0.0;
    let mut sets = Vec::with_capacity(frames.len());
    for (frame, draws) in frames.iter().zip(latents) {
        let decoded: Vec<_> = draws.iter().map(|m| gen.generate(&frame.context, m, source)).collect();
        let modes: Vec<Trajectory> = decoded.iter().map(|d| d.trajectory.clone()).collect();
        let (imit, best) = multimodal_imitation_loss(&modes, &frame.gt);
        total += imitation_weight * imit;
        let share = energy_weight / draws.len().max(1) as f64;
        for (i, (d, m)) in decoded.iter().zip(draws).enumerate() {
            let mut dp: Vec<[f64; 2]> = vec![[0.0; 2]; d.jacobian.len()];
            if share > 0.0 {
                let (e, g) = energy_with_gradient(evaluator, &frame.planes, &d.trajectory);
                total += share * e;
                for (acc, gk) in dp.iter_mut().zip(&g) {
                    acc[0] += share * gk[0];
                    acc[1] += share * gk[1];
                }
            }
            if i == best && imitation_weight > 0.0 {
                let n = d.trajectory.waypoints.len() as f64;
                for (acc, (w, g)) in dp.iter_mut().zip(d.trajectory.waypoints.iter().zip(&frame.gt.waypoints)) {
                    let (dx, dy) = (w.x - g.x, w.y - g.y);
                    let r = dx.hypot(dy);
                    if r > 1e-12 {
                        acc[0] += imitation_weight * dx / (r * n);
                        acc[1] += imitation_weight * dy / (r * n);
                    }
                }
            }
            let x = gen.input(&frame.context, m);
            for o in 0..OUTPUT_DIM {
                let dy: f64 = dp.iter().zip(&d.jacobian).map(|(p, j)| p[0] * j[o][0] + p[1] * j[o][1]).sum();
                for (c, xv) in x.iter().enumerate() {
                    grad[o * cols + c] += dy * xv;
                }
                grad[gen.weights.len() + o] += dy;
            }
        }
        sets.push(CandidateSet::from_trajectories(modes));
    }
    let n = frames.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (total / n, grad, sets)
}

/// Imitation pretraining followed by alternating generator and evaluator
/// updates. The generator minimizes the evaluator energy of its samples plus
/// the best-of-M distance to the ground truth; the evaluator minimizes the
/// max-margin hinge of the ground truth against the generated samples.
pub fn train_gan_planner(
    frames: &[GanFrame],
    generator: ToyGenerator,
    evaluator: CostModel,
    config: &GanConfig,
) -> Result<GanReport> {
    if frames.is_empty() {
        return Err(invalid("no training frames"));
    }
    generator.validate()?;
    if generator.modes == 0 {
        return Err(invalid("generator needs at least one mode"));
    }
    let mut gen = generator;
    let mut model = evaluator;
    let mut params = flatten(&gen);
    let mut adam = Adam::new(params.len(), config.generator_lr);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let source = match config.latents {
        LatentMode::Anchors => Source::Imitation,
        LatentMode::Gaussian => Source::Gan,
    };
    let mut draw = |gen: &ToyGenerator| -> Vec<Vec<Vec<f64>>> {
        frames
            .iter()
            .map(|_| match config.latents {
                LatentMode::Anchors => anchor_latents(gen.latent_dim, gen.modes),
                LatentMode::Gaussian => gaussian_latents(gen.latent_dim, gen.modes, &mut rng),
            })
            .collect()
    };
    let check = |loss: f64, params: &[f64]| -> Result<()> {
        if !loss.is_finite() || loss.abs() > config.divergence || !params.iter().all(|p| p.is_finite()) {
            return Err(Error::Diverged(format!("generator loss {loss}")));
        }
        Ok(())
    };

    let mut generator_trace = Vec::with_capacity(config.pretrain_epochs + config.epochs);
    let mut evaluator_trace = Vec::with_capacity(config.epochs);
    for _ in 0..config.pretrain_epochs {
        let latents = draw(&gen);
        let (loss, grad, _) = generator_step(&gen, &model, frames, &latents, 0.0, config.imitation_weight, source);
        check(loss, &params)?;
        generator_trace.push(loss);
        adam.step(&mut params, &grad);
        unflatten(&mut gen, &params);
    }
    for _ in 0..config.epochs {
        let latents = draw(&gen);
        let (loss, grad, sets) =
            generator_step(&gen, &model, frames, &latents, config.energy_weight, config.imitation_weight, source);
        check(loss, &params)?;
        generator_trace.push(loss);
        adam.step(&mut params, &grad);
        unflatten(&mut gen, &params);

        let mut hinge = 0.0;
        let mut wgrad = [0.0; FEATURE_COUNT];
        for (frame, set) in frames.iter().zip(&sets) {
            let tf = TrainingFrame::new(&frame.planes, &frame.gt, set)?;
            let (l, g, _) = tf.loss(&model);
            hinge += l;
            for i in 0..FEATURE_COUNT {
                wgrad[i] += g[i];
            }
        }
        let n = frames.len() as f64;
        hinge /= n;
        if !hinge.is_finite() || hinge.abs() > config.divergence {
            return Err(Error::Diverged(format!("evaluator loss {hinge}")));
        }
        evaluator_trace.push(hinge);
        if !config.freeze_evaluator {
            for i in 0..FEATURE_COUNT {
                model.weights[i] -= config.evaluator_lr * wgrad[i] / n;
            }
        }
    }
    Ok(GanReport { generator: gen, evaluator: model, generator_trace, evaluator_trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::evaluate;
    use crate::testutil::{context, frame};

    fn gan_frame(v: f64, gt_outputs: [f64; 3]) -> GanFrame {
        let f = frame(v);
        let ctx = context(&f);
        let context = GenContext::new(&f.ego, &f.route).unwrap();
        let gt = ToyGenerator::decode(&context, gt_outputs, Source::Human).trajectory;
        GanFrame { context, planes: ctx.planes, gt }
    }

    fn emitting(outputs: [f64; 3], modes: usize) -> ToyGenerator {
        let mut gen = ToyGenerator::new(4, modes, 0.0, 0);
        gen.weights.iter_mut().for_each(|w| *w = 0.0);
        gen.bias = outputs;
        gen
    }

    #[test]
    fn exact_generator_loss_is_the_gt_energy() {
        let y = [6.0, 0.0, 0.0];
        let frame = gan_frame(6.0, y);
        let model = CostModel::default();
        let cfg = GanConfig { pretrain_epochs: 0, epochs: 1, freeze_evaluator: true, energy_weight: 1.0, ..GanConfig::default() };
        let report = train_gan_planner(std::slice::from_ref(&frame), emitting(y, 4), model, &cfg).unwrap();
        let e_gt = evaluate(&model, &frame.planes, &frame.gt).total;
        assert!((report.generator_trace[0] - e_gt).abs() < 1e-9 * e_gt.abs().max(1.0));
    }

    #[test]
    fn traces_are_finite_and_hinge_non_negative() {
        let frames: Vec<GanFrame> = [4.0, 6.0, 8.0].iter().map(|&v| gan_frame(v, [v, 0.0, 0.0])).collect();
        let cfg = GanConfig { pretrain_epochs: 10, epochs: 15, ..GanConfig::default() };
        let report = train_gan_planner(&frames, ToyGenerator::new(4, 6, 0.5, 1), CostModel::default(), &cfg).unwrap();
        assert_eq!(report.generator_trace.len(), 25);
        assert_eq!(report.evaluator_trace.len(), 15);
        assert!(report.generator_trace.iter().all(|l| l.is_finite()));
        assert!(report.evaluator_trace.iter().all(|l| l.is_finite() && *l >= 0.0));
        report.generator.validate().unwrap();
    }

    #[test]
    fn pretraining_pulls_modes_towards_the_gt() {
        let frames: Vec<GanFrame> = [5.0, 7.0].iter().map(|&v| gan_frame(v, [v - 2.0, 0.0, 1.0])).collect();
        let cfg = GanConfig { pretrain_epochs: 150, epochs: 0, latents: LatentMode::Anchors, ..GanConfig::default() };
        let report = train_gan_planner(&frames, ToyGenerator::new(4, 4, 0.5, 2), CostModel::default(), &cfg).unwrap();
        let first = report.generator_trace[0];
        let last = *report.generator_trace.last().unwrap();
        assert!(last < 0.25 * first, "{first} -> {last}");
    }

    #[test]
    fn training_is_deterministic() {
        let frames = vec![gan_frame(6.0, [6.0, 0.0, 0.5])];
        let cfg = GanConfig { pretrain_epochs: 5, epochs: 5, ..GanConfig::default() };
        let run = || train_gan_planner(&frames, ToyGenerator::new(4, 4, 0.5, 1), CostModel::default(), &cfg).unwrap();
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_dataset_is_rejected() {
        assert!(train_gan_planner(&[], ToyGenerator::new(4, 4, 0.5, 1), CostModel::default(), &GanConfig::default()).is_err());
    }
}
