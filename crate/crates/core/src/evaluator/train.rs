use serde::{Deserialize, Serialize};

use super::cost::l2_sum;
use super::features::{feature, FeaturePlanes, FEATURE_COUNT};
use super::volume::CostModel;
use crate::error::{Error, Result};
use crate::types::{CandidateSet, Trajectory};

/// One candidate reduced to what the loss needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub sums: [f64; FEATURE_COUNT],
    /// `Diff(gt, candidate)`.
    pub diff: f64,
}

/// A frame's ground truth and candidates as feature totals. The energy is
/// linear in the weights, so these totals are all the loss ever reads.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingFrame {
    pub gt: [f64; FEATURE_COUNT],
    pub candidates: Vec<ScoredCandidate>,
}

impl TrainingFrame {
    pub fn new(planes: &FeaturePlanes, gt: &Trajectory, candidates: &CandidateSet) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        let (gt_sums, _) = planes.feature_sums(gt);
        let candidates = candidates
            .iter()
            .map(|c| {
                let (sums, _) = planes.feature_sums(c);
                let diff = l2_sum(gt, c) + sums[feature::OCCUPANCY] + sums[feature::PREDICTION];
                ScoredCandidate { sums, diff }
            })
            .collect();
        Ok(Self { gt: gt_sums, candidates })
    }

    /// Hinge loss, its weight gradient and the maximizing candidate.
    pub fn loss(&self, model: &CostModel) -> (f64, [f64; FEATURE_COUNT], usize) {
        let e_gt = model.energy(&self.gt);
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, c) in self.candidates.iter().enumerate() {
            let v = e_gt - model.energy(&c.sums) + c.diff;
            if v > best.0 {
                best = (v, i);
            }
        }
        if best.0 <= 0.0 {
            return (0.0, [0.0; FEATURE_COUNT], best.1);
        }
        let star = &self.candidates[best.1].sums;
        let mut grad = [0.0; FEATURE_COUNT];
        for i in 0..FEATURE_COUNT {
            grad[i] = self.gt[i] - star[i];
        }
        (best.0, grad, best.1)
    }

    /// Whether no candidate is strictly cheaper than the ground truth.
    pub fn gt_ranks_cheapest(&self, model: &CostModel) -> bool {
        let e_gt = model.energy(&self.gt);
        self.candidates.iter().all(|c| model.energy(&c.sums) >= e_gt - 1e-9)
    }
}

/// `max(0, max_c [E(gt) - E(c) + Diff(gt, c)])` and its gradient with
/// respect to the weights.
pub fn max_margin_loss(
    model: &CostModel,
    planes: &FeaturePlanes,
    gt: &Trajectory,
    candidates: &CandidateSet,
) -> Result<(f64, [f64; FEATURE_COUNT])> {
    let frame = TrainingFrame::new(planes, gt, candidates)?;
    let (loss, grad, _) = frame.loss(model);
    Ok((loss, grad))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Step growth after an accepted step.
    pub growth: f64,
    /// Smallest step tried before training stops.
    pub min_learning_rate: f64,
    /// Loss above which training aborts.
    pub divergence: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.05, epochs: 300, growth: 1.2, min_learning_rate: 1e-10, divergence: 1e6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub model: CostModel,
    /// Mean loss before the first epoch and after each accepted step.
    pub trace: Vec<f64>,
}

fn mean_loss(frames: &[TrainingFrame], model: &CostModel) -> (f64, [f64; FEATURE_COUNT]) {
    let mut loss = 0.0;
    let mut grad = [0.0; FEATURE_COUNT];
    for f in frames {
        let (l, g, _) = f.loss(model);
        loss += l;
        for i in 0..FEATURE_COUNT {
            grad[i] += g[i];
        }
    }
    let n = frames.len() as f64;
    (loss / n, grad.map(|g| g / n))
}

/// Full-batch gradient descent on the mean hinge loss. A step that would
/// raise the loss is retried at half the step size, so the trace never
/// increases; training ends after `epochs` steps or when no step size down
/// to the minimum helps.
pub fn train_cost_model(frames: &[TrainingFrame], initial: CostModel, config: &TrainConfig) -> Result<TrainReport> {
    if frames.is_empty() {
        return Err(Error::InvalidInput("training needs at least one frame".into()));
    }
    let mut model = initial;
    let (mut loss, mut grad) = mean_loss(frames, &model);
    let check = |loss: f64, epoch: usize, lr: f64, model: &CostModel| -> Result<()> {
        if !loss.is_finite() || loss > config.divergence {
            return Err(Error::Diverged(format!(
                "loss {loss} at epoch {epoch} with step {lr}; weights {:?}",
                model.weights
            )));
        }
        Ok(())
    };
    check(loss, 0, config.learning_rate, &model)?;
    let mut trace = vec![loss];
    let mut lr = config.learning_rate;
    for epoch in 1..=config.epochs {
        if grad.iter().all(|g| *g == 0.0) {
            break;
        }
        let mut accepted = false;
        while lr >= config.min_learning_rate {
            let mut trial = model;
            for i in 0..FEATURE_COUNT {
                trial.weights[i] -= lr * grad[i];
            }
            let (l, g) = mean_loss(frames, &trial);
            check(l, epoch, lr, &trial)?;
            if l <= loss {
                model = trial;
                loss = l;
                grad = g;
                accepted = true;
                lr *= config.growth;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            break;
        }
        trace.push(loss);
    }
    Ok(TrainReport { model, trace })
}
