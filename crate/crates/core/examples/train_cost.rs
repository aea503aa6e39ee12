//! Trains the cost volume weights by max-margin on a synthetic dataset and
//! reports held-out ranking accuracy.

use mapless_planner::evaluator::{train_cost_model, CostModel, TrainConfig};
use mapless_planner::io::{generate_synthetic_dataset, training_frames, DatasetConfig};
use mapless_planner::planner::{Planner, PlannerConfig, SamplerToggles};

fn main() -> mapless_planner::Result<()> {
    let data = generate_synthetic_dataset(&DatasetConfig { frames: 120, ..DatasetConfig::default() })?;
    let samplers = SamplerToggles { lattice: true, ..SamplerToggles::NONE };
    let planner = Planner::new(PlannerConfig { samplers, ..PlannerConfig::default() }, CostModel::default());
    let frames = training_frames(&data, &planner)?;
    let (train, held) = frames.split_at(100);
    let ranked = |m: &CostModel| held.iter().filter(|f| f.gt_ranks_cheapest(m)).count();

    let start = CostModel::zeros();
    println!("held-out gt cheapest before: {}/{}", ranked(&start), held.len());
    let report = train_cost_model(train, start, &TrainConfig::default())?;
    println!("loss {:.3} -> {:.3} over {} steps", report.trace[0], report.trace.last().unwrap(), report.trace.len() - 1);
    println!("held-out gt cheapest after:  {}/{}", ranked(&report.model), held.len());
    println!("weights {:?}", report.model.weights.map(|w| (w * 1000.0).round() / 1000.0));
    Ok(())
}
