//! Candidate counts per sampler on the first frame of each built-in
//! scenario, with the expert database and generator enabled.

use mapless_planner::evaluator::CostModel;
use mapless_planner::planner::{Planner, PlannerConfig, SamplerToggles, ToyGenerator};
use mapless_planner::samplers::{build_expert_db, synthetic_expert_trajectories, ExpertDbConfig};
use mapless_planner::simulator::scenario_suite;
use mapless_planner::types::Frame;

fn main() -> mapless_planner::Result<()> {
    let db = build_expert_db(&synthetic_expert_trajectories(80, 12, 4), &ExpertDbConfig::default())?;
    println!("expert database: {} entries in {} bins", db.len(), db.bin_count());
    let all = SamplerToggles { curve: true, retrieval: true, lattice: true, imitation: true, gan: true };
    let mut planner = Planner::new(PlannerConfig { samplers: all, ..PlannerConfig::default() }, CostModel::default());
    planner.expert_db = Some(db);
    planner.generator = Some(ToyGenerator::new(4, 8, 0.5, 3));
    for scenario in scenario_suite() {
        let frame = Frame::initial(&scenario);
        let ctx = planner.prepare(&frame)?;
        let set = planner.candidates(&frame, &ctx, 0)?;
        let counts: Vec<String> = set.counts.iter().map(|(s, n)| format!("{s:?} {n}")).collect();
        let decision = planner.decide(&frame, &ctx, &set, None)?;
        println!(
            "{:<16} {:>4} candidates [{}]  chosen {:?} fallback {}",
            scenario.name,
            decision.ranked.len(),
            counts.join(", "),
            decision.chosen.source,
            decision.fallback
        );
    }
    Ok(())
}
