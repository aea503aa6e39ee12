//! Runs the built-in scenario suite with the lattice and curve samplers and
//! prints one metrics line per scenario.

use std::time::Instant;

use mapless_planner::evaluator::CostModel;
use mapless_planner::planner::{Planner, PlannerConfig};
use mapless_planner::simulator::{run_closed_loop, scenario_suite, SimConfig};

fn main() -> mapless_planner::Result<()> {
    let planner = Planner::new(PlannerConfig::default(), CostModel::default());
    for scenario in scenario_suite() {
        let start = Instant::now();
        let run = run_closed_loop(&scenario, &planner, &SimConfig::default())?;
        let m = &run.metrics;
        println!(
            "{:<16} steps {:>3}  collisions {}  deviations {}  fallbacks {}  discomfort {}  lost {}  completed {} at {:.1} s  max lat {:.2}  max jerk {:.2}  ({:.2} s wall)",
            run.scenario,
            m.steps,
            m.collisions,
            m.deviations,
            m.fallbacks,
            m.discomfort,
            m.lost_control,
            m.completed,
            m.completion_time,
            m.max_lat_accel,
            m.max_jerk,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
