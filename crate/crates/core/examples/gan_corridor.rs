//! Trains the toy generator against a frozen evaluator in a walled corridor
//! and counts how many Gaussian samples stay between the walls.

use mapless_planner::evaluator::CostModel;
use mapless_planner::planner::{
    sample_generator, train_gan_planner, GanConfig, GanFrame, GenContext, LatentMode, Planner, PlannerConfig,
    ToyGenerator,
};
use mapless_planner::types::{EgoState, Frame, GridSpec, Route, RouteSource, Source, VehicleSize};

fn main() -> mapless_planner::Result<()> {
    let wall = |y0: f64, y1: f64| vec![[-60.0, y0], [60.0, y0], [60.0, y1], [-60.0, y1]];
    let frame = Frame {
        ego: EgoState::cruising(0.0, 0.0, 0.0, 6.0),
        ego_size: VehicleSize::default(),
        ego_history: Vec::new(),
        agents: Vec::new(),
        landmarks: Vec::new(),
        route: Route { points: vec![[-20.0, 0.0], [200.0, 0.0]], source: RouteSource::LaneCenter, target_speed: 6.0 },
        static_obstacles: vec![wall(2.5, 8.0), wall(-8.0, -2.5)],
        stop_lines: Vec::new(),
        grid: GridSpec { width_m: 80.0, height_m: 30.0, resolution: 0.2 },
    };
    let evaluator = CostModel::default();
    let ctx = Planner::new(PlannerConfig::default(), evaluator).prepare(&frame)?;
    let context = GenContext::new(&frame.ego, &frame.route)?;
    let inside = |g: &ToyGenerator| {
        sample_generator(g, &context, 100, LatentMode::Gaussian, 99)
            .iter()
            .filter(|t| t.waypoints.iter().all(|w| w.y.abs() < 1.5))
            .count()
    };

    let untrained = ToyGenerator::new(4, 8, 0.5, 21);
    println!("untrained: {}/100 samples inside", inside(&untrained));
    let gt = ToyGenerator::decode(&context, [6.0, 0.0, 0.0], Source::Human).trajectory;
    let frames = vec![GanFrame { context: context.clone(), planes: ctx.planes, gt }];
    let cfg = GanConfig { freeze_evaluator: true, ..GanConfig::default() };
    let report = train_gan_planner(&frames, untrained, evaluator, &cfg)?;
    println!(
        "generator loss {:.3} -> {:.3}",
        report.generator_trace[0],
        report.generator_trace.last().unwrap()
    );
    println!("trained:   {}/100 samples inside", inside(&report.generator));
    Ok(())
}
