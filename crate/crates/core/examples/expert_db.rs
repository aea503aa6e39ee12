//! Builds an expert trajectory database, writes it to the binary format,
//! reads it back and runs one retrieval query.

use mapless_planner::io::{load_expert_db, save_expert_db};
use mapless_planner::samplers::{
    build_expert_db, retrieval_sampler, synthetic_expert_trajectories, ExpertDbConfig, RetrievalConfig,
};
use mapless_planner::types::EgoState;

fn main() -> mapless_planner::Result<()> {
    let raw = synthetic_expert_trajectories(100, 12, 4);
    let db = build_expert_db(&raw, &ExpertDbConfig::default())?;
    println!("{} raw trajectories -> {} entries in {} bins", raw.len(), db.len(), db.bin_count());

    let path = std::env::temp_dir().join("mapless_expert_db.bin");
    save_expert_db(&db, "example", &path)?;
    let (back, hash) = load_expert_db(&path)?;
    println!("{} ({} bytes, config {hash}) round trip equal: {}", path.display(), std::fs::metadata(&path)?.len(), back.entries == db.entries);

    // query at a stored initial state; D < 1 is narrow in curvature
    let [v, a, kappa] = back.entries[back.len() / 2].state;
    let ego = EgoState { a, kappa, ..EgoState::cruising(10.0, -4.0, 0.3, v) };
    let set = retrieval_sampler(&ego, &back, &RetrievalConfig::default());
    println!("retrieved {} candidates around v = {v:.2} m/s, a = {a:.2} m/s^2, kappa = {kappa:.4} 1/m", set.len());
    Ok(())
}
