//! Rasterizes the first frame of a built-in scenario into five PGM
//! channels. Usage: `export_raster [scenario] [out_dir]`.

use std::path::PathBuf;

use mapless_planner::raster::export::export_raster_pgm;
use mapless_planner::raster::{rasterize_scene, OccupancyGrid, RasterConfig};
use mapless_planner::simulator::builtin_scenario;
use mapless_planner::types::Frame;
use mapless_planner::Error;

fn main() -> mapless_planner::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "cut_in".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "raster_out".into()));
    let scenario = builtin_scenario(&name).ok_or_else(|| Error::InvalidInput(format!("unknown scenario {name}")))?;
    let frame = Frame::initial(&scenario);
    let geometry = frame.geometry();
    let occupancy = OccupancyGrid::from_frame(&frame, geometry);
    let raster = rasterize_scene(&frame, Some(&occupancy), geometry, &RasterConfig::default())?;
    std::fs::create_dir_all(&out)?;
    for path in export_raster_pgm(&raster, &out, &name, &name)? {
        println!("{}", path.display());
    }
    println!("shape {:?}", raster.shape());
    Ok(())
}
