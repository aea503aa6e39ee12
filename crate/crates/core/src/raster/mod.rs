//! Bird's-eye-view rasterization and occupancy grids.

mod bev;
pub mod export;
mod fill;
mod grid;
mod occupancy;

pub use bev::{history_brightness, rasterize_scene, BevRaster, Channel, RasterConfig, CHANNEL_COUNT};
pub use fill::{fill_polygon, trace_polyline};
pub use grid::GridGeometry;
pub use occupancy::{occupancy_cost_field, CellLabel, CostField, OccupancyGrid};
