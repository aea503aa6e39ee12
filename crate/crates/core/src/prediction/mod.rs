//! Scene-level occupancy forecasting: kinematic agent forecasts, their
//! rasterization into a space-time prediction grid, focal-loss supervision
//! and lane-prior accumulation.

mod focal;
mod forecast;
mod grid;
mod lane_prior;

pub use focal::{focal_loss, FOCAL_EPS};
pub use forecast::{constant_velocity_forecast, forecast_agents, Forecast, ForecastConfig};
pub use grid::{ground_truth_grid, PredictionGrid};
pub use lane_prior::{accumulate_lane_prior, corridor_cells, LanePrior};
