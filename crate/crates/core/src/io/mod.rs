//! File formats: scenarios, models, expert databases, traces and run configuration.

pub mod config;
pub mod dataset;
pub mod expert_db;
pub mod model;
pub mod scenario;
pub mod trace;

pub use config::*;
pub use dataset::*;
pub use expert_db::*;
pub use model::*;
pub use scenario::*;
pub use trace::*;
