//! Map-free prediction and planning stack.

pub mod cli;
pub mod error;
pub mod evaluator;
pub mod geometry;
pub mod io;
pub mod planner;
pub mod prediction;
pub mod raster;
pub mod samplers;
pub mod simulator;
pub mod time;
pub mod types;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testutil;
