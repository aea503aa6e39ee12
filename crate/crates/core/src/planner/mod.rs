//! Candidate selection, the safety layer, a toy generative planner and the
//! per-frame planning pipeline.

mod gan;
mod generator;
mod imitation;
mod pipeline;
mod safety;
mod select;

pub use gan::{train_gan_planner, GanConfig, GanFrame, GanReport};
pub use generator::{
    anchor_latents, gaussian_latents, planning_reference, sample_generator, Decoded, GenContext, LatentMode,
    ToyGenerator, CONTEXT_DIM, OUTPUT_DIM,
};
pub use imitation::{mean_distance, multimodal_imitation_loss};
pub use pipeline::{PlanContext, Planner, PlannerConfig, SamplerToggles};
pub use safety::{
    check_candidate, dynamic_collision, fallback_trajectory, plan_deviation, safety_layer, static_collision_step,
    AgentFootprint, SafetyConfig,
};
pub use select::{rank, select_best, PlannerDecision, RankedCandidate, SafetyVerdict};
