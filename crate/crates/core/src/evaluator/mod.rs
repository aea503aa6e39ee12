//! Space-time cost evaluation: feature planes, a linear cost model and its
//! volume, soft sampling along trajectories, the Diff margin and
//! max-margin training.

mod cost;
mod features;
mod field;
mod train;
mod volume;

pub use cost::{diff_metric, energy_with_gradient, evaluate, l2_sum, trajectory_cost, CostBreakdown, WaypointCost};
pub use features::{
    build_feature_planes, feature, route_extension, FeatureConfig, FeaturePlane, FeaturePlanes, FeatureSample, RouteFeatures,
    FEATURE_COUNT, FEATURE_NAMES,
};
pub use field::{sample_soft, Field, SoftSample};
pub use train::{max_margin_loss, train_cost_model, ScoredCandidate, TrainConfig, TrainReport, TrainingFrame};
pub use volume::{cost_volume, CostModel, CostVolume, LinearVolume};
