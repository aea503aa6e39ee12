//! Rule-structured trajectory generators: curve primitives, retrieval from
//! an expert library, and a Frenet lattice guided by an s-t graph, plus the
//! kinematic feasibility filter they share.

pub mod curve;
pub mod expert_db;
pub mod filter;
pub mod kdtree;
pub mod lattice;
pub mod retrieval;
pub mod st_graph;
pub mod synthetic;

pub use curve::{curve_sampler, CurveConfig};
pub use expert_db::{build_expert_db, initial_state, BinKey, DbEntry, ExpertDbConfig, ExpertTrajectoryDb};
pub use filter::{kinematic_filter, kinematic_profile, KinematicLimits};
pub use kdtree::KdTree;
pub use lattice::{lattice_sampler, LatticeConfig};
pub use retrieval::{retrieval_sampler, RetrievalConfig};
pub use st_graph::{build_st_graph, StConfig, StGraph, StLabel, StObstacle};
pub use synthetic::synthetic_expert_trajectories;
