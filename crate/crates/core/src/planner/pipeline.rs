use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::generator::{planning_reference, sample_generator, GenContext, LatentMode, ToyGenerator};
use super::safety::{fallback_trajectory, safety_layer, AgentFootprint, SafetyConfig};
use super::select::{rank, select_best, PlannerDecision};
use crate::error::Result;
use crate::evaluator::{build_feature_planes, CostModel, FeatureConfig, FeaturePlanes};
use crate::geometry::{FrenetState, ReferenceLine};
use crate::prediction::{forecast_agents, Forecast, ForecastConfig};
use crate::raster::{occupancy_cost_field, OccupancyGrid};
use crate::samplers::{
    build_st_graph, curve_sampler, lattice_sampler, retrieval_sampler, CurveConfig, ExpertTrajectoryDb,
    LatticeConfig, RetrievalConfig, StConfig, StGraph,
};
use crate::types::{CandidateSet, Frame, LightState, Polygon, Trajectory};

/// Which trajectory sources feed the evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerToggles {
    pub curve: bool,
    pub retrieval: bool,
    pub lattice: bool,
    /// Generator with fixed latent anchors.
    pub imitation: bool,
    /// Generator with Gaussian latents.
    pub gan: bool,
}

impl Default for SamplerToggles {
    fn default() -> Self {
        Self { curve: true, retrieval: false, lattice: true, imitation: false, gan: false }
    }
}

impl SamplerToggles {
    pub const NONE: Self = Self { curve: false, retrieval: false, lattice: false, imitation: false, gan: false };

    /// Parses a `+`-joined list such as `lattice+curve`; `none` disables all.
    pub fn parse(spec: &str) -> Option<Self> {
        let mut t = Self::NONE;
        for part in spec.split('+').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "curve" => t.curve = true,
                "retrieval" => t.retrieval = true,
                "lattice" => t.lattice = true,
                "imitation" => t.imitation = true,
                "gan" => t.gan = true,
                "none" => {}
                _ => return None,
            }
        }
        Some(t)
    }

    pub fn label(&self) -> String {
        let names: Vec<&str> = [
            (self.curve, "curve"),
            (self.retrieval, "retrieval"),
            (self.lattice, "lattice"),
            (self.imitation, "imitation"),
            (self.gan, "gan"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        if names.is_empty() {
            "none".into()
        } else {
            names.join("+")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub samplers: SamplerToggles,
    pub curve: CurveConfig,
    pub retrieval: RetrievalConfig,
    pub lattice: LatticeConfig,
    pub st: StConfig,
    pub features: FeatureConfig,
    pub safety: SafetyConfig,
    /// Occupancy cost falloff distance, m.
    pub inflation: f64,
    /// Generator draws per frame.
    pub generator_modes: usize,
    /// Gap left in front of static obstacles and red stop lines, m.
    pub stop_margin: f64,
    pub seed: u64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            samplers: SamplerToggles::default(),
            curve: CurveConfig::default(),
            retrieval: RetrievalConfig::default(),
            lattice: LatticeConfig::default(),
            st: StConfig::default(),
            features: FeatureConfig::default(),
            safety: SafetyConfig::default(),
            inflation: 1.0,
            generator_modes: 8,
            stop_margin: 1.0,
            seed: 7,
        }
    }
}

/// Everything derived from a frame before any candidate is generated.
#[derive(Debug, Clone)]
pub struct PlanContext {
    pub occupancy: OccupancyGrid,
    pub forecast: Forecast,
    pub footprints: Vec<AgentFootprint>,
    pub planes: FeaturePlanes,
    pub reference: ReferenceLine,
    pub init: FrenetState,
    pub st: StGraph,
}

/// The per-frame planner: samplers, evaluator and safety layer.
#[derive(Debug, Clone)]
pub struct Planner {
    pub config: PlannerConfig,
    pub model: CostModel,
    pub expert_db: Option<ExpertTrajectoryDb>,
    pub generator: Option<ToyGenerator>,
}

impl Planner {
    pub fn new(config: PlannerConfig, model: CostModel) -> Self {
        Self { config, model, expert_db: None, generator: None }
    }

    pub fn prepare(&self, frame: &Frame) -> Result<PlanContext> {
        let geometry = frame.geometry();
        let occupancy = OccupancyGrid::from_frame(frame, geometry);
        let cost = Arc::new(occupancy_cost_field(&occupancy, self.config.inflation));
        let forecast = forecast_agents(&frame.agents, &frame.landmarks, geometry, &ForecastConfig::default())?;
        let present: Vec<_> = frame.agents.iter().filter(|a| a.current().is_some()).collect();
        let footprints: Vec<AgentFootprint> = forecast
            .trajectories
            .iter()
            .zip(&present)
            .map(|(t, a)| AgentFootprint { trajectory: t.clone(), length: a.length, width: a.width })
            .collect();
        let prediction = Arc::new(forecast.grid.clone());
        let planes = build_feature_planes(None, cost, prediction, &frame.route, &frame.ego, self.config.features)?;
        let reference = planning_reference(&frame.route, &frame.ego)?;
        let e = &frame.ego;
        let init = reference.frenet_state_of(e.x, e.y, e.heading, e.v, e.a, e.kappa);
        let sizes: Vec<(f64, f64)> = footprints.iter().map(|f| (f.length, f.width)).collect();
        let st = build_st_graph(&reference, &forecast.trajectories, &sizes, frame.ego_size, e.v, &self.config.st);
        Ok(PlanContext { occupancy, forecast, footprints, planes, reference, init, st })
    }

    /// Stop distances ahead of the ego for static obstacles and red stop
    /// lines that block the reference corridor.
    pub fn stop_distances(&self, frame: &Frame, ctx: &PlanContext) -> Vec<f64> {
        let half_width = 0.5 * frame.ego_size.width + self.config.st.lateral_margin;
        let lead = 0.5 * frame.ego_size.length + self.config.stop_margin;
        let red = frame.stop_lines.iter().filter(|s| s.state == LightState::Prohibited).map(|s| &s.polygon);
        let blockers: Vec<&Polygon> = frame.static_obstacles.iter().chain(red).collect();
        let mut out = Vec::new();
        for poly in blockers {
            let (mut s_lo, mut l_lo, mut l_hi) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for p in poly {
                let (s, l, _) = ctx.reference.project(*p);
                s_lo = s_lo.min(s);
                l_lo = l_lo.min(l);
                l_hi = l_hi.max(l);
            }
            let d = s_lo - ctx.init.s - lead;
            if l_hi >= -half_width && l_lo <= half_width && d > 0.0 {
                out.push(d);
            }
        }
        out
    }

    /// Candidates from every enabled sampler. `step` varies the Gaussian
    /// latent draws between frames while keeping runs reproducible.
    pub fn candidates(&self, frame: &Frame, ctx: &PlanContext, step: u64) -> Result<CandidateSet> {
        let cfg = &self.config;
        let on = cfg.samplers;
        let mut set = CandidateSet::new();
        if on.curve {
            set.extend(curve_sampler(&frame.ego, &cfg.curve));
        }
        if on.retrieval {
            if let Some(db) = &self.expert_db {
                set.extend(retrieval_sampler(&frame.ego, db, &cfg.retrieval));
            }
        }
        if on.lattice {
            let mut lattice = cfg.lattice.clone();
            lattice.stop_distances.extend(self.stop_distances(frame, ctx));
            set.extend(lattice_sampler(&ctx.init, &ctx.reference, &ctx.st, frame.route.target_speed, &lattice));
        }
        if on.imitation || on.gan {
            if let Some(gen) = &self.generator {
                let gctx = GenContext::new(&frame.ego, &frame.route)?;
                if on.imitation {
                    set.extend(sample_generator(gen, &gctx, cfg.generator_modes, LatentMode::Anchors, 0));
                }
                if on.gan {
                    let seed = cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(step);
                    set.extend(sample_generator(gen, &gctx, cfg.generator_modes, LatentMode::Gaussian, seed));
                }
            }
        }
        Ok(set)
    }

    /// Ranks `set` and runs the safety layer. An empty set goes straight to
    /// the fallback.
    pub fn decide(
        &self,
        frame: &Frame,
        ctx: &PlanContext,
        set: &CandidateSet,
        previous: Option<&Trajectory>,
    ) -> Result<PlannerDecision> {
        let ranked = if set.is_empty() {
            let chosen = fallback_trajectory(&frame.ego, self.config.safety.fallback_decel);
            PlannerDecision { chosen, chosen_rank: None, ranked: rank(Vec::new()), fallback: true, consistency: None }
        } else {
            select_best(set, &self.model, &ctx.planes)?
        };
        Ok(safety_layer(
            ranked,
            &frame.ego,
            frame.ego_size,
            &ctx.occupancy,
            &ctx.footprints,
            previous,
            &self.config.safety,
        ))
    }

    /// One planning cycle: a pure function of the frame, the models and the
    /// previous plan.
    pub fn plan(&self, frame: &Frame, previous: Option<&Trajectory>, step: u64) -> Result<PlannerDecision> {
        let ctx = self.prepare(frame)?;
        let set = self.candidates(frame, &ctx, step)?;
        self.decide(frame, &ctx, &set, previous)
    }
}
