use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::field::{bilinear_stencil, Field};
use crate::error::{Error, Result};
use crate::geometry::ReferenceLine;
use crate::prediction::PredictionGrid;
use crate::raster::{BevRaster, CostField, GridGeometry};
use crate::time::{layer_for_time, waypoint_time};
use crate::types::{EgoState, Route, Trajectory};

pub const FEATURE_COUNT: usize = 6;
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] =
    ["occupancy", "prediction", "route_distance", "lateral_offset", "progress", "bias"];

/// Index of each feature plane.
pub mod feature {
    pub const OCCUPANCY: usize = 0;
    pub const PREDICTION: usize = 1;
    pub const ROUTE_DISTANCE: usize = 2;
    pub const LATERAL_OFFSET: usize = 3;
    pub const PROGRESS: usize = 4;
    pub const BIAS: usize = 5;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Distance at which the route-distance feature saturates, m.
    pub route_scale: f64,
    /// Offset at which the squared lateral feature saturates, m.
    pub lateral_scale: f64,
    /// Station error at which the progress feature saturates, m.
    pub progress_scale: f64,
    /// Acceleration used to ramp the progress target to the target speed.
    pub progress_accel: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self { route_scale: 10.0, lateral_scale: 3.5, progress_scale: 20.0, progress_accel: 2.0 }
    }
}

/// Route-derived planes, computed per cell on demand.
#[derive(Debug, Clone)]
pub struct RouteFeatures {
    pub reference: ReferenceLine,
    /// Target station at each horizon layer.
    pub progress_target: Vec<f64>,
    pub config: FeatureConfig,
}

/// How far past its last point a route is extended straight so that any
/// plan from speed `speed` stays alongside it.
pub fn route_extension(speed: f64) -> f64 {
    60.0 + crate::time::HORIZON * (speed.max(0.0) + 10.0)
}

impl RouteFeatures {
    pub fn new(route: &Route, ego: &EgoState, config: FeatureConfig) -> Result<Self> {
        let reach = route_extension(ego.v.max(route.target_speed));
        let reference = ReferenceLine::new(route.points.clone())?.extended(reach);
        let (s0, _, _) = reference.project([ego.x, ego.y]);
        let v0 = ego.v.max(0.0);
        let vt = route.target_speed;
        let acc = config.progress_accel.max(1e-6);
        let t_ramp = (vt - v0).abs() / acc;
        let sign = (vt - v0).signum();
        let progress_target = (1..=crate::time::HORIZON_STEPS)
            .map(|k| {
                let t = waypoint_time(k);
                if t <= t_ramp {
                    s0 + v0 * t + 0.5 * sign * acc * t * t
                } else {
                    s0 + v0 * t_ramp + 0.5 * sign * acc * t_ramp * t_ramp + vt * (t - t_ramp)
                }
            })
            .collect();
        Ok(Self { reference, progress_target, config })
    }

    /// `(route_distance, lateral_offset, station)` at point `p`.
    pub fn static_features(&self, p: [f64; 2]) -> (f64, f64, f64) {
        let (s, l, _) = self.reference.project(p);
        let c = &self.config;
        ((l.abs() / c.route_scale).min(1.0), ((l / c.lateral_scale).powi(2)).min(1.0), s)
    }

    /// Progress feature of station `s` at horizon layer `layer`.
    pub fn progress(&self, layer: usize, s: f64) -> f64 {
        ((self.progress_target[layer] - s).abs() / self.config.progress_scale).min(1.0)
    }

    /// `(route_distance, lateral_offset, progress)` at point `p`, layer `layer`.
    pub fn at(&self, layer: usize, p: [f64; 2]) -> [f64; 3] {
        let (rd, lat, s) = self.static_features(p);
        [rd, lat, self.progress(layer, s)]
    }
}

/// The per-timestep feature planes a cost model combines linearly.
#[derive(Debug, Clone)]
pub struct FeaturePlanes {
    pub geometry: GridGeometry,
    pub occupancy: Arc<CostField>,
    pub prediction: Arc<PredictionGrid>,
    pub route: Arc<RouteFeatures>,
    boundary: [f64; FEATURE_COUNT],
}

/// Features of one waypoint with their spatial gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureSample {
    pub values: [f64; FEATURE_COUNT],
    pub grads: [[f64; 2]; FEATURE_COUNT],
    pub out_of_extent: bool,
}

/// Assembles the feature planes. All grids must share one lattice.
pub fn build_feature_planes(
    raster: Option<&BevRaster>,
    occupancy: Arc<CostField>,
    prediction: Arc<PredictionGrid>,
    route: &Route,
    ego: &EgoState,
    config: FeatureConfig,
) -> Result<FeaturePlanes> {
    let geometry = occupancy.geometry;
    if !prediction.geometry.same_lattice(&geometry) || raster.is_some_and(|r| !r.geometry.same_lattice(&geometry)) {
        return Err(Error::GeometryMismatch("feature inputs use different grids".into()));
    }
    let route = Arc::new(RouteFeatures::new(route, ego, config)?);
    let boundary = [occupancy.max_value(), prediction.max_value(), 1.0, 1.0, 1.0, 1.0];
    Ok(FeaturePlanes { geometry, occupancy, prediction, route, boundary })
}

impl FeaturePlanes {
    /// Every feature at cell `(row, col)` of layer `layer`.
    pub fn cell_features(&self, layer: usize, row: usize, col: usize) -> [f64; FEATURE_COUNT] {
        let [rd, lat, prog] = self.route.at(layer, self.geometry.cell_center(row, col));
        [
            self.occupancy.at(row, col),
            self.prediction.at(layer, row, col) as f64,
            rd,
            lat,
            prog,
            1.0,
        ]
    }

    /// Per-feature values returned outside the grid: the largest value
    /// each plane can take.
    pub fn boundary_features(&self) -> [f64; FEATURE_COUNT] {
        self.boundary
    }

    /// Bilinear feature sample at `(x, y)` on the layer nearest `t`.
    pub fn sample(&self, x: f64, y: f64, t: f64) -> FeatureSample {
        let layer = layer_for_time(t);
        let Some((r0, c0, u, v)) = bilinear_stencil(&self.geometry, [x, y]) else {
            return FeatureSample {
                values: self.boundary_features(),
                grads: [[0.0; 2]; FEATURE_COUNT],
                out_of_extent: true,
            };
        };
        let f00 = self.cell_features(layer, r0, c0);
        let f01 = self.cell_features(layer, r0, c0 + 1);
        let f10 = self.cell_features(layer, r0 + 1, c0);
        let f11 = self.cell_features(layer, r0 + 1, c0 + 1);
        let inv = 1.0 / self.geometry.resolution;
        let mut values = [0.0; FEATURE_COUNT];
        let mut grads = [[0.0; 2]; FEATURE_COUNT];
        for i in 0..FEATURE_COUNT {
            values[i] = f00[i] * (1.0 - u) * (1.0 - v) + f01[i] * (1.0 - u) * v + f10[i] * u * (1.0 - v) + f11[i] * u * v;
            grads[i] = [
                ((f01[i] - f00[i]) * (1.0 - u) + (f11[i] - f10[i]) * u) * inv,
                ((f10[i] - f00[i]) * (1.0 - v) + (f11[i] - f01[i]) * v) * inv,
            ];
        }
        FeatureSample { values, grads, out_of_extent: false }
    }

    /// Samples at the 30 waypoints.
    pub fn trajectory_samples(&self, traj: &Trajectory) -> Vec<FeatureSample> {
        traj.waypoints.iter().map(|w| self.sample(w.x, w.y, w.t)).collect()
    }

    /// Feature totals over the waypoints and whether any left the grid.
    pub fn feature_sums(&self, traj: &Trajectory) -> ([f64; FEATURE_COUNT], bool) {
        let mut sums = [0.0; FEATURE_COUNT];
        let mut out = false;
        for s in self.trajectory_samples(traj) {
            for i in 0..FEATURE_COUNT {
                sums[i] += s.values[i];
            }
            out |= s.out_of_extent;
        }
        (sums, out)
    }

    /// One feature as a standalone field.
    pub fn plane(&self, index: usize) -> FeaturePlane<'_> {
        assert!(index < FEATURE_COUNT, "feature index out of range");
        FeaturePlane { planes: self, index }
    }
}

/// View of a single feature plane.
#[derive(Debug, Clone, Copy)]
pub struct FeaturePlane<'a> {
    planes: &'a FeaturePlanes,
    index: usize,
}

impl Field for FeaturePlane<'_> {
    fn geometry(&self) -> GridGeometry {
        self.planes.geometry
    }
    fn cell(&self, layer: usize, row: usize, col: usize) -> f64 {
        self.planes.cell_features(layer, row, col)[self.index]
    }
    fn boundary(&self) -> f64 {
        self.planes.boundary_features()[self.index]
    }
}
