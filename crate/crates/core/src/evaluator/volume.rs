use serde::{Deserialize, Serialize};

use super::features::{feature, FeaturePlanes, FEATURE_COUNT};
use super::field::Field;
use crate::raster::GridGeometry;
use crate::time::HORIZON_STEPS;

/// Linear cost model: the volume is `w . features`, and a trajectory's
/// energy adds `alpha` times its occupancy and `beta` times its prediction
/// samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModel {
    pub weights: [f64; FEATURE_COUNT],
    pub alpha: f64,
    pub beta: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self { weights: [4.0, 4.0, 1.0, 1.0, 2.0, 0.0], alpha: 1.0, beta: 1.0 }
    }
}

impl CostModel {
    pub fn zeros() -> Self {
        Self { weights: [0.0; FEATURE_COUNT], ..Self::default() }
    }

    /// `w . sums + alpha * sums[occ] + beta * sums[pred]`.
    pub fn energy(&self, sums: &[f64; FEATURE_COUNT]) -> f64 {
        self.volume_term(sums) + self.fixed_term(sums)
    }

    pub fn volume_term(&self, sums: &[f64; FEATURE_COUNT]) -> f64 {
        self.weights.iter().zip(sums).map(|(w, s)| w * s).sum()
    }

    /// The part of the energy that does not depend on the weights.
    pub fn fixed_term(&self, sums: &[f64; FEATURE_COUNT]) -> f64 {
        self.alpha * sums[feature::OCCUPANCY] + self.beta * sums[feature::PREDICTION]
    }

    pub fn is_valid(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite()) && self.alpha >= 0.0 && self.beta >= 0.0
    }
}

/// Cost volume evaluated cell by cell on demand.
#[derive(Debug, Clone, Copy)]
pub struct LinearVolume<'a> {
    pub model: &'a CostModel,
    pub planes: &'a FeaturePlanes,
}

impl Field for LinearVolume<'_> {
    fn geometry(&self) -> GridGeometry {
        self.planes.geometry
    }
    fn cell(&self, layer: usize, row: usize, col: usize) -> f64 {
        let f = self.planes.cell_features(layer, row, col);
        self.model.weights.iter().zip(&f).map(|(w, x)| w * x).sum()
    }
    fn boundary(&self) -> f64 {
        let f = self.planes.boundary_features();
        self.model.weights.iter().zip(&f).map(|(w, x)| w * x).sum()
    }
}

/// Materialized space-time cost volume, layer-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVolume {
    pub geometry: GridGeometry,
    pub layers: usize,
    pub data: Vec<f64>,
    boundary: f64,
}

impl CostVolume {
    pub fn at(&self, layer: usize, row: usize, col: usize) -> f64 {
        self.data[layer * self.geometry.len() + self.geometry.index(row, col)]
    }

    pub fn layer(&self, layer: usize) -> &[f64] {
        let n = self.geometry.len();
        &self.data[layer * n..(layer + 1) * n]
    }
}

impl Field for CostVolume {
    fn geometry(&self) -> GridGeometry {
        self.geometry
    }
    fn cell(&self, layer: usize, row: usize, col: usize) -> f64 {
        self.at(layer, row, col)
    }
    fn boundary(&self) -> f64 {
        self.boundary
    }
}

/// `C(i, j, t) = w . features(i, j, t)` over all 30 layers.
pub fn cost_volume(model: &CostModel, planes: &FeaturePlanes) -> CostVolume {
    let geom = planes.geometry;
    let n = geom.len();
    let mut data = vec![0.0; HORIZON_STEPS * n];
    let w = &model.weights;
    for row in 0..geom.rows {
        for col in 0..geom.cols {
            let idx = geom.index(row, col);
            let (rd, lat, s) = planes.route.static_features(geom.cell_center(row, col));
            let occ = planes.occupancy.at(row, col);
            let fixed = w[feature::OCCUPANCY] * occ
                + w[feature::ROUTE_DISTANCE] * rd
                + w[feature::LATERAL_OFFSET] * lat
                + w[feature::BIAS];
            for layer in 0..HORIZON_STEPS {
                let pred = planes.prediction.at(layer, row, col) as f64;
                data[layer * n + idx] =
                    fixed + w[feature::PREDICTION] * pred + w[feature::PROGRESS] * planes.route.progress(layer, s);
            }
        }
    }
    let boundary = LinearVolume { model, planes }.boundary();
    CostVolume { geometry: geom, layers: HORIZON_STEPS, data, boundary }
}
