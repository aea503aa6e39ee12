use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::geometry::OrientedBox;
use crate::raster::{export::write_pgm, fill_polygon, GridGeometry};
use crate::time::HORIZON_STEPS;
use crate::types::Trajectory;

/// Per-timestep occupancy probabilities; layer `k` holds `t = 0.1 (k + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionGrid {
    pub geometry: GridGeometry,
    pub layers: usize,
    pub data: Vec<f32>,
}

impl PredictionGrid {
    pub fn zeros(geometry: GridGeometry) -> Self {
        Self { geometry, layers: HORIZON_STEPS, data: vec![0.0; HORIZON_STEPS * geometry.len()] }
    }

    #[inline]
    pub fn at(&self, layer: usize, row: usize, col: usize) -> f32 {
        self.data[layer * self.geometry.len() + self.geometry.index(row, col)]
    }

    pub fn set(&mut self, layer: usize, row: usize, col: usize, value: f32) {
        let i = layer * self.geometry.len() + self.geometry.index(row, col);
        self.data[i] = value;
    }

    pub fn layer(&self, layer: usize) -> &[f32] {
        let n = self.geometry.len();
        &self.data[layer * n..(layer + 1) * n]
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(0.0f32, f32::max) as f64
    }

    /// One graymap per timestep, `<stem>_t<k>.pgm`.
    pub fn export_pgm(&self, dir: &Path, stem: &str, comment: &str) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        (0..self.layers)
            .map(|k| {
                let path = dir.join(format!("{stem}_t{:02}.pgm", k + 1));
                write_pgm(&path, &self.geometry, self.layer(k), comment)?;
                Ok(path)
            })
            .collect()
    }
}

/// Cell `(i, j, t)` is 1 when any agent box at step `t` covers its center.
/// `sizes[i]` is the `(length, width)` of the agent following `futures[i]`.
pub fn ground_truth_grid(futures: &[Trajectory], sizes: &[(f64, f64)], geometry: GridGeometry) -> PredictionGrid {
    let mut grid = PredictionGrid::zeros(geometry);
    let n = geometry.len();
    for (traj, &(length, width)) in futures.iter().zip(sizes) {
        for (k, w) in traj.waypoints.iter().enumerate().take(HORIZON_STEPS) {
            let poly = OrientedBox::new([w.x, w.y], w.heading, length, width).polygon();
            let layer = &mut grid.data[k * n..(k + 1) * n];
            fill_polygon(&geometry, &poly, |r, c| layer[geometry.index(r, c)] = 1.0);
        }
    }
    grid
}
