use serde::{Deserialize, Serialize};

use super::{fill_polygon, GridGeometry};
use crate::geometry::OrientedBox;
use crate::types::{Frame, LightState, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum CellLabel {
    Free = 0,
    Static = 1,
    Movable = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub geometry: GridGeometry,
    pub labels: Vec<CellLabel>,
}

impl OccupancyGrid {
    pub fn empty(geometry: GridGeometry) -> Self {
        Self { geometry, labels: vec![CellLabel::Free; geometry.len()] }
    }

    /// Static obstacles and red-light stop lines become static cells; the
    /// current boxes of all agents become movable cells.
    pub fn from_frame(frame: &Frame, geometry: GridGeometry) -> Self {
        let mut grid = Self::empty(geometry);
        for poly in &frame.static_obstacles {
            grid.mark_polygon(poly, CellLabel::Static);
        }
        for sl in &frame.stop_lines {
            if sl.state == LightState::Prohibited {
                grid.mark_polygon(&sl.polygon, CellLabel::Static);
            }
        }
        for agent in &frame.agents {
            if let Some(s) = agent.current() {
                let b = OrientedBox::new([s.x, s.y], s.heading, agent.length, agent.width);
                grid.mark_polygon(&b.polygon(), CellLabel::Movable);
            }
        }
        grid
    }

    /// Labels cells under `poly`. Static labels are never downgraded.
    pub fn mark_polygon(&mut self, poly: &[Point2], label: CellLabel) -> usize {
        let geom = self.geometry;
        let labels = &mut self.labels;
        fill_polygon(&geom, poly, |r, c| {
            let cell = &mut labels[geom.index(r, c)];
            if *cell != CellLabel::Static {
                *cell = label;
            }
        })
    }

    pub fn label(&self, row: usize, col: usize) -> CellLabel {
        self.labels[self.geometry.index(row, col)]
    }

    pub fn is_occupied(&self, row: usize, col: usize) -> bool {
        self.label(row, col) != CellLabel::Free
    }

    pub fn static_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.geometry.cols;
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == CellLabel::Static)
            .map(move |(i, _)| (i / cols, i % cols))
    }
}

/// Single-layer scalar field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CostField {
    pub geometry: GridGeometry,
    pub values: Vec<f64>,
}

impl CostField {
    pub fn zeros(geometry: GridGeometry) -> Self {
        Self { geometry, values: vec![0.0; geometry.len()] }
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[self.geometry.index(row, col)]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Occupied cells cost 1; free cells cost `1 - d / inflation` where `d` is
/// the center distance to the nearest occupied cell, and 0 once `d` reaches
/// the inflation distance.
pub fn occupancy_cost_field(occ: &OccupancyGrid, inflation: f64) -> CostField {
    let geom = occ.geometry;
    let mut field = CostField::zeros(geom);
    let inflation = inflation.max(0.0);
    let reach = (inflation / geom.resolution).floor() as i64;
    let (rows, cols) = (geom.rows as i64, geom.cols as i64);
    for r in 0..rows {
        for c in 0..cols {
            let idx = geom.index(r as usize, c as usize);
            if occ.labels[idx] == CellLabel::Free {
                continue;
            }
            field.values[idx] = 1.0;
            if reach == 0 {
                continue;
            }
            // Nearest occupied cells to any free cell lie on the occupied
            // boundary, so interior cells need not stamp.
            let boundary = [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().any(|(dr, dc)| {
                let (nr, nc) = (r + dr, c + dc);
                nr >= 0 && nc >= 0 && nr < rows && nc < cols && occ.labels[geom.index(nr as usize, nc as usize)] == CellLabel::Free
            });
            if !boundary {
                continue;
            }
            for dr in -reach..=reach {
                let nr = r + dr;
                if nr < 0 || nr >= rows {
                    continue;
                }
                for dc in -reach..=reach {
                    let nc = c + dc;
                    if nc < 0 || nc >= cols {
                        continue;
                    }
                    let d = ((dr * dr + dc * dc) as f64).sqrt() * geom.resolution;
                    if d >= inflation {
                        continue;
                    }
                    let cost = 1.0 - d / inflation;
                    let v = &mut field.values[geom.index(nr as usize, nc as usize)];
                    if cost > *v {
                        *v = cost;
                    }
                }
            }
        }
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> GridGeometry {
        GridGeometry::new([0.0, 0.0], 0.2, 40, 40)
    }

    #[test]
    fn free_grid_has_zero_cost() {
        let f = occupancy_cost_field(&OccupancyGrid::empty(geom()), 1.0);
        assert!(f.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_cell_without_inflation() {
        let mut occ = OccupancyGrid::empty(geom());
        occ.labels[geom().index(10, 10)] = CellLabel::Static;
        let f = occupancy_cost_field(&occ, 0.0);
        assert_eq!(f.at(10, 10), 1.0);
        assert_eq!(f.values.iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn linear_decay_with_inflation() {
        let mut occ = OccupancyGrid::empty(geom());
        occ.labels[geom().index(10, 10)] = CellLabel::Movable;
        let f = occupancy_cost_field(&occ, 1.0);
        // three cells east = 0.6 m
        assert!((f.at(10, 13) - 0.4).abs() < 1e-6);
        assert_eq!(f.at(10, 15), 0.0);
        assert!((f.at(13, 14) - 0.0).abs() < 1e-12);
        assert!(f.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
