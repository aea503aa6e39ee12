use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::types::Point2;

/// Axis-aligned cell lattice. Cell `(row, col)` is centered at
/// `origin + (col, row) * resolution`; rows grow northwards, columns eastwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub origin: Point2,
    pub resolution: f64,
    pub rows: usize,
    pub cols: usize,
}

impl GridGeometry {
    pub fn new(origin: Point2, resolution: f64, rows: usize, cols: usize) -> Self {
        Self { origin, resolution, rows, cols }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn cell_center(&self, row: usize, col: usize) -> Point2 {
        [
            self.origin[0] + col as f64 * self.resolution,
            self.origin[1] + row as f64 * self.resolution,
        ]
    }

    /// Continuous `(row, col)` coordinates; cell centers are integers.
    #[inline]
    pub fn fractional(&self, p: Point2) -> (f64, f64) {
        ((p[1] - self.origin[1]) / self.resolution, (p[0] - self.origin[0]) / self.resolution)
    }

    /// Cell whose center is nearest to `p`.
    pub fn world_to_cell(&self, p: Point2) -> Result<(usize, usize)> {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(invalid(format!("non-finite point ({}, {})", p[0], p[1])));
        }
        let (fr, fc) = self.fractional(p);
        let row = fr.round() as i64;
        let col = fc.round() as i64;
        if row < 0 || col < 0 || row >= self.rows as i64 || col >= self.cols as i64 {
            return Err(Error::OutOfBounds { row, col });
        }
        Ok((row as usize, col as usize))
    }

    pub fn cell_to_world(&self, row: usize, col: usize) -> Result<Point2> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::OutOfBounds { row: row as i64, col: col as i64 });
        }
        Ok(self.cell_center(row, col))
    }

    /// Inclusive index ranges of cells whose centers fall inside the
    /// axis-aligned box `[lo, hi]`, or `None` if there are none.
    pub fn cell_range(&self, lo: Point2, hi: Point2) -> Option<((usize, usize), (usize, usize))> {
        let (r0, c0) = self.fractional(lo);
        let (r1, c1) = self.fractional(hi);
        let r0 = r0.ceil().max(0.0);
        let c0 = c0.ceil().max(0.0);
        let r1 = r1.floor().min(self.rows as f64 - 1.0);
        let c1 = c1.floor().min(self.cols as f64 - 1.0);
        if r0 > r1 || c0 > c1 || !(r0.is_finite() && r1.is_finite() && c0.is_finite() && c1.is_finite()) {
            return None;
        }
        Some(((r0 as usize, r1 as usize), (c0 as usize, c1 as usize)))
    }

    /// Whether `p` lies between the outermost cell centers.
    pub fn contains(&self, p: Point2) -> bool {
        let (fr, fc) = self.fractional(p);
        fr >= 0.0 && fc >= 0.0 && fr <= (self.rows - 1) as f64 && fc <= (self.cols - 1) as f64
    }

    pub fn same_lattice(&self, other: &GridGeometry) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && (self.resolution - other.resolution).abs() < 1e-12
            && (self.origin[0] - other.origin[0]).abs() < 1e-9
            && (self.origin[1] - other.origin[1]).abs() < 1e-9
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> GridGeometry {
        GridGeometry::new([-10.0, -5.0], 0.2, 50, 100)
    }

    #[test]
    fn origin_maps_to_first_cell() {
        assert_eq!(geom().world_to_cell([-10.0, -5.0]).unwrap(), (0, 0));
        assert_eq!(geom().world_to_cell([-9.8, -5.0]).unwrap(), (0, 1));
        assert_eq!(geom().world_to_cell([-10.0, -4.8]).unwrap(), (1, 0));
    }

    #[test]
    fn distinguishes_out_of_bounds_from_invalid() {
        assert!(matches!(geom().world_to_cell([-20.0, 0.0]), Err(Error::OutOfBounds { .. })));
        assert!(matches!(geom().world_to_cell([f64::NAN, 0.0]), Err(Error::InvalidInput(_))));
    }
}
