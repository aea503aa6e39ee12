use crate::prediction::PredictionGrid;
use crate::raster::{CostField, GridGeometry};
use crate::time::layer_for_time;

/// A scalar field over grid cells, optionally varying per horizon layer.
pub trait Field {
    fn geometry(&self) -> GridGeometry;
    /// Value of cell `(row, col)` at horizon layer `layer`.
    fn cell(&self, layer: usize, row: usize, col: usize) -> f64;
    /// Returned for points outside the grid; the largest value the field
    /// can take unless stated otherwise.
    fn boundary(&self) -> f64;
}

impl Field for CostField {
    fn geometry(&self) -> GridGeometry {
        self.geometry
    }
    fn cell(&self, _layer: usize, row: usize, col: usize) -> f64 {
        self.at(row, col)
    }
    fn boundary(&self) -> f64 {
        self.max_value()
    }
}

impl Field for PredictionGrid {
    fn geometry(&self) -> GridGeometry {
        self.geometry
    }
    fn cell(&self, layer: usize, row: usize, col: usize) -> f64 {
        self.at(layer, row, col) as f64
    }
    fn boundary(&self) -> f64 {
        self.max_value()
    }
}

/// Result of [`sample_soft`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftSample {
    pub value: f64,
    /// `(d value / dx, d value / dy)`.
    pub grad: [f64; 2],
    /// Set when the point fell outside the hull of cell centers.
    pub out_of_extent: bool,
}

/// Bilinear interpolation weights for `p`: the lower-left cell and the
/// fractional offsets towards the next row and column, or `None` outside
/// the hull of cell centers.
pub(crate) fn bilinear_stencil(geom: &GridGeometry, p: [f64; 2]) -> Option<(usize, usize, f64, f64)> {
    let (fr, fc) = geom.fractional(p);
    let max_r = geom.rows.saturating_sub(1) as f64;
    let max_c = geom.cols.saturating_sub(1) as f64;
    if !(fr >= 0.0 && fc >= 0.0 && fr <= max_r && fc <= max_c) || geom.rows < 2 || geom.cols < 2 {
        return None;
    }
    let r0 = (fr.floor() as usize).min(geom.rows - 2);
    let c0 = (fc.floor() as usize).min(geom.cols - 2);
    Some((r0, c0, fr - r0 as f64, fc - c0 as f64))
}

/// Bilinear sample of `field` at `(x, y)` on the layer nearest to `t`,
/// with its analytic spatial gradient. Rows grow with `y`, columns with
/// `x`. Outside the grid the field's boundary value is returned with a
/// zero gradient and the flag set.
pub fn sample_soft(field: &dyn Field, x: f64, y: f64, t: f64) -> SoftSample {
    let geom = field.geometry();
    let layer = layer_for_time(t);
    let Some((r0, c0, u, v)) = bilinear_stencil(&geom, [x, y]) else {
        return SoftSample { value: field.boundary(), grad: [0.0, 0.0], out_of_extent: true };
    };
    let f00 = field.cell(layer, r0, c0);
    let f01 = field.cell(layer, r0, c0 + 1);
    let f10 = field.cell(layer, r0 + 1, c0);
    let f11 = field.cell(layer, r0 + 1, c0 + 1);
    let value = f00 * (1.0 - u) * (1.0 - v) + f01 * (1.0 - u) * v + f10 * u * (1.0 - v) + f11 * u * v;
    let d_col = (f01 - f00) * (1.0 - u) + (f11 - f10) * u;
    let d_row = (f10 - f00) * (1.0 - v) + (f11 - f01) * v;
    let inv = 1.0 / geom.resolution;
    SoftSample { value, grad: [d_col * inv, d_row * inv], out_of_extent: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> CostField {
        let geom = GridGeometry::new([0.0, 0.0], 0.5, 2, 2);
        let mut f = CostField::zeros(geom);
        f.values = vec![0.0, 1.0, 0.0, 1.0];
        f
    }

    #[test]
    fn cell_centers_exact() {
        let f = field();
        assert_eq!(sample_soft(&f, 0.5, 0.0, 0.1).value, 1.0);
        assert_eq!(sample_soft(&f, 0.0, 0.5, 0.1).value, 0.0);
    }

    #[test]
    fn midpoint_and_gradient() {
        let f = field();
        let s = sample_soft(&f, 0.25, 0.25, 0.1);
        assert!((s.value - 0.5).abs() < 1e-12);
        assert!((s.grad[0] - 2.0).abs() < 1e-12 && s.grad[1].abs() < 1e-12);
    }

    #[test]
    fn outside_is_flagged() {
        let f = field();
        let s = sample_soft(&f, -1.0, 0.0, 0.1);
        assert!(s.out_of_extent && s.value == 1.0 && s.grad == [0.0, 0.0]);
    }
}
