use super::PredictionGrid;
use crate::error::{Error, Result};

/// Predictions are clamped to `[FOCAL_EPS, 1 - FOCAL_EPS]` before the logs.
pub const FOCAL_EPS: f64 = 1e-6;

/// Pixel-wise focal loss
/// `-sum [g (1 - p)^2 log p + (1 - g) p^2 log(1 - p)]`
/// with `g` the label and `p` the clamped prediction.
pub fn focal_loss(pred: &PredictionGrid, truth: &PredictionGrid) -> Result<f64> {
    if !pred.geometry.same_lattice(&truth.geometry) || pred.layers != truth.layers {
        return Err(Error::GeometryMismatch("prediction and label grids differ".into()));
    }
    let mut loss = 0.0;
    for (&p, &g) in pred.data.iter().zip(&truth.data) {
        let p = (p as f64).clamp(FOCAL_EPS, 1.0 - FOCAL_EPS);
        let g = g as f64;
        loss -= g * (1.0 - p).powi(2) * p.ln() + (1.0 - g) * p * p * (1.0 - p).ln();
    }
    Ok(loss.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::GridGeometry;

    fn geom() -> GridGeometry {
        GridGeometry::new([0.0, 0.0], 0.2, 4, 4)
    }

    #[test]
    fn zeros_against_zeros() {
        let z = PredictionGrid::zeros(geom());
        let l = focal_loss(&z, &z).unwrap();
        assert!(l <= 1e-10 * z.data.len() as f64);
    }

    #[test]
    fn single_cell_hand_value() {
        let mut pred = PredictionGrid::zeros(geom());
        let mut truth = PredictionGrid::zeros(geom());
        pred.set(0, 1, 1, 0.5);
        truth.set(0, 1, 1, 1.0);
        let l = focal_loss(&pred, &truth).unwrap();
        let rest = (truth.data.len() - 1) as f64 * FOCAL_EPS.powi(2) * -(1.0 - FOCAL_EPS).ln();
        assert!((l - rest - (-0.25 * 0.5f64.ln())).abs() < 1e-9);
        assert!((l - 0.1733).abs() < 1e-4);
    }

    #[test]
    fn mismatched_geometry() {
        let a = PredictionGrid::zeros(geom());
        let b = PredictionGrid::zeros(GridGeometry::new([0.0, 0.0], 0.2, 4, 5));
        assert!(focal_loss(&a, &b).is_err());
    }
}
