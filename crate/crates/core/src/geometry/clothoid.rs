use crate::error::{invalid, Result};
use crate::geometry::fresnel::fresnel;
use crate::types::Point2;

/// Clothoid anchored at `start` with unit tangent `tangent`, unit normal
/// `normal` and scale `a`; curvature grows as `pi xi / a^2` towards `normal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClothoidParams {
    pub start: Point2,
    pub tangent: Point2,
    pub normal: Point2,
    pub scale: f64,
}

impl ClothoidParams {
    pub fn validate(&self) -> Result<()> {
        let norm = |v: Point2| v[0].hypot(v[1]);
        if (norm(self.tangent) - 1.0).abs() > 1e-9 || (norm(self.normal) - 1.0).abs() > 1e-9 {
            return Err(invalid("clothoid tangent and normal must be unit vectors"));
        }
        let dot = self.tangent[0] * self.normal[0] + self.tangent[1] * self.normal[1];
        if dot.abs() > 1e-9 {
            return Err(invalid("clothoid tangent and normal must be orthogonal"));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(invalid(format!("clothoid scale must be > 0, got {}", self.scale)));
        }
        if !(self.start[0].is_finite() && self.start[1].is_finite()) {
            return Err(invalid("clothoid start must be finite"));
        }
        Ok(())
    }

    /// Signed curvature (towards `normal`) at parameter `xi`.
    pub fn curvature(&self, xi: f64) -> f64 {
        std::f64::consts::PI * xi / (self.scale * self.scale)
    }

    /// Tangent angle at `xi`, measured from `tangent` towards `normal`.
    pub fn turning(&self, xi: f64) -> f64 {
        let u = xi / self.scale;
        std::f64::consts::FRAC_PI_2 * u * u
    }
}

/// Point `s(xi) = s0 + a [C(xi / a) T0 + S(xi / a) N0]`.
pub fn clothoid_point(params: &ClothoidParams, xi: f64) -> Result<Point2> {
    params.validate()?;
    let (c, s) = fresnel(xi / params.scale);
    let a = params.scale;
    Ok([
        params.start[0] + a * (c * params.tangent[0] + s * params.normal[0]),
        params.start[1] + a * (c * params.tangent[1] + s * params.normal[1]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(scale: f64) -> ClothoidParams {
        ClothoidParams { start: [1.0, -2.0], tangent: [1.0, 0.0], normal: [0.0, 1.0], scale }
    }

    #[test]
    fn origin_is_start() {
        assert_eq!(clothoid_point(&params(30.0), 0.0).unwrap(), [1.0, -2.0]);
    }

    #[test]
    fn straight_line_limit() {
        let p = params(1e6);
        let xi = 10.0;
        let q = clothoid_point(&p, xi).unwrap();
        assert!((q[0] - 11.0).abs() < 1e-6 * xi);
        assert!((q[1] + 2.0).abs() < 1e-6 * xi);
    }

    #[test]
    fn rejects_invalid_frames() {
        let mut p = params(10.0);
        p.normal = [0.0, 2.0];
        assert!(clothoid_point(&p, 1.0).is_err());
        let mut p = params(10.0);
        p.normal = [1.0, 0.0];
        assert!(clothoid_point(&p, 1.0).is_err());
        assert!(clothoid_point(&params(0.0), 1.0).is_err());
    }
}
