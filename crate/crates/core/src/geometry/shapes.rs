//! Oriented boxes and convex-polygon overlap tests.

use crate::types::{Point2, Polygon};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: Point2,
    pub heading: f64,
    pub length: f64,
    pub width: f64,
}

impl OrientedBox {
    pub fn new(center: Point2, heading: f64, length: f64, width: f64) -> Self {
        Self { center, heading, length, width }
    }

    /// Same box grown by `longitudinal` meters at each end and `lateral`
    /// meters on each side.
    pub fn inflated(&self, longitudinal: f64, lateral: f64) -> Self {
        Self { length: self.length + 2.0 * longitudinal, width: self.width + 2.0 * lateral, ..*self }
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Point2; 4] {
        let (s, c) = self.heading.sin_cos();
        let hl = 0.5 * self.length;
        let hw = 0.5 * self.width;
        let at = |dx: f64, dy: f64| [self.center[0] + c * dx - s * dy, self.center[1] + s * dx + c * dy];
        [at(hl, hw), at(-hl, hw), at(-hl, -hw), at(hl, -hw)]
    }

    pub fn polygon(&self) -> Polygon {
        self.corners().to_vec()
    }

    pub fn contains(&self, p: Point2) -> bool {
        let (s, c) = self.heading.sin_cos();
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let along = c * dx + s * dy;
        let across = -s * dx + c * dy;
        along.abs() <= 0.5 * self.length && across.abs() <= 0.5 * self.width
    }

    pub fn overlaps(&self, other: &OrientedBox) -> bool {
        convex_overlap(&self.corners(), &other.corners())
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> (Point2, Point2) {
        polygon_bounds(&self.corners())
    }
}

pub fn polygon_bounds(poly: &[Point2]) -> (Point2, Point2) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in poly {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

fn project_onto(poly: &[Point2], axis: Point2) -> (f64, f64) {
    poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p[0] * axis[0] + p[1] * axis[1];
        (lo.min(d), hi.max(d))
    })
}

/// Separating-axis test for two convex polygons; touching counts as overlap.
pub fn convex_overlap(a: &[Point2], b: &[Point2]) -> bool {
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            let axis = [-(q[1] - p[1]), q[0] - p[0]];
            if axis[0] == 0.0 && axis[1] == 0.0 {
                continue;
            }
            let (a_lo, a_hi) = project_onto(a, axis);
            let (b_lo, b_hi) = project_onto(b, axis);
            if a_hi < b_lo || b_hi < a_lo {
                return false;
            }
        }
    }
    true
}

/// Even-odd point-in-polygon test; works for concave polygons.
pub fn point_in_polygon(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_overlap_cases() {
        let a = OrientedBox::new([0.0, 0.0], 0.0, 4.0, 2.0);
        assert!(a.overlaps(&OrientedBox::new([3.9, 0.0], 0.0, 4.0, 2.0)));
        assert!(!a.overlaps(&OrientedBox::new([4.1, 0.0], 0.0, 4.0, 2.0)));
        // rotated box reaching into the corner
        assert!(a.overlaps(&OrientedBox::new([2.5, 1.5], 0.785, 2.0, 2.0)));
        assert!(!a.overlaps(&OrientedBox::new([3.5, 2.5], 0.785, 2.0, 0.5)));
    }

    #[test]
    fn containment() {
        let b = OrientedBox::new([1.0, 1.0], std::f64::consts::FRAC_PI_2, 4.0, 2.0);
        assert!(b.contains([1.0, 2.9]));
        assert!(!b.contains([2.5, 1.0]));
        assert!(point_in_polygon([1.0, 2.9], &b.polygon()));
        assert!(!point_in_polygon([2.5, 1.0], &b.polygon()));
    }
}
