//! Frenet frame over an arc-length parameterized polyline.
//!
//! `s` is the arc length of the nearest point on the polyline and `l` the
//! signed lateral offset, positive to the left of the direction of travel.
//! Lateral derivatives `l'` and `l''` are taken with respect to `s`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::types::Point2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FrenetState {
    pub s: f64,
    pub s_dot: f64,
    pub s_ddot: f64,
    pub l: f64,
    pub l_prime: f64,
    pub l_pprime: f64,
}

impl FrenetState {
    pub fn at(s: f64, l: f64) -> Self {
        Self { s, l, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLine {
    points: Vec<Point2>,
    arc: Vec<f64>,
    tangents: Vec<Point2>,
    headings: Vec<f64>,
}

impl ReferenceLine {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("reference line needs at least two points"));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("reference line points must be finite"));
        }
        let mut arc = Vec::with_capacity(points.len());
        let mut tangents = Vec::with_capacity(points.len() - 1);
        let mut headings = Vec::with_capacity(points.len() - 1);
        arc.push(0.0);
        for (i, pair) in points.windows(2).enumerate() {
            let dx = pair[1][0] - pair[0][0];
            let dy = pair[1][1] - pair[0][1];
            let len = dx.hypot(dy);
            if len < 1e-6 {
                return Err(invalid(format!("reference line points {i} and {} coincide", i + 1)));
            }
            arc.push(arc[i] + len);
            tangents.push([dx / len, dy / len]);
            headings.push(dy.atan2(dx));
        }
        Ok(Self { points, arc, tangents, headings })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// Cumulative arc length at each point.
    pub fn arc_lengths(&self) -> &[f64] {
        &self.arc
    }

    pub fn length(&self) -> f64 {
        *self.arc.last().expect("non-empty")
    }

    fn segment_count(&self) -> usize {
        self.tangents.len()
    }

    /// Segment containing arc length `s`; a shared vertex belongs to the
    /// segment that starts there.
    pub fn segment_at(&self, s: f64) -> usize {
        let idx = self.arc.partition_point(|&a| a <= s);
        idx.saturating_sub(1).min(self.segment_count() - 1)
    }

    pub fn heading_at(&self, s: f64) -> f64 {
        self.headings[self.segment_at(s)]
    }

    pub fn tangent_at(&self, s: f64) -> Point2 {
        self.tangents[self.segment_at(s)]
    }

    /// Point on the line at arc length `s` (clamped to the line).
    pub fn point_at(&self, s: f64) -> Point2 {
        let s = s.clamp(0.0, self.length());
        let i = self.segment_at(s);
        let d = s - self.arc[i];
        let t = self.tangents[i];
        [self.points[i][0] + d * t[0], self.points[i][1] + d * t[1]]
    }

    /// Discrete curvature near `s`: heading change across the nearest
    /// interior vertex divided by the mean length of its two segments.
    pub fn curvature_at(&self, s: f64) -> f64 {
        let n = self.points.len();
        if n < 3 {
            return 0.0;
        }
        let s = s.clamp(0.0, self.length());
        let idx = self.arc.partition_point(|&a| a < s).clamp(1, n - 2);
        let dtheta = super::wrap_angle(self.headings[idx] - self.headings[idx - 1]);
        let span = 0.5 * (self.arc[idx + 1] - self.arc[idx - 1]);
        dtheta / span
    }

    /// Nearest point over all segments; ties keep the smaller `s`.
    /// Returns `(s, l, segment)`.
    pub fn project(&self, p: Point2) -> (f64, f64, usize) {
        let mut best = (f64::INFINITY, 0.0, 0.0, 0usize);
        for i in 0..self.segment_count() {
            let a = self.points[i];
            let t = self.tangents[i];
            let seg_len = self.arc[i + 1] - self.arc[i];
            let rx = p[0] - a[0];
            let ry = p[1] - a[1];
            let along = (rx * t[0] + ry * t[1]).clamp(0.0, seg_len);
            let fx = a[0] + along * t[0];
            let fy = a[1] + along * t[1];
            let d2 = (p[0] - fx).powi(2) + (p[1] - fy).powi(2);
            if d2 < best.0 {
                let cross = t[0] * (p[1] - fy) - t[1] * (p[0] - fx);
                let l = d2.sqrt().copysign(if cross == 0.0 { 1.0 } else { cross });
                best = (d2, self.arc[i] + along, l, i);
            }
        }
        (best.1, best.2, best.3)
    }

    /// Radius of the largest tube around `s` on the side of `l` inside which
    /// the nearest-point projection stays on the same segment. On the inner
    /// side of a vertex turning by `theta` this is the radius of the circle
    /// tangent to both segments at the current station: `d / tan(theta / 2)`.
    pub fn local_radius(&self, s: f64, l: f64) -> f64 {
        let i = self.segment_at(s);
        let mut radius = f64::INFINITY;
        let side = l.signum();
        if i + 1 < self.segment_count() {
            let turn = super::wrap_angle(self.headings[i + 1] - self.headings[i]);
            if turn * side > 0.0 {
                radius = radius.min((self.arc[i + 1] - s) / (0.5 * turn.abs()).tan());
            }
        }
        if i > 0 {
            let turn = super::wrap_angle(self.headings[i] - self.headings[i - 1]);
            if turn * side > 0.0 {
                radius = radius.min((s - self.arc[i]) / (0.5 * turn.abs()).tan());
            }
        }
        radius
    }

    /// Copy of the line extended straight past its last point by `distance`.
    pub fn extended(&self, distance: f64) -> Self {
        if distance <= 0.0 {
            return self.clone();
        }
        let mut points = self.points.clone();
        let end = *points.last().expect("non-empty");
        let t = *self.tangents.last().expect("non-empty");
        points.push([end[0] + distance * t[0], end[1] + distance * t[1]]);
        Self::new(points).expect("extension of a valid line is valid")
    }

    /// Sub-line starting at arc length `s_from` (clamped).
    pub fn trimmed_from(&self, s_from: f64) -> Self {
        let s_from = s_from.clamp(0.0, self.length() - 1e-3);
        let i = self.segment_at(s_from);
        let mut points = vec![self.point_at(s_from)];
        for p in &self.points[i + 1..] {
            let last = points.last().expect("non-empty");
            if (p[0] - last[0]).hypot(p[1] - last[1]) >= 1e-3 {
                points.push(*p);
            }
        }
        if points.len() < 2 {
            return self.clone();
        }
        Self::new(points).unwrap_or_else(|_| self.clone())
    }

    /// Frenet state of a vehicle pose with speed `v`, acceleration `a` and
    /// path curvature `kappa`. `l''` is the curvature in excess of the
    /// reference's local curvature.
    pub fn frenet_state_of(&self, x: f64, y: f64, heading: f64, v: f64, a: f64, kappa: f64) -> FrenetState {
        let (s, l, seg) = self.project([x, y]);
        let dtheta = super::wrap_angle(heading - self.headings[seg]);
        let l_prime = dtheta.tan().clamp(-10.0, 10.0);
        // the reference's own bending is already carried by the polyline
        let l_pprime = kappa * (1.0 + l_prime * l_prime).powf(1.5) - self.curvature_at(s);
        FrenetState {
            s,
            s_dot: v * dtheta.cos(),
            s_ddot: a * dtheta.cos(),
            l,
            l_prime,
            l_pprime,
        }
    }
}

/// `(s, l)` of `point`; the derivative fields are zero.
pub fn project_to_frenet(point: Point2, reference: &ReferenceLine) -> FrenetState {
    let (s, l, _) = reference.project(point);
    FrenetState::at(s, l)
}

/// Cartesian pose and speed of a Frenet state. Within a segment the line is
/// straight, so the heading is the segment heading plus `atan(l')` and the
/// speed is `s_dot * sqrt(1 + l'^2)`.
pub fn frenet_to_cartesian(fs: &FrenetState, reference: &ReferenceLine) -> Result<CartesianState> {
    let len = reference.length();
    if !(fs.s >= -1e-9 && fs.s <= len + 1e-9) {
        return Err(Error::OutOfRange(format!("s = {} outside [0, {len}]", fs.s)));
    }
    let s = fs.s.clamp(0.0, len);
    let i = reference.segment_at(s);
    let t = reference.tangents[i];
    let base = reference.point_at(s);
    let n = [-t[1], t[0]];
    Ok(CartesianState {
        x: base[0] + fs.l * n[0],
        y: base[1] + fs.l * n[1],
        heading: reference.headings[i] + fs.l_prime.atan(),
        v: fs.s_dot.abs() * (1.0 + fs.l_prime * fs.l_prime).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight() -> ReferenceLine {
        ReferenceLine::new(vec![[0.0, 0.0], [50.0, 0.0], [100.0, 0.0]]).unwrap()
    }

    #[test]
    fn axis_aligned_projection() {
        let fs = project_to_frenet([5.0, 1.0], &straight());
        assert!((fs.s - 5.0).abs() < 1e-12 && (fs.l - 1.0).abs() < 1e-12);
        let fs = project_to_frenet([7.0, 0.0], &straight());
        assert_eq!(fs.l, 0.0);
        let fs = project_to_frenet([7.0, -2.0], &straight());
        assert!((fs.l + 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_on_straight_line() {
        let c = frenet_to_cartesian(&FrenetState::at(5.0, 1.0), &straight()).unwrap();
        assert!((c.x - 5.0).abs() < 1e-12 && (c.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn end_of_line_offsets_along_end_normal() {
        let r = ReferenceLine::new(vec![[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let c = frenet_to_cartesian(&FrenetState::at(5.0, 2.0), &r).unwrap();
        assert!((c.x - (3.0 - 2.0 * 0.8)).abs() < 1e-12);
        assert!((c.y - (4.0 + 2.0 * 0.6)).abs() < 1e-12);
        assert!(frenet_to_cartesian(&FrenetState::at(5.1, 0.0), &r).is_err());
        assert!(frenet_to_cartesian(&FrenetState::at(-0.1, 0.0), &r).is_err());
    }

    #[test]
    fn invalid_lines_rejected() {
        assert!(ReferenceLine::new(vec![[0.0, 0.0]]).is_err());
        assert!(ReferenceLine::new(vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(ReferenceLine::new(vec![[0.0, f64::NAN], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn ties_prefer_smaller_station() {
        // A U-shaped line: the point between both legs is equidistant.
        let r = ReferenceLine::new(vec![[0.0, 1.0], [10.0, 1.0], [10.0, -1.0], [0.0, -1.0]]).unwrap();
        let (s, _, seg) = r.project([5.0, 0.0]);
        assert_eq!(seg, 0);
        assert!((s - 5.0).abs() < 1e-12);
    }

    #[test]
    fn speed_composition() {
        let fs = FrenetState { s: 10.0, s_dot: 4.0, l_prime: 0.75, ..Default::default() };
        let c = frenet_to_cartesian(&fs, &straight()).unwrap();
        assert!((c.v - 5.0).abs() < 1e-12);
        assert!((c.heading - 0.75f64.atan()).abs() < 1e-12);
    }

    #[test]
    fn inner_side_radius_matches_tangent_circle() {
        // 90 degree left turn at (10, 0)
        let r = ReferenceLine::new(vec![[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]]).unwrap();
        assert!((r.local_radius(7.0, 1.0) - 3.0).abs() < 1e-12);
        assert!(r.local_radius(7.0, -1.0).is_infinite());
    }
}
