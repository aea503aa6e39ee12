use super::PredictionGrid;
use crate::raster::GridGeometry;
use crate::types::{Landmark, LandmarkKind, Point2};

/// Accumulated forecast mass per landmark and the lanes kept as priors.
#[derive(Debug, Clone, PartialEq)]
pub struct LanePrior {
    /// Indexed like the landmark slice; non-lane landmarks stay at 0.
    pub totals: Vec<f64>,
    /// Landmark indices of the selected lanes, highest mass first.
    pub selected: Vec<usize>,
}

/// Row-major indices of the cells whose centers lie within `half_width` of
/// the polyline. Each cell appears once.
pub fn corridor_cells(geometry: &GridGeometry, line: &[Point2], half_width: f64) -> Vec<usize> {
    let mut mask = vec![false; geometry.len()];
    let segments: Vec<(Point2, Point2)> = if line.len() == 1 {
        vec![(line[0], line[0])]
    } else {
        line.windows(2).map(|w| (w[0], w[1])).collect()
    };
    for (a, b) in segments {
        let lo = [a[0].min(b[0]) - half_width, a[1].min(b[1]) - half_width];
        let hi = [a[0].max(b[0]) + half_width, a[1].max(b[1]) + half_width];
        let Some(((r0, r1), (c0, c1))) = geometry.cell_range(lo, hi) else { continue };
        for r in r0..=r1 {
            for c in c0..=c1 {
                if segment_distance(geometry.cell_center(r, c), a, b) <= half_width {
                    mask[geometry.index(r, c)] = true;
                }
            }
        }
    }
    mask.iter().enumerate().filter_map(|(i, &m)| m.then_some(i)).collect()
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Sums the prediction mass inside each lane-center corridor over all
/// timesteps and keeps the `top_k` lanes with positive mass. Ties keep the
/// lower landmark index.
pub fn accumulate_lane_prior(grid: &PredictionGrid, landmarks: &[Landmark], half_width: f64, top_k: usize) -> LanePrior {
    let n = grid.geometry.len();
    let totals: Vec<f64> = landmarks
        .iter()
        .map(|lm| {
            if lm.kind != LandmarkKind::LaneCenter || lm.points.is_empty() {
                return 0.0;
            }
            let cells = corridor_cells(&grid.geometry, &lm.points, half_width);
            (0..grid.layers)
                .map(|k| {
                    let layer = &grid.data[k * n..(k + 1) * n];
                    cells.iter().map(|&i| layer[i] as f64).sum::<f64>()
                })
                .sum()
        })
        .collect();
    let mut order: Vec<usize> = (0..totals.len()).filter(|&i| totals[i] > 0.0).collect();
    order.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]).then(a.cmp(&b)));
    order.truncate(top_k);
    LanePrior { totals, selected: order }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane(y: f64) -> Landmark {
        Landmark { kind: LandmarkKind::LaneCenter, points: vec![[-10.0, y], [10.0, y]] }
    }

    fn geom() -> GridGeometry {
        GridGeometry::new([-10.0, -10.0], 0.5, 41, 41)
    }

    #[test]
    fn zero_grid_gives_zero_mass() {
        let g = PredictionGrid::zeros(geom());
        let p = accumulate_lane_prior(&g, &[lane(0.0), lane(3.5)], 1.75, 2);
        assert_eq!(p.totals, vec![0.0, 0.0]);
        assert!(p.selected.is_empty());
    }

    #[test]
    fn orders_by_mass() {
        let geo = geom();
        let mut g = PredictionGrid::zeros(geo);
        // lane A at y = 0 gets 3.0, lane B at y = 7 gets 1.0
        let (ra, ca) = geo.world_to_cell([0.0, 0.0]).unwrap();
        let (rb, cb) = geo.world_to_cell([0.0, 7.0]).unwrap();
        for k in 0..6 {
            g.set(k, ra, ca, 0.5);
        }
        g.set(3, rb, cb, 1.0);
        let p = accumulate_lane_prior(&g, &[lane(7.0), lane(0.0), Landmark { kind: LandmarkKind::RoadBoundary, points: vec![[-10.0, 0.0], [10.0, 0.0]] }], 1.75, 2);
        assert_eq!(p.selected, vec![1, 0]);
        assert!((p.totals[1] - 3.0).abs() < 1e-9);
        assert!((p.totals[0] - 1.0).abs() < 1e-9);
        assert_eq!(p.totals[2], 0.0);
    }

    #[test]
    fn corridor_is_inclusive_and_unique() {
        let geo = GridGeometry::new([0.0, 0.0], 1.0, 5, 5);
        let cells = corridor_cells(&geo, &[[0.0, 2.0], [2.0, 2.0], [4.0, 2.0]], 1.0);
        // rows 1..=3 across all 5 columns
        assert_eq!(cells.len(), 15);
    }
}
