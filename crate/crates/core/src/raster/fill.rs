//! Scanline polygon fill and polyline tracing on a [`GridGeometry`].
//! A cell belongs to a polygon when its center lies inside it.

use super::GridGeometry;
use crate::types::Point2;

/// Calls `visit(row, col)` for every cell whose center lies inside `poly`
/// (even-odd rule, boundary inclusive). Returns the number of cells visited.
pub fn fill_polygon(geom: &GridGeometry, poly: &[Point2], mut visit: impl FnMut(usize, usize)) -> usize {
    if poly.len() < 3 || geom.is_empty() {
        return 0;
    }
    // Work in continuous cell coordinates so centers sit on integers.
    let pts: Vec<(f64, f64)> = poly.iter().map(|p| geom.fractional(*p)).collect();
    let (mut rmin, mut rmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(r, _) in &pts {
        rmin = rmin.min(r);
        rmax = rmax.max(r);
    }
    let r0 = rmin.ceil().max(0.0) as i64;
    let r1 = rmax.floor().min(geom.rows as f64 - 1.0) as i64;
    let mut count = 0;
    let mut xs: Vec<f64> = Vec::with_capacity(8);
    for row in r0..=r1 {
        let y = row as f64;
        xs.clear();
        let n = pts.len();
        for i in 0..n {
            let (ya, xa) = pts[i];
            let (yb, xb) = pts[(i + 1) % n];
            if (ya <= y && yb > y) || (yb <= y && ya > y) {
                xs.push(xa + (y - ya) / (yb - ya) * (xb - xa));
            } else if ya == y && yb == y {
                // horizontal edge on the scanline: include its span
                xs.push(xa.min(xb));
                xs.push(xa.max(xb));
            }
        }
        xs.sort_by(|a, b| a.total_cmp(b));
        for pair in xs.chunks_exact(2) {
            let c0 = pair[0].ceil().max(0.0);
            let c1 = pair[1].floor().min(geom.cols as f64 - 1.0);
            if c0 > c1 {
                continue;
            }
            for col in c0 as usize..=c1 as usize {
                visit(row as usize, col);
                count += 1;
            }
        }
    }
    count
}

/// Calls `visit(row, col)` for cells along the polyline, sampled every
/// quarter cell. Cells may repeat.
pub fn trace_polyline(geom: &GridGeometry, points: &[Point2], mut visit: impl FnMut(usize, usize)) {
    let step = 0.25 * geom.resolution;
    let mut mark = |p: Point2| {
        if let Ok((r, c)) = geom.world_to_cell(p) {
            visit(r, c);
        }
    };
    if points.len() == 1 {
        mark(points[0]);
    }
    for seg in points.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let n = (len / step).ceil().max(1.0) as usize;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            mark([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned_square_covers_expected_cells() {
        let g = GridGeometry::new([0.0, 0.0], 1.0, 10, 10);
        let mut cells = Vec::new();
        fill_polygon(&g, &[[1.5, 1.5], [4.5, 1.5], [4.5, 3.5], [1.5, 3.5]], |r, c| cells.push((r, c)));
        cells.sort();
        let expected: Vec<_> = (2..=3).flat_map(|r| (2..=4).map(move |c| (r, c))).collect();
        assert_eq!(cells, expected);
    }

    #[test]
    fn concave_polygon() {
        let g = GridGeometry::new([0.0, 0.0], 1.0, 10, 10);
        // U shape: the notch at column 3..5, rows 4..8 is empty
        let u = [[0.5, 0.5], [7.5, 0.5], [7.5, 8.5], [5.5, 8.5], [5.5, 3.5], [2.5, 3.5], [2.5, 8.5], [0.5, 8.5]];
        let mut hit = vec![false; 100];
        fill_polygon(&g, &u, |r, c| hit[r * 10 + c] = true);
        assert!(hit[2 * 10 + 4]);
        assert!(!hit[6 * 10 + 4]);
        assert!(hit[6 * 10 + 1] && hit[6 * 10 + 6]);
    }

    #[test]
    fn clipped_outside() {
        let g = GridGeometry::new([0.0, 0.0], 1.0, 4, 4);
        let n = fill_polygon(&g, &[[10.0, 10.0], [12.0, 10.0], [12.0, 12.0]], |_, _| {});
        assert_eq!(n, 0);
    }
}
