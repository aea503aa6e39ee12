//! Static 3-d tree answering weighted-L1 range queries.

/// `sum beta_d |a_d - b_d|`.
#[inline]
pub fn weighted_l1(a: &[f64; 3], b: &[f64; 3], beta: &[f64; 3]) -> f64 {
    beta[0] * (a[0] - b[0]).abs() + beta[1] * (a[1] - b[1]).abs() + beta[2] * (a[2] - b[2]).abs()
}

#[derive(Debug, Clone)]
struct Node {
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<[f64; 3]>,
    nodes: Vec<Node>,
    root: Option<usize>,
}

impl KdTree {
    /// Builds a balanced tree by median splits on the axis of widest spread.
    pub fn build(points: Vec<[f64; 3]>) -> Self {
        let mut tree = Self { nodes: Vec::with_capacity(points.len()), points, root: None };
        let mut idx: Vec<usize> = (0..tree.points.len()).collect();
        tree.root = tree.build_rec(&mut idx);
        tree
    }

    fn build_rec(&mut self, idx: &mut [usize]) -> Option<usize> {
        if idx.is_empty() {
            return None;
        }
        let axis = (0..3)
            .map(|d| {
                let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    (lo.min(self.points[i][d]), hi.max(self.points[i][d]))
                });
                (d, hi - lo)
            })
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0;
        let pts = &self.points;
        idx.sort_by(|&a, &b| pts[a][axis].total_cmp(&pts[b][axis]).then(a.cmp(&b)));
        let mid = idx.len() / 2;
        let point = idx[mid];
        let (lo, rest) = idx.split_at_mut(mid);
        let left = self.build_rec(lo);
        let right = self.build_rec(&mut rest[1..]);
        self.nodes.push(Node { point, axis, left, right });
        Some(self.nodes.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    /// Indices of all points with `weighted_l1(p, query) < threshold`,
    /// ascending. A subtree across a split is skipped once the weighted
    /// distance to the splitting plane alone reaches the threshold.
    pub fn within(&self, query: &[f64; 3], beta: &[f64; 3], threshold: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.root.into_iter().collect();
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            let p = &self.points[node.point];
            if weighted_l1(p, query, beta) < threshold {
                out.push(node.point);
            }
            let gap = query[node.axis] - p[node.axis];
            let (near, far) = if gap < 0.0 { (node.left, node.right) } else { (node.right, node.left) };
            if let Some(c) = near {
                stack.push(c);
            }
            if let Some(c) = far {
                if beta[node.axis] * gap.abs() < threshold {
                    stack.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Linear scan with the same distance.
pub fn brute_force_within(points: &[[f64; 3]], query: &[f64; 3], beta: &[f64; 3], threshold: f64) -> Vec<usize> {
    (0..points.len()).filter(|&i| weighted_l1(&points[i], query, beta) < threshold).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BETA: [f64; 3] = [1.0, 5.0, 40.0];

    #[test]
    fn exact_match_and_boundary() {
        let tree = KdTree::build(vec![[5.0, 0.0, 0.0], [6.0, 0.0, 0.0], [5.5, 0.05, 0.0], [5.5, 0.1, 0.0]]);
        assert_eq!(tree.within(&[5.0, 0.0, 0.0], &BETA, 1.0), vec![0, 2]);
    }

    #[test]
    fn duplicates_on_split_plane() {
        let pts = vec![[1.0, 0.0, 0.0]; 9];
        let tree = KdTree::build(pts.clone());
        assert_eq!(tree.within(&[1.5, 0.0, 0.0], &BETA, 1.0), brute_force_within(&pts, &[1.5, 0.0, 0.0], &BETA, 1.0));
    }

    #[test]
    fn empty_tree() {
        let tree = KdTree::build(vec![]);
        assert!(tree.within(&[0.0; 3], &BETA, 1.0).is_empty());
    }
}
