//! Exact k-nearest-neighbour search.
//!
//! Neighbours are ordered by `(squared distance, index)`, so ties in distance
//! resolve to the lower index and results are deterministic. The kd-tree and
//! the brute-force scan return identical lists for the same inputs.

use crate::error::{Error, Result};
use crate::exec::Execution;

const LEAF_SIZE: usize = 16;
/// Above this dimension partitioning stops paying off and the tree is one flat leaf.
const SCAN_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub dist_sq: f64,
}

impl Neighbor {
    pub fn distance(&self) -> f64 {
        self.dist_sq.sqrt()
    }

    fn precedes(&self, other: &Neighbor) -> bool {
        self.dist_sq < other.dist_sq || (self.dist_sq == other.dist_sq && self.index < other.index)
    }
}

/// Squared Euclidean distance, accumulated in four interleaved lanes.
#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    accumulate(&mut acc, a, b);
    lanes_total(&acc)
}

#[inline]
fn accumulate(acc: &mut [f64; 4], a: &[f64], b: &[f64]) {
    let (ca, ra) = a.as_chunks::<4>();
    let (cb, rb) = b.as_chunks::<4>();
    for (x, y) in ca.iter().zip(cb) {
        for l in 0..4 {
            acc[l] += (x[l] - y[l]) * (x[l] - y[l]);
        }
    }
    for (l, (x, y)) in ra.iter().zip(rb).enumerate() {
        acc[l] += (x - y) * (x - y);
    }
}

#[inline]
fn lanes_total(acc: &[f64; 4]) -> f64 {
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// Bounded sorted candidate list.
struct Candidates {
    k: usize,
    items: Vec<Neighbor>,
}

impl Candidates {
    fn new(k: usize) -> Self {
        Candidates { k, items: Vec::with_capacity(k + 1) }
    }

    fn bound(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.items[self.k - 1].dist_sq
        }
    }

    fn offer(&mut self, n: Neighbor) {
        if self.items.len() == self.k && !n.precedes(&self.items[self.k - 1]) {
            return;
        }
        let pos = self.items.partition_point(|c| c.precedes(&n));
        self.items.insert(pos, n);
        self.items.truncate(self.k);
    }
}

fn check_k(k: usize, available: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if k > available {
        return Err(Error::Parameter(format!("k = {k} exceeds the {available} candidate points")));
    }
    Ok(())
}

/// O(n) scan; the reference the kd-tree is checked against.
pub fn brute_force_knn(points: &[f64], dim: usize, query: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<Neighbor>> {
    let n = points.len() / dim;
    let available = n - usize::from(exclude.is_some_and(|e| e < n));
    check_k(k, available)?;
    let mut all: Vec<Neighbor> = (0..n)
        .filter(|&i| Some(i) != exclude)
        .map(|i| Neighbor { index: i, dist_sq: dist_sq(query, &points[i * dim..(i + 1) * dim]) })
        .collect();
    all.sort_by(|a, b| a.dist_sq.total_cmp(&b.dist_sq).then(a.index.cmp(&b.index)));
    all.truncate(k);
    Ok(all)
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    points: Vec<f64>,
    order: Vec<usize>,
    /// Points copied in tree order so leaves are contiguous.
    packed: Vec<f64>,
    nodes: Vec<Node>,
    /// Per node bounding box, `2 * dim` values (mins then maxes).
    boxes: Vec<f64>,
}

impl KdTree {
    pub fn new(points: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || points.is_empty() || !points.len().is_multiple_of(dim) {
            return Err(Error::Input("point buffer must be a non-empty multiple of the dimension".into()));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("points must be finite".into()));
        }
        let n = points.len() / dim;
        let mut tree = KdTree { dim, points, order: (0..n).collect(), packed: Vec::new(), nodes: Vec::new(), boxes: Vec::new() };
        tree.build(0, n);
        tree.packed = tree.order.iter().flat_map(|&i| tree.point(i).to_vec()).collect();
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let d = self.dim;
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in &self.order[start..end] {
            for j in 0..d {
                let v = self.points[i * d + j];
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { start, end });
        self.boxes.extend_from_slice(&lo);
        self.boxes.extend_from_slice(&hi);

        let (axis, spread) = (0..d)
            .map(|j| (j, hi[j] - lo[j]))
            .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
        if end - start <= LEAF_SIZE || spread <= 0.0 || d > SCAN_DIM {
            return id;
        }
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a * d + axis].total_cmp(&points[b * d + axis]).then(a.cmp(&b))
        });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split { left, right };
        id
    }

    fn box_dist_sq(&self, node: usize, q: &[f64]) -> f64 {
        let d = self.dim;
        let b = &self.boxes[node * 2 * d..(node + 1) * 2 * d];
        let (lo, hi) = b.split_at(d);
        let mut acc = [0.0; 4];
        for (j, &x) in q.iter().enumerate() {
            let diff = if x < lo[j] {
                lo[j] - x
            } else if x > hi[j] {
                x - hi[j]
            } else {
                0.0
            };
            acc[j % 4] += diff * diff;
        }
        lanes_total(&acc)
    }

    /// The `k` nearest points to `query`, skipping the point with index `exclude`.
    pub fn knn(&self, query: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<Neighbor>> {
        if query.len() != self.dim {
            return Err(Error::Input(format!("query has dimension {} but tree has {}", query.len(), self.dim)));
        }
        let available = self.len() - usize::from(exclude.is_some_and(|e| e < self.len()));
        check_k(k, available)?;
        let mut cands = Candidates::new(k);
        self.search(0, query, exclude, &mut cands);
        Ok(cands.items)
    }

    fn search(&self, node: usize, q: &[f64], exclude: Option<usize>, cands: &mut Candidates) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                let d = self.dim;
                for (slot, &i) in (start..end).zip(&self.order[start..end]) {
                    if Some(i) == exclude {
                        continue;
                    }
                    let dist_sq = dist_sq(q, &self.packed[slot * d..(slot + 1) * d]);
                    if dist_sq <= cands.bound() {
                        cands.offer(Neighbor { index: i, dist_sq });
                    }
                }
            }
            Node::Split { left, right } => {
                let dl = self.box_dist_sq(left, q);
                let dr = self.box_dist_sq(right, q);
                let (first, df, second, ds) = if dl <= dr { (left, dl, right, dr) } else { (right, dr, left, dl) };
                // Equal distance may still hold a lower-index tie, so prune only on strict excess.
                if df <= cands.bound() {
                    self.search(first, q, exclude, cands);
                }
                if ds <= cands.bound() {
                    self.search(second, q, exclude, cands);
                }
            }
        }
    }

    /// Neighbour lists for every point of the tree, each point excluded from its own list.
    pub fn knn_self(&self, k: usize, exec: Execution) -> Result<Vec<Vec<Neighbor>>> {
        exec.try_map_indexed(self.len(), |i| self.knn(self.point(i), k, Some(i)))
    }

    /// Neighbour lists for a batch of external queries stored row-major.
    pub fn knn_batch(&self, queries: &[f64], k: usize, exec: Execution) -> Result<Vec<Vec<Neighbor>>> {
        if !queries.len().is_multiple_of(self.dim) {
            return Err(Error::Input("query buffer is not a multiple of the dimension".into()));
        }
        let d = self.dim;
        exec.try_map_indexed(queries.len() / d, |i| self.knn(&queries[i * d..(i + 1) * d], k, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng as _;

    fn random_points(n: usize, d: usize, seed: u64, grid: bool) -> Vec<f64> {
        let mut r = rng::seeded(seed);
        (0..n * d)
            .map(|_| if grid { (r.random_range(0..5) as f64) / 4.0 } else { r.random::<f64>() })
            .collect()
    }

    #[test]
    fn matches_brute_force_random() {
        for &(n, d, k) in &[(200, 2, 5), (500, 3, 10), (300, 25, 17), (50, 1, 49)] {
            let pts = random_points(n, d, n as u64 + d as u64, false);
            let tree = KdTree::new(pts.clone(), d).unwrap();
            for i in 0..n {
                let q = &pts[i * d..(i + 1) * d];
                assert_eq!(tree.knn(q, k, Some(i)).unwrap(), brute_force_knn(&pts, d, q, k, Some(i)).unwrap());
            }
        }
    }

    #[test]
    fn matches_brute_force_with_ties() {
        // Coarse grid: many exact distance ties and duplicates.
        for &(n, d, k) in &[(400, 2, 12), (300, 12, 20)] {
            let pts = random_points(n, d, 3, true);
            let tree = KdTree::new(pts.clone(), d).unwrap();
            for i in 0..n {
                let q = &pts[i * d..(i + 1) * d];
                assert_eq!(tree.knn(q, k, Some(i)).unwrap(), brute_force_knn(&pts, d, q, k, Some(i)).unwrap());
                assert_eq!(tree.knn(q, k, None).unwrap(), brute_force_knn(&pts, d, q, k, None).unwrap());
            }
        }
    }

    #[test]
    fn all_identical_points() {
        let pts = vec![0.5; 40];
        let tree = KdTree::new(pts.clone(), 2).unwrap();
        let nn = tree.knn(&[0.5, 0.5], 3, Some(0)).unwrap();
        assert_eq!(nn.iter().map(|n| n.index).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(nn.iter().all(|n| n.dist_sq == 0.0));
    }

    #[test]
    fn k_too_large() {
        let tree = KdTree::new(vec![0.0, 1.0, 2.0], 1).unwrap();
        assert!(matches!(tree.knn(&[0.0], 3, Some(0)), Err(Error::Parameter(_))));
        assert!(tree.knn(&[0.0], 3, None).is_ok());
        assert!(matches!(tree.knn(&[0.0], 0, None), Err(Error::Parameter(_))));
    }

    #[test]
    fn batch_equals_single() {
        let pts = random_points(300, 4, 8, false);
        let qs = random_points(50, 4, 9, false);
        let tree = KdTree::new(pts, 4).unwrap();
        let batch = tree.knn_batch(&qs, 7, Execution::Parallel).unwrap();
        for (i, b) in batch.iter().enumerate() {
            assert_eq!(b, &tree.knn(&qs[i * 4..(i + 1) * 4], 7, None).unwrap());
        }
    }
}
