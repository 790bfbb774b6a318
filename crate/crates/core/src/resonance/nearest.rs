//! Exact nearest-sample distance queries backed by a static k-d tree.
//!
//! Distances are accumulated exactly as a brute-force scan would, so the
//! minimum returned is bitwise the brute-force minimum.

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct NearestIndex {
    points: Vec<[f64; 4]>,
    nodes: Vec<Node>,
}

fn dist_sq(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl NearestIndex {
    pub fn new(mut points: Vec<[f64; 4]>) -> Self {
        let mut nodes = Vec::new();
        if !points.is_empty() {
            let n = points.len();
            build(&mut points, 0, n, &mut nodes);
        }
        NearestIndex { points, nodes }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }


    /// Distance to the nearest sample, `None` when there are no samples.
    pub fn nearest(&self, q: &[f64; 4]) -> Option<f64> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = f64::INFINITY;
        self.search(0, q, &mut best);
        Some(best.sqrt())
    }

    fn search(&self, node: usize, q: &[f64; 4], best: &mut f64) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for p in &self.points[start..end] {
                    *best = best.min(dist_sq(q, p));
                }
            }
            Node::Split { axis, value, left, right } => {
                let gap = q[axis] - value;
                let (near, far) = if gap < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                if gap * gap < *best {
                    self.search(far, q, best);
                }
            }
        }
    }
}

/// Builds the subtree for `points[start..end]` and returns its node index.
fn build(points: &mut [[f64; 4]], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return id;
    }
    let mut axis = 0;
    let mut spread = -1.0;
    for a in 0..4 {
        let (lo, hi) = points[start..end]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[a]), hi.max(p[a])));
        if hi - lo > spread {
            spread = hi - lo;
            axis = a;
        }
    }
    if spread <= 0.0 {
        nodes.push(Node::Leaf { start, end });
        return id;
    }
    let mid = start + (end - start) / 2;
    points[start..end].select_nth_unstable_by(mid - start, |a, b| a[axis].total_cmp(&b[axis]));
    let value = points[mid][axis];
    // everything left of `mid` is <= value, everything from `mid` on is >= value
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let left = build(points, start, mid, nodes);
    let right = build(points, mid, end, nodes);
    nodes[id] = Node::Split { axis, value, left, right };
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(points: &[[f64; 4]], q: &[f64; 4]) -> f64 {
        points.iter().map(|p| dist_sq(q, p)).fold(f64::INFINITY, f64::min).sqrt()
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut sets: Vec<Vec<[f64; 4]>> = Vec::new();
        sets.push((0..500).map(|k| [0.0, -1.0 + k as f64 * 0.004, 0.0, 0.0]).collect());
        sets.push((0..2000).map(|_| [rng.random_range(0.0..0.3), rng.random_range(0.0..0.3), 0.0, 0.0]).collect());
        sets.push((0..300).map(|_| {
            [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
        }).collect());
        // heavy duplication
        sets.push(vec![[0.5, 0.5, 0.0, 0.0]; 100]);
        for pts in sets {
            let index = NearestIndex::new(pts.clone());
            for _ in 0..400 {
                let q = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0), 0.0];
                assert_eq!(index.nearest(&q).unwrap(), brute(&pts, &q));
            }
        }
    }

    #[test]
    fn empty_and_single() {
        assert!(NearestIndex::new(vec![]).nearest(&[0.0; 4]).is_none());
        let one = NearestIndex::new(vec![[1.0, 0.0, 0.0, 0.0]]);
        assert_eq!(one.nearest(&[4.0, 4.0, 0.0, 0.0]).unwrap(), 5.0);
    }
}
