//! A small kd-tree for exact k-nearest-neighbor queries in low dimension.
//! Ties are broken by sample index so results are deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const LEAF_SIZE: usize = 16;

#[derive(Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

pub(crate) struct KdTree<'a> {
    data: &'a [f64],
    dim: usize,
    order: Vec<usize>,
    nodes: Vec<Node>,
    root: usize,
}

#[derive(PartialEq)]
struct HeapEntry {
    d2: f64,
    idx: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2
            .total_cmp(&other.d2)
            .then_with(|| self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> KdTree<'a> {
    /// `data` is row-major: `len * dim` values.
    pub(crate) fn build(data: &'a [f64], dim: usize) -> Self {
        assert!(dim > 0 && data.len() % dim == 0);
        let len = data.len() / dim;
        let mut tree = KdTree {
            data,
            dim,
            order: (0..len).collect(),
            nodes: Vec::new(),
            root: 0,
        };
        tree.root = tree.build_node(0, len, 0);
        tree
    }

    fn coord(&self, sample: usize, dim: usize) -> f64 {
        self.data[sample * self.dim + dim]
    }

    fn build_node(&mut self, start: usize, end: usize, depth: usize) -> usize {
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        let dim = depth % self.dim;
        let mid = (start + end) / 2;
        let (data, dimension) = (self.data, self.dim);
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            data[a * dimension + dim]
                .total_cmp(&data[b * dimension + dim])
                .then_with(|| a.cmp(&b))
        });
        let value = self.coord(self.order[mid], dim);
        let left = self.build_node(start, mid, depth + 1);
        let right = self.build_node(mid, end, depth + 1);
        self.nodes.push(Node::Split {
            dim,
            value,
            left,
            right,
        });
        self.nodes.len() - 1
    }

    fn dist2(&self, sample: usize, query: &[f64]) -> f64 {
        let mut acc = 0.0;
        for d in 0..self.dim {
            let diff = self.coord(sample, d) - query[d];
            acc += diff * diff;
        }
        acc
    }

    /// Indices of the `k` nearest samples to `query` (the query point itself
    /// included when it is part of the data), ordered by `(distance, index)`.
    pub(crate) fn k_nearest(&self, query: &[f64], k: usize) -> Vec<usize> {
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::with_capacity(k + 1);
        self.search(self.root, query, k, &mut heap);
        let mut out: Vec<HeapEntry> = heap.into_vec();
        out.sort_by(|a, b| a.cmp(b));
        out.into_iter().map(|e| e.idx).collect()
    }

    fn search(&self, node: usize, query: &[f64], k: usize, heap: &mut BinaryHeap<HeapEntry>) {
        match &self.nodes[node] {
            Node::Leaf { start, end } => {
                for &idx in &self.order[*start..*end] {
                    let entry = HeapEntry {
                        d2: self.dist2(idx, query),
                        idx,
                    };
                    if heap.len() < k {
                        heap.push(entry);
                    } else if entry < *heap.peek().expect("non-empty heap") {
                        heap.pop();
                        heap.push(entry);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let delta = query[*dim] - value;
                let (near, far) = if delta < 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.search(near, query, k, heap);
                let worst = heap.peek().map(|e| e.d2).unwrap_or(f64::INFINITY);
                if heap.len() < k || delta * delta <= worst {
                    self.search(far, query, k, heap);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let dim = 3;
        let n = 400;
        let data: Vec<f64> = (0..n * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tree = KdTree::build(&data, dim);
        for _ in 0..50 {
            let q: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let got = tree.k_nearest(&q, 7);
            let mut brute: Vec<(f64, usize)> = (0..n)
                .map(|i| {
                    let d2: f64 = (0..dim)
                        .map(|d| (data[i * dim + d] - q[d]).powi(2))
                        .sum();
                    (d2, i)
                })
                .collect();
            brute.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            let expected: Vec<usize> = brute[..7].iter().map(|(_, i)| *i).collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn handles_duplicate_points_deterministically() {
        let dim = 2;
        let mut data = Vec::new();
        for _ in 0..30 {
            data.extend_from_slice(&[1.0, 2.0]);
        }
        for _ in 0..30 {
            data.extend_from_slice(&[5.0, -1.0]);
        }
        let tree = KdTree::build(&data, dim);
        let got = tree.k_nearest(&[1.0, 2.0], 5);
        // All candidates tie at distance zero; the lowest indices win.
        assert_eq!(got, vec![0, 1, 2, 3, 4]);
    }
}
