//! A static kd-tree over row-major points under the Chebyshev metric.

const LEAF_SIZE: usize = 16;

pub(crate) struct KdTree<'a> {
    data: &'a [f64],
    dim: usize,
    order: Vec<usize>,
    nodes: Vec<Node>,
    // lo/hi per node, `2 * dim` floats each
    boxes: Vec<f64>,
}

struct Node {
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

pub(crate) fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

impl<'a> KdTree<'a> {
    pub(crate) fn new(data: &'a [f64], dim: usize) -> Self {
        assert!(dim > 0 && data.len().is_multiple_of(dim));
        let n = data.len() / dim;
        let mut tree = KdTree {
            data,
            dim,
            order: (0..n).collect(),
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
            boxes: Vec::new(),
        };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    pub(crate) fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { start, end, children: None });
        let dim = self.dim;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &i in &self.order[start..end] {
            for (d, &v) in self.data[i * dim..(i + 1) * dim].iter().enumerate() {
                lo[d] = lo[d].min(v);
                hi[d] = hi[d].max(v);
            }
        }
        self.boxes.extend_from_slice(&lo);
        self.boxes.extend_from_slice(&hi);

        if end - start <= LEAF_SIZE {
            return id;
        }
        let split_dim = (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        if hi[split_dim] <= lo[split_dim] {
            // all points identical
            return id;
        }
        let mid = start + (end - start) / 2;
        let data = self.data;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            data[a * dim + split_dim]
                .total_cmp(&data[b * dim + split_dim])
                .then(a.cmp(&b))
        });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id].children = Some((left, right));
        id
    }

    fn bounds(&self, node: usize) -> (&[f64], &[f64]) {
        let base = node * 2 * self.dim;
        (
            &self.boxes[base..base + self.dim],
            &self.boxes[base + self.dim..base + 2 * self.dim],
        )
    }

    fn min_dist(&self, node: usize, q: &[f64]) -> f64 {
        let (lo, hi) = self.bounds(node);
        q.iter()
            .zip(lo.iter().zip(hi))
            .fold(0.0_f64, |m, (&x, (&l, &h))| m.max(l - x).max(x - h))
    }

    fn max_dist(&self, node: usize, q: &[f64]) -> f64 {
        let (lo, hi) = self.bounds(node);
        q.iter()
            .zip(lo.iter().zip(hi))
            .fold(0.0_f64, |m, (&x, (&l, &h))| m.max(x - l).max(h - x))
    }

    /// Distance from point `i` to its `k`-th nearest other point.
    pub(crate) fn kth_neighbor_distance(&self, i: usize, k: usize) -> f64 {
        debug_assert!(k >= 1);
        let q = self.point(i);
        // ascending, at most k entries
        let mut best: Vec<f64> = Vec::with_capacity(k + 1);
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if best.len() == k && self.min_dist(node, q) >= best[k - 1] {
                continue;
            }
            let n = &self.nodes[node];
            match n.children {
                Some((l, r)) => {
                    let (dl, dr) = (self.min_dist(l, q), self.min_dist(r, q));
                    // push the farther child first so the nearer one is searched first
                    if dl <= dr {
                        stack.push(r);
                        stack.push(l);
                    } else {
                        stack.push(l);
                        stack.push(r);
                    }
                }
                None => {
                    for &j in &self.order[n.start..n.end] {
                        if j == i {
                            continue;
                        }
                        let d = chebyshev(q, self.point(j));
                        if best.len() < k || d < best[best.len() - 1] {
                            let pos = best.partition_point(|&b| b <= d);
                            best.insert(pos, d);
                            best.truncate(k);
                        }
                    }
                }
            }
        }
        best.get(k - 1).copied().unwrap_or(f64::INFINITY)
    }

    /// Number of points other than `i` strictly closer than `radius` to point `i`.
    pub(crate) fn count_within(&self, i: usize, radius: f64) -> usize {
        if radius <= 0.0 {
            return 0;
        }
        let q = self.point(i);
        let mut count = 0usize;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if self.min_dist(node, q) >= radius {
                continue;
            }
            let n = &self.nodes[node];
            if self.max_dist(node, q) < radius {
                count += n.end - n.start;
                continue;
            }
            match n.children {
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                None => {
                    count += self.order[n.start..n.end]
                        .iter()
                        .filter(|&&j| chebyshev(q, self.point(j)) < radius)
                        .count();
                }
            }
        }
        // the query point itself is always inside
        count - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn brute_kth(data: &[f64], dim: usize, i: usize, k: usize) -> f64 {
        let n = data.len() / dim;
        let q = &data[i * dim..(i + 1) * dim];
        let mut d: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| chebyshev(q, &data[j * dim..(j + 1) * dim]))
            .collect();
        d.sort_by(f64::total_cmp);
        d[k - 1]
    }

    fn brute_count(data: &[f64], dim: usize, i: usize, r: f64) -> usize {
        let n = data.len() / dim;
        let q = &data[i * dim..(i + 1) * dim];
        (0..n)
            .filter(|&j| j != i && chebyshev(q, &data[j * dim..(j + 1) * dim]) < r)
            .count()
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = crate::rng::stream(1, 0);
        for &dim in &[1usize, 2, 3, 5] {
            let n = 700;
            // coarse grid values so that ties occur
            let data: Vec<f64> =
                (0..n * dim).map(|_| (rng.random_range(0..40) as f64) * 0.25).collect();
            let tree = KdTree::new(&data, dim);
            for i in (0..n).step_by(7) {
                for &k in &[1usize, 4, 9] {
                    let kth = tree.kth_neighbor_distance(i, k);
                    assert_eq!(kth, brute_kth(&data, dim, i, k), "dim={dim} i={i} k={k}");
                    assert_eq!(tree.count_within(i, kth), brute_count(&data, dim, i, kth));
                }
                assert_eq!(tree.count_within(i, 1.3), brute_count(&data, dim, i, 1.3));
            }
        }
    }

    #[test]
    fn identical_points() {
        let data = vec![2.0; 100];
        let tree = KdTree::new(&data, 1);
        assert_eq!(tree.kth_neighbor_distance(3, 4), 0.0);
        assert_eq!(tree.count_within(3, 0.0), 0);
        assert_eq!(tree.count_within(3, 1.0), 99);
    }
}
