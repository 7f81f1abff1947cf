//! Dense point utilities: tolerance dedup, nearest-neighbour search, affine frames.

use std::cmp::Ordering;

/// Coordinate tolerance under which two points are the same point.
pub const DEDUP_TOLERANCE: f64 = 1e-12;

/// Removes points within `tol` (max-coordinate difference) of an earlier
/// kept point. The result is sorted lexicographically.
pub fn dedup_points(mut points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    points.sort_by(|a, b| lex_cmp(a, b));
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    'next: for p in points {
        let x0 = p.first().copied().unwrap_or(0.0);
        for q in kept.iter().rev() {
            if q.first().copied().unwrap_or(0.0) < x0 - tol {
                break;
            }
            if max_abs_diff(&p, q) <= tol {
                continue 'next;
            }
        }
        kept.push(p);
    }
    kept
}

pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A static k-d tree answering nearest-neighbour distance queries.
///
/// The metric is supplied by the caller; pruning needs only that a single
/// coordinate gap of `g` implies distance at least `axis_scale · g`, which
/// holds for every ℓp norm (scale 1) and for the bin-weighted L1 grid (scale 1/m).
pub struct KdTree<'a> {
    points: &'a [Vec<f64>],
    nodes: Vec<Node>,
    root: Option<usize>,
    axis_scale: f64,
}

struct Node {
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

impl<'a> KdTree<'a> {
    pub fn new(points: &'a [Vec<f64>], axis_scale: f64) -> Self {
        let mut tree = KdTree {
            points,
            nodes: Vec::with_capacity(points.len()),
            root: None,
            axis_scale,
        };
        let mut idx: Vec<usize> = (0..points.len()).collect();
        tree.root = tree.build(&mut idx);
        tree
    }

    fn build(&mut self, idx: &mut [usize]) -> Option<usize> {
        if idx.is_empty() {
            return None;
        }
        let dim = self.points[idx[0]].len();
        let axis = (0..dim)
            .max_by(|&a, &b| self.spread(idx, a).total_cmp(&self.spread(idx, b)))
            .unwrap_or(0);
        let mid = idx.len() / 2;
        let pts = self.points;
        idx.select_nth_unstable_by(mid, |&a, &b| pts[a][axis].total_cmp(&pts[b][axis]));
        let point = idx[mid];
        let (lo, rest) = idx.split_at_mut(mid);
        let left = self.build(lo);
        let right = self.build(&mut rest[1..]);
        self.nodes.push(Node {
            point,
            axis,
            left,
            right,
        });
        Some(self.nodes.len() - 1)
    }

    fn spread(&self, idx: &[usize], axis: usize) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &i in idx {
            let x = self.points[i][axis];
            lo = lo.min(x);
            hi = hi.max(x);
        }
        hi - lo
    }

    /// Distance from `q` to the nearest stored point under `metric`.
    pub fn nearest<F: Fn(&[f64], &[f64]) -> f64>(&self, q: &[f64], metric: &F) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        if let Some(root) = self.root {
            self.search(root, q, metric, &mut best);
        }
        best
    }

    fn search<F: Fn(&[f64], &[f64]) -> f64>(
        &self,
        node: usize,
        q: &[f64],
        metric: &F,
        best: &mut (usize, f64),
    ) {
        let n = &self.nodes[node];
        let p = &self.points[n.point];
        let d = metric(q, p);
        if d < best.1 || (d == best.1 && n.point < best.0) {
            *best = (n.point, d);
        }
        let gap = q[n.axis] - p[n.axis];
        let (near, far) = if gap <= 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        if let Some(c) = near {
            self.search(c, q, metric, best);
        }
        if let Some(c) = far {
            if gap.abs() * self.axis_scale <= best.1 {
                self.search(c, q, metric, best);
            }
        }
    }
}

/// An orthonormal frame for the affine hull of a point set.
pub struct AffineFrame {
    pub origin: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

impl AffineFrame {
    /// Gram–Schmidt on the offsets from the first point; directions shorter
    /// than `tol` relative to the set's extent are dropped.
    pub fn of(points: &[Vec<f64>], tol: f64) -> AffineFrame {
        let origin = points.first().cloned().unwrap_or_default();
        let extent = points
            .iter()
            .map(|p| euclid(p, &origin))
            .fold(0.0, f64::max);
        let cutoff = tol * extent.max(1.0);
        let mut basis: Vec<Vec<f64>> = Vec::new();
        // Two passes of projection keep the basis orthogonal to rounding error.
        for p in points {
            let mut r: Vec<f64> = p.iter().zip(&origin).map(|(a, b)| a - b).collect();
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&r, b);
                    for (ri, bi) in r.iter_mut().zip(b) {
                        *ri -= c * bi;
                    }
                }
            }
            let n = dot(&r, &r).sqrt();
            if n > cutoff {
                basis.push(r.into_iter().map(|x| x / n).collect());
                if basis.len() == origin.len() {
                    break;
                }
            }
        }
        AffineFrame { origin, basis }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn coordinates(&self, p: &[f64]) -> Vec<f64> {
        let r: Vec<f64> = p.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        self.basis.iter().map(|b| dot(&r, b)).collect()
    }

    /// Squared distance from `p` to the frame's affine hull.
    pub fn residual_sq(&self, p: &[f64]) -> f64 {
        let r: Vec<f64> = p.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        let proj: f64 = self.basis.iter().map(|b| dot(&r, b).powi(2)).sum();
        (dot(&r, &r) - proj).max(0.0)
    }
}
