//! `sup_{y ∈ conv V} d(y, S)`: how far the hull of `V` reaches away from a
//! finite cloud `S`.
//!
//! This is the hard half of a Hausdorff distance between a point cloud and a
//! polytope (the other half is a finite max of point-to-polytope distances).
//! The distance to `S` is a minimum of convex functions, so its maximum over
//! a polytope is not at a vertex.
//!
//! * Euclidean, affine hull of dimension ≤ 2: exact. Interior local maxima
//!   are Voronoi vertices of `S` (Delaunay circumcenters); boundary maxima sit
//!   on polygon edges where `t ↦ d(u + t e, S)²` is a quadratic plus a
//!   lower envelope of lines, maximal at an envelope breakpoint.
//! * Otherwise: branch and bound over boxes with the 1-Lipschitz bound
//!   `d(y,S) ≤ d(q,S) + ‖y − q‖`, returning a certified bracket.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use spade::{DelaunayTriangulation, Point2, Triangulation};

use super::hull::monotone_chain;
use super::nearest::project_onto_hull;
use super::points::{dedup_points, euclid, AffineFrame, KdTree, DEDUP_TOLERANCE};

/// An interval known to contain a real quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn exact(v: f64) -> Self {
        Bracket { lower: v, upper: v }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn max(self, other: Bracket) -> Bracket {
        Bracket {
            lower: self.lower.max(other.lower),
            upper: self.upper.max(other.upper),
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Stopping rule for the branch-and-bound fallback.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GapOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_boxes: usize,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            abs_tol: 1e-9,
            rel_tol: 1e-6,
            max_boxes: 200_000,
        }
    }
}

/// A metric on dense coordinates plus the per-axis pruning scale it admits.
pub struct Metric<'a> {
    pub distance: &'a dyn Fn(&[f64], &[f64]) -> f64,
    pub axis_scale: f64,
    pub euclidean: bool,
}

/// `sup_{y ∈ conv(hull)} min_{s ∈ cloud} d(y, s)`.
pub fn hull_to_cloud_gap(
    metric: &Metric<'_>,
    hull: &[Vec<f64>],
    cloud: &[Vec<f64>],
    opts: &GapOptions,
) -> Bracket {
    assert!(!hull.is_empty() && !cloud.is_empty());
    if metric.euclidean {
        let mut all: Vec<Vec<f64>> = hull.to_vec();
        all.extend_from_slice(cloud);
        let frame = AffineFrame::of(&all, 1e-12);
        let h: Vec<Vec<f64>> = hull.iter().map(|p| frame.coordinates(p)).collect();
        let c: Vec<Vec<f64>> = cloud.iter().map(|p| frame.coordinates(p)).collect();
        let local = |a: &[f64], b: &[f64]| euclid(a, b);
        match frame.dimension() {
            0 => return Bracket::exact(0.0),
            1 => return Bracket::exact(line_gap(&h, &c)),
            2 => {
                if let Some(v) = planar_gap(&h, &c) {
                    return Bracket::exact(v);
                }
            }
            _ => {}
        }
        let m = Metric {
            distance: &local,
            axis_scale: 1.0,
            euclidean: true,
        };
        return branch_and_bound(&m, &h, &c, opts);
    }
    branch_and_bound(metric, hull, cloud, opts)
}

fn line_gap(hull: &[Vec<f64>], cloud: &[Vec<f64>]) -> f64 {
    let lo = hull.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = hull.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    let mut s: Vec<f64> = cloud.iter().map(|p| p[0]).collect();
    s.sort_by(f64::total_cmp);
    let dist = |y: f64| {
        let i = s.partition_point(|&x| x < y);
        let mut d = f64::INFINITY;
        if i < s.len() {
            d = d.min((s[i] - y).abs());
        }
        if i > 0 {
            d = d.min((y - s[i - 1]).abs());
        }
        d
    };
    let mut best = dist(lo).max(dist(hi));
    for w in s.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if mid > lo && mid < hi {
            best = best.max(dist(mid));
        }
    }
    best
}

fn planar_gap(hull: &[Vec<f64>], cloud: &[Vec<f64>]) -> Option<f64> {
    let hull = dedup_points(hull.to_vec(), DEDUP_TOLERANCE);
    let cloud = dedup_points(cloud.to_vec(), DEDUP_TOLERANCE);
    let tree = KdTree::new(&cloud, 1.0);
    let nn = |q: &[f64]| tree.nearest(q, &|a: &[f64], b: &[f64]| euclid(a, b)).1;

    let order = monotone_chain(&hull);
    let poly: Vec<&Vec<f64>> = order.iter().map(|&i| &hull[i]).collect();
    let mut best = poly.iter().map(|v| nn(v)).fold(0.0, f64::max);
    if poly.len() >= 2 {
        for k in 0..poly.len() {
            let (u, v) = (poly[k], poly[(k + 1) % poly.len()]);
            if poly.len() == 2 && k == 1 {
                break;
            }
            for t in envelope_breakpoints(u, v, &cloud) {
                let y = [u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])];
                best = best.max(nn(&y));
            }
        }
    }
    if poly.len() >= 3 && cloud.len() >= 3 {
        let mut tri: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
        for p in &cloud {
            tri.insert(Point2::new(p[0], p[1])).ok()?;
        }
        let scale = hull
            .iter()
            .flat_map(|p| p.iter().map(|x| x.abs()))
            .fold(1.0, f64::max);
        for face in tri.inner_faces() {
            let c = face.circumcenter();
            let c = [c.x, c.y];
            if inside_ccw_polygon(&poly, &c, 1e-12 * scale) {
                best = best.max(nn(&c));
            }
        }
    }
    Some(best)
}

fn inside_ccw_polygon(poly: &[&Vec<f64>], c: &[f64; 2], tol: f64) -> bool {
    (0..poly.len()).all(|k| {
        let (u, v) = (poly[k], poly[(k + 1) % poly.len()]);
        let (ex, ey) = (v[0] - u[0], v[1] - u[1]);
        let len = (ex * ex + ey * ey).sqrt();
        (ex * (c[1] - u[1]) - ey * (c[0] - u[0])) >= -tol * len.max(1.0)
    })
}

/// Parameters in `[0,1]` where the nearest site along `u + t(v − u)` can
/// change, plus both ends.
fn envelope_breakpoints(u: &[f64], v: &[f64], cloud: &[Vec<f64>]) -> Vec<f64> {
    let e = [v[0] - u[0], v[1] - u[1]];
    // |u + t e − s|² = t²|e|² + (|u − s|² − 2t⟨e, s − u⟩): lines a + b t.
    let mut lines: Vec<(f64, f64)> = cloud
        .iter()
        .map(|s| {
            let (dx, dy) = (s[0] - u[0], s[1] - u[1]);
            (dx * dx + dy * dy, -2.0 * (e[0] * dx + e[1] * dy))
        })
        .collect();
    // Lower envelope: slopes descending; equal slopes keep the lowest intercept.
    lines.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.total_cmp(&y.0)));
    lines.dedup_by(|x, y| x.1 == y.1);
    let cross_at = |l1: (f64, f64), l2: (f64, f64)| (l2.0 - l1.0) / (l1.1 - l2.1);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(lines.len());
    for l in lines {
        while hull.len() >= 2 {
            let (l1, l2) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if cross_at(l1, l) <= cross_at(l1, l2) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    let mut ts = vec![0.0, 1.0];
    for w in hull.windows(2) {
        let t = cross_at(w[0], w[1]);
        if t > 0.0 && t < 1.0 {
            ts.push(t);
        }
    }
    ts
}

struct Cell {
    upper: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

fn branch_and_bound(
    metric: &Metric<'_>,
    hull: &[Vec<f64>],
    cloud: &[Vec<f64>],
    opts: &GapOptions,
) -> Bracket {
    let dim = hull[0].len();
    let tree = KdTree::new(cloud, metric.axis_scale);
    let nn = |q: &[f64]| {
        tree.nearest(q, &|a: &[f64], b: &[f64]| (metric.distance)(a, b))
            .1
    };
    let mut lower = hull.iter().map(|v| nn(v)).fold(0.0, f64::max);

    // Upper bound over a box, plus the in-hull witness it evaluated.
    let evaluate = |lo: &[f64], hi: &[f64], lower: &mut f64| -> Option<f64> {
        let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let zero = vec![0.0; dim];
        let radius = (metric.distance)(&half, &zero);
        let proj = project_onto_hull(hull, &c);
        let l2_radius = euclid(&half, &zero);
        if proj.distance > l2_radius * (1.0 + 1e-12) + 1e-15 {
            return None;
        }
        let dq = nn(&proj.point);
        *lower = lower.max(dq);
        Some(dq + (metric.distance)(&c, &proj.point) + radius)
    };

    let lo: Vec<f64> = (0..dim)
        .map(|k| hull.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..dim)
        .map(|k| hull.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mut heap = BinaryHeap::new();
    if let Some(upper) = evaluate(&lo, &hi, &mut lower) {
        heap.push(Cell { upper, lo, hi });
    }
    let mut boxes = 1usize;
    let mut upper = lower;
    while let Some(cell) = heap.pop() {
        let tol = opts.abs_tol.max(opts.rel_tol * lower);
        if cell.upper <= lower + tol || boxes >= opts.max_boxes {
            upper = cell.upper.max(lower);
            break;
        }
        let axis = (0..dim)
            .max_by(|&a, &b| (cell.hi[a] - cell.lo[a]).total_cmp(&(cell.hi[b] - cell.lo[b])))
            .unwrap_or(0);
        let mid = 0.5 * (cell.lo[axis] + cell.hi[axis]);
        let mut left_hi = cell.hi.clone();
        left_hi[axis] = mid;
        let mut right_lo = cell.lo.clone();
        right_lo[axis] = mid;
        for (l, h) in [(cell.lo.clone(), left_hi), (right_lo, cell.hi.clone())] {
            boxes += 1;
            if let Some(u) = evaluate(&l, &h, &mut lower) {
                if u > lower {
                    heap.push(Cell {
                        upper: u,
                        lo: l,
                        hi: h,
                    });
                }
            }
        }
        upper = lower;
    }
    if let Some(top) = heap.peek() {
        upper = upper.max(top.upper);
    }
    Bracket {
        lower,
        upper: upper.max(lower),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid_metric() -> (impl Fn(&[f64], &[f64]) -> f64, f64) {
        (|a: &[f64], b: &[f64]| euclid(a, b), 1.0)
    }

    fn grid_oracle(hull: &[Vec<f64>], cloud: &[Vec<f64>], n: usize) -> f64 {
        // Dense sampling of a planar convex polygon through barycentric fans.
        let order = monotone_chain(hull);
        let poly: Vec<&Vec<f64>> = order.iter().map(|&i| &hull[i]).collect();
        let mut best: f64 = 0.0;
        for k in 1..poly.len().saturating_sub(1) {
            let (a, b, c) = (poly[0], poly[k], poly[k + 1]);
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
                    let y = [
                        a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
                        a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
                    ];
                    let d = cloud
                        .iter()
                        .map(|p| euclid(p, &y))
                        .fold(f64::INFINITY, f64::min);
                    best = best.max(d);
                }
            }
        }
        best
    }

    #[test]
    fn square_corners_gap_is_half_diagonal() {
        let sq = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        let (d, s) = euclid_metric();
        let m = Metric {
            distance: &d,
            axis_scale: s,
            euclidean: true,
        };
        let g = hull_to_cloud_gap(&m, &sq, &sq, &GapOptions::default());
        assert!(g.is_exact());
        assert!((g.lower - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn boundary_maximum_on_an_edge() {
        // Thin triangle: the farthest point from the cloud lies mid-edge.
        let hull = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.1]];
        let cloud = hull.clone();
        let (d, s) = euclid_metric();
        let m = Metric {
            distance: &d,
            axis_scale: s,
            euclidean: true,
        };
        let g = hull_to_cloud_gap(&m, &hull, &cloud, &GapOptions::default());
        let oracle = grid_oracle(&hull, &cloud, 400);
        assert!(g.lower >= oracle - 1e-12);
        assert!(g.lower - oracle < 0.02);
    }

    #[test]
    fn planar_exact_agrees_with_branch_and_bound() {
        let cloud: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64 * 2.399;
                let r = (i as f64 / 40.0).sqrt();
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        let hull = super::super::hull::extreme_points(cloud.clone());
        let (d, s) = euclid_metric();
        let m = Metric {
            distance: &d,
            axis_scale: s,
            euclidean: true,
        };
        let exact = hull_to_cloud_gap(&m, &hull, &cloud, &GapOptions::default());
        let bb = branch_and_bound(
            &m,
            &hull,
            &cloud,
            &GapOptions {
                abs_tol: 1e-7,
                rel_tol: 0.0,
                max_boxes: 2_000_000,
            },
        );
        assert!(bb.lower <= exact.lower + 1e-12, "{bb:?} vs {exact:?}");
        assert!(bb.upper >= exact.lower - 1e-12, "{bb:?} vs {exact:?}");
        assert!(bb.width() <= 1e-6);
    }

    #[test]
    fn collinear_cloud_inside_a_triangle() {
        let hull = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]];
        let cloud = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        let (d, s) = euclid_metric();
        let m = Metric {
            distance: &d,
            axis_scale: s,
            euclidean: true,
        };
        let g = hull_to_cloud_gap(&m, &hull, &cloud, &GapOptions::default());
        assert!((g.lower - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_dimensional_bracket_contains_truth() {
        // Unit cube corners: the center is farthest, at √3/2.
        let mut cube = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    cube.push(vec![x, y, z]);
                }
            }
        }
        let (d, s) = euclid_metric();
        let m = Metric {
            distance: &d,
            axis_scale: s,
            euclidean: true,
        };
        let g = hull_to_cloud_gap(
            &m,
            &cube,
            &cube,
            &GapOptions {
                abs_tol: 1e-6,
                rel_tol: 0.0,
                max_boxes: 500_000,
            },
        );
        let truth = 3f64.sqrt() / 2.0;
        assert!(
            g.lower <= truth + 1e-12 && g.upper >= truth - 1e-12,
            "{g:?}"
        );
        assert!(g.width() <= 1e-5);
    }
}
