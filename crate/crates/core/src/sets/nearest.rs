//! Euclidean projection onto the convex hull of finitely many points.
//!
//! Wolfe's minimum-norm-point method: maintain a corral of affinely
//! independent points whose hull contains the current iterate, add the point
//! most violating the optimality condition, and shrink the corral whenever
//! the affine minimizer leaves the simplex.

use nalgebra::{DMatrix, DVector};

use super::points::dot;

const OPTIMALITY_TOL: f64 = 1e-15;
const WEIGHT_TOL: f64 = 1e-12;
const MAX_MAJOR: usize = 10_000;

/// Nearest point of `conv(points)` to `x`.
#[derive(Clone, Debug)]
pub struct Projection {
    pub point: Vec<f64>,
    pub distance: f64,
    /// Convex weights over the input points (only the support is listed).
    pub weights: Vec<(usize, f64)>,
}

pub fn project_onto_hull(points: &[Vec<f64>], x: &[f64]) -> Projection {
    assert!(!points.is_empty(), "projection onto an empty hull");
    let shifted: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(x).map(|(a, b)| a - b).collect())
        .collect();
    let (y, weights) = min_norm_point(&shifted);
    let point: Vec<f64> = y.iter().zip(x).map(|(a, b)| a + b).collect();
    Projection {
        distance: dot(&y, &y).sqrt(),
        point,
        weights,
    }
}

/// Euclidean distance from `x` to `conv(points)`.
pub fn distance_to_hull(points: &[Vec<f64>], x: &[f64]) -> f64 {
    project_onto_hull(points, x).distance
}

fn combination(points: &[Vec<f64>], corral: &[usize], w: &[f64]) -> Vec<f64> {
    let dim = points[0].len();
    let mut y = vec![0.0; dim];
    for (&i, &wi) in corral.iter().zip(w) {
        for (yk, pk) in y.iter_mut().zip(&points[i]) {
            *yk += wi * pk;
        }
    }
    y
}

/// Minimizer of `‖Σ v_i p_i‖` subject to `Σ v_i = 1` over the corral.
fn affine_minimizer(points: &[Vec<f64>], corral: &[usize]) -> Vec<f64> {
    let k = corral.len();
    if k == 1 {
        return vec![1.0];
    }
    // (G + 1 1ᵀ) u = 1, v = u / Σu, with G the Gram matrix of the corral.
    let gram = DMatrix::from_fn(k, k, |a, b| {
        dot(&points[corral[a]], &points[corral[b]]) + 1.0
    });
    let ones = DVector::from_element(k, 1.0);
    let u = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&ones),
        None => gram
            .svd(true, true)
            .solve(&ones, 1e-14)
            .unwrap_or_else(|_| DVector::from_element(k, 1.0 / k as f64)),
    };
    let s: f64 = u.iter().sum();
    if s.abs() < f64::MIN_POSITIVE || !s.is_finite() {
        return vec![1.0 / k as f64; k];
    }
    u.iter().map(|x| x / s).collect()
}

fn min_norm_point(points: &[Vec<f64>]) -> (Vec<f64>, Vec<(usize, f64)>) {
    let norms: Vec<f64> = points.iter().map(|p| dot(p, p)).collect();
    let start = (0..points.len())
        .min_by(|&a, &b| norms[a].total_cmp(&norms[b]))
        .unwrap_or(0);
    let mut corral = vec![start];
    let mut w = vec![1.0];
    let mut y = points[start].clone();
    let max_norm = norms
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    for _ in 0..MAX_MAJOR {
        let yy = dot(&y, &y);
        if yy == 0.0 {
            break;
        }
        let (j, yp) = (0..points.len())
            .map(|k| (k, dot(&y, &points[k])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if yy - yp <= OPTIMALITY_TOL * max_norm || corral.contains(&j) {
            break;
        }
        corral.push(j);
        w.push(0.0);

        loop {
            let v = affine_minimizer(points, &corral);
            if v.iter().all(|&vi| vi > WEIGHT_TOL) {
                w = v;
                break;
            }
            let mut theta = 1.0f64;
            for (wi, vi) in w.iter().zip(&v) {
                if *vi <= WEIGHT_TOL && wi - vi > 0.0 {
                    theta = theta.min(wi / (wi - vi));
                }
            }
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi = theta * vi + (1.0 - theta) * *wi;
            }
            let mut keep_c = Vec::with_capacity(corral.len());
            let mut keep_w = Vec::with_capacity(corral.len());
            for (&c, &wi) in corral.iter().zip(&w) {
                if wi > WEIGHT_TOL {
                    keep_c.push(c);
                    keep_w.push(wi);
                }
            }
            if keep_c.is_empty() {
                // All weight collapsed under the tolerance; restart from the newest point.
                keep_c.push(*corral.last().expect("non-empty"));
                keep_w.push(1.0);
            }
            let total: f64 = keep_w.iter().sum();
            corral = keep_c;
            w = keep_w.into_iter().map(|x| x / total).collect();
            if corral.len() == 1 {
                break;
            }
        }
        y = combination(points, &corral, &w);
    }
    let weights = corral.into_iter().zip(w).collect();
    (y, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projects_onto_square() {
        let sq = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        assert!(distance_to_hull(&sq, &[0.5, 0.5]) < 1e-12);
        assert!((distance_to_hull(&sq, &[2.0, 0.5]) - 1.0).abs() < 1e-12);
        assert!((distance_to_hull(&sq, &[2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-12);
        let p = project_onto_hull(&sq, &[-1.0, 0.25]);
        assert!((p.point[0]).abs() < 1e-12 && (p.point[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn projects_onto_triangle_in_3d() {
        let tri = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let d = distance_to_hull(&tri, &[0.0, 0.0, 0.0]);
        assert!((d - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn segment_and_duplicates() {
        let seg = vec![
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![2.0, 0.0],
            vec![1.0, 0.0],
        ];
        assert!((distance_to_hull(&seg, &[1.0, 3.0]) - 3.0).abs() < 1e-12);
        assert!((distance_to_hull(&seg, &[3.0, 0.0]) - 1.0).abs() < 1e-12);
    }
}
