//! Extreme points of finite point sets.
//!
//! The affine hull is detected first, so flat inputs embedded in a higher
//! dimension take the cheap 1-D or planar path. Full-dimensional inputs of
//! dimension three and up fall back to an exact projection test per point.

use super::nearest::distance_to_hull;
use super::points::{dedup_points, lex_cmp, AffineFrame, DEDUP_TOLERANCE};

const FLATNESS_TOL: f64 = 1e-12;

/// The extreme points of `conv(points)`, sorted lexicographically.
pub fn extreme_points(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let pts = dedup_points(points, DEDUP_TOLERANCE);
    if pts.len() <= 2 {
        return pts;
    }
    let frame = AffineFrame::of(&pts, FLATNESS_TOL);
    let coords: Vec<Vec<f64>> = pts.iter().map(|p| frame.coordinates(p)).collect();
    let keep: Vec<usize> = match frame.dimension() {
        0 => vec![0],
        1 => {
            let lo = (0..pts.len()).min_by(|&a, &b| coords[a][0].total_cmp(&coords[b][0]));
            let hi = (0..pts.len()).max_by(|&a, &b| coords[a][0].total_cmp(&coords[b][0]));
            let mut k: Vec<usize> = lo.into_iter().chain(hi).collect();
            k.dedup();
            k
        }
        2 => monotone_chain(&coords),
        _ => general_extreme(&coords),
    };
    let mut out: Vec<Vec<f64>> = keep.into_iter().map(|i| pts[i].clone()).collect();
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Strict left turn, with near-collinear triples treated as collinear.
fn left_turn(o: &[f64], a: &[f64], b: &[f64]) -> bool {
    let ua = ((a[0] - o[0]).powi(2) + (a[1] - o[1]).powi(2)).sqrt();
    let ub = ((b[0] - o[0]).powi(2) + (b[1] - o[1]).powi(2)).sqrt();
    cross(o, a, b) > 1e-13 * ua * ub
}

/// Indices of the hull vertices of planar points (Andrew's algorithm),
/// in counter-clockwise order.
pub(crate) fn monotone_chain(coords: &[Vec<f64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..coords.len()).collect();
    idx.sort_by(|&a, &b| lex_cmp(&coords[a], &coords[b]));
    if idx.len() <= 2 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && !left_turn(
                &coords[lower[lower.len() - 2]],
                &coords[lower[lower.len() - 1]],
                &coords[i],
            )
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && !left_turn(
                &coords[upper[upper.len() - 2]],
                &coords[upper[upper.len() - 1]],
                &coords[i],
            )
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn general_extreme(coords: &[Vec<f64>]) -> Vec<usize> {
    let scale = coords
        .iter()
        .flat_map(|p| p.iter().map(|x| x.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    (0..coords.len())
        .filter(|&i| {
            let others: Vec<Vec<f64>> = coords
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| p.clone())
                .collect();
            distance_to_hull(&others, &coords[i]) > 1e-11 * scale
        })
        .collect()
}
