//! The support-function embedding `φ(A)(x*) = sup x*(A)`, sampled on
//! finitely many directions.
//!
//! Sampling gives a lower bound on the Hausdorff distance of convex sets.
//! In the Euclidean plane, [`planar_support_distance`] evaluates the
//! supremum over the whole circle exactly.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::sets::{monotone_chain, scale, support_function, CompactSet};
use crate::space::{circle_directions, Functional, Space, Vector};

const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSample {
    pub directions: Vec<Functional>,
    pub values: Vec<f64>,
}

/// `φ(A)` on `directions`; every direction must have unit dual norm.
pub fn embed(space: &Space, a: &CompactSet, directions: &[Functional]) -> Result<SupportSample> {
    let mut values = Vec::with_capacity(directions.len());
    for f in directions {
        let n = space.dual_norm(f)?;
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "direction has dual norm {n}, expected 1"
            )));
        }
        values.push(support_function(space, a, f)?);
    }
    Ok(SupportSample {
        directions: directions.to_vec(),
        values,
    })
}

fn same_directions(a: &SupportSample, b: &SupportSample) -> Result<()> {
    if a.directions != b.directions {
        return Err(Error::InvalidArgument(
            "support samples use different directions".into(),
        ));
    }
    Ok(())
}

/// `max_i |φA_i − φB_i|`, a lower bound for `d_H` of the hulls.
pub fn sample_distance(a: &SupportSample, b: &SupportSample) -> Result<f64> {
    same_directions(a, b)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// `max_i |φ(λA)_i − λ φ(A)_i|`.
pub fn scale_property_check(
    space: &Space,
    a: &CompactSet,
    lambda: f64,
    directions: &[Functional],
) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "λ must be non-negative, got {lambda}"
        )));
    }
    let scaled = embed(space, &scale(&Real::from_f64(lambda), a)?, directions)?;
    let base = embed(space, a, directions)?;
    Ok(scaled
        .values
        .iter()
        .zip(&base.values)
        .map(|(s, b)| (s - lambda * b).abs())
        .fold(0.0, f64::max))
}

/// `max_i |φ(A+B)_i − φ(A)_i − φ(B)_i|`.
pub fn additivity_check(
    space: &Space,
    a: &CompactSet,
    b: &CompactSet,
    directions: &[Functional],
) -> Result<f64> {
    let sum = crate::sets::minkowski_sum(space, a, b)?;
    let ea = embed(space, a, directions)?;
    let eb = embed(space, b, directions)?;
    let es = embed(space, &sum, directions)?;
    Ok((0..directions.len())
        .map(|i| (es.values[i] - ea.values[i] - eb.values[i]).abs())
        .fold(0.0, f64::max))
}

fn planar_hull(space: &Space, a: &CompactSet) -> Result<Vec<[f64; 2]>> {
    if !space.is_euclidean() || space.dimension() != Some(2) {
        return Err(Error::Unsupported(
            "the exact support distance is for the Euclidean plane".into(),
        ));
    }
    a.check(space)?;
    let pts: Vec<Vec<f64>> = a
        .points()
        .ok_or_else(|| Error::IncompatibleRepresentation("E-sums have no planar hull".into()))?
        .iter()
        .map(|v| v.as_dense().expect("checked dense").to_vec())
        .collect();
    Ok(monotone_chain(&pts)
        .into_iter()
        .map(|i| [pts[i][0], pts[i][1]])
        .collect())
}

/// Outward normal angles of the edges of a counter-clockwise polygon.
fn normal_angles(poly: &[[f64; 2]]) -> Vec<f64> {
    if poly.len() < 2 {
        return Vec::new();
    }
    let edges = if poly.len() == 2 { 2 } else { poly.len() };
    (0..edges)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            (-(q[0] - p[0])).atan2(q[1] - p[1]).rem_euclid(TAU)
        })
        .collect()
}

fn argmax(poly: &[[f64; 2]], u: [f64; 2]) -> [f64; 2] {
    *poly
        .iter()
        .max_by(|a, b| (a[0] * u[0] + a[1] * u[1]).total_cmp(&(b[0] * u[0] + b[1] * u[1])))
        .expect("non-empty polygon")
}

/// `sup_{|u|=1} |h_A(u) − h_B(u)| = d_H(conv A, conv B)` in the Euclidean plane.
///
/// Between consecutive edge normals of either polygon both support
/// functions are linear in `u`, so their difference is `R cos(θ − φ)` and
/// its maximum on each arc is at an end or at `φ`, `φ + π`.
pub fn planar_support_distance(space: &Space, a: &CompactSet, b: &CompactSet) -> Result<f64> {
    let pa = planar_hull(space, a)?;
    let pb = planar_hull(space, b)?;
    let mut cuts = normal_angles(&pa);
    cuts.extend(normal_angles(&pb));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if cuts.is_empty() {
        cuts.push(0.0);
    }
    let mut best: f64 = 0.0;
    for i in 0..cuts.len() {
        let lo = cuts[i];
        let hi = if i + 1 < cuts.len() {
            cuts[i + 1]
        } else {
            cuts[0] + TAU
        };
        let mid = 0.5 * (lo + hi);
        let u = [mid.cos(), mid.sin()];
        let w = {
            let (va, vb) = (argmax(&pa, u), argmax(&pb, u));
            [va[0] - vb[0], va[1] - vb[1]]
        };
        let eval = |th: f64| (w[0] * th.cos() + w[1] * th.sin()).abs();
        best = best.max(eval(lo)).max(eval(hi));
        let phi = w[1].atan2(w[0]);
        for crit in [phi, phi + TAU / 2.0] {
            let c = lo + (crit - lo).rem_euclid(TAU);
            if c <= hi {
                best = best.max(eval(c));
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub directions: usize,
    pub distance: f64,
}

/// `sample_distance` for growing direction sets. In the Euclidean plane the
/// directions are equispaced, nested whenever each count divides the next;
/// otherwise they are prefixes of one seeded sample.
pub fn distance_curve(
    space: &Space,
    a: &CompactSet,
    b: &CompactSet,
    counts: &[usize],
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    let planar = space.is_euclidean() && space.dimension() == Some(2);
    let max = counts.iter().copied().max().unwrap_or(0);
    let nested = if planar {
        Vec::new()
    } else {
        space.sample_directions(max, seed)?
    };
    counts
        .iter()
        .map(|&c| {
            let dirs = if planar {
                circle_directions(c)
            } else {
                nested[..c].to_vec()
            };
            let d = sample_distance(&embed(space, a, &dirs)?, &embed(space, b, &dirs)?)?;
            Ok(CurvePoint {
                directions: c,
                distance: d,
            })
        })
        .collect()
}

impl SupportSample {
    /// Columns `angle,value` for planar directions.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("angle,value\n");
        for (f, v) in self.directions.iter().zip(&self.values) {
            let c = match f.coefficients() {
                Vector::Dense(c) if c.len() == 2 => c,
                _ => {
                    return Err(Error::Unsupported(
                        "angle columns need planar directions".into(),
                    ))
                }
            };
            out.push_str(&format!("{},{}\n", c[1].atan2(c[0]), v));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::hausdorff_distance;

    fn pts(raw: &[[f64; 2]]) -> Vec<Vector> {
        raw.iter().map(|p| Vector::dense(p.to_vec())).collect()
    }

    #[test]
    fn embed_examples() {
        let s = Space::euclidean(2);
        let dirs = s.sample_directions(4, 0).unwrap();
        let z = embed(&s, &CompactSet::singleton(s.zero()), &dirs).unwrap();
        assert!(z.values.iter().all(|&v| v == 0.0));
        let sq = CompactSet::cloud(pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])).unwrap();
        let fixed = vec![
            Functional::dense([1.0, 0.0]),
            Functional::dense([-1.0, 0.0]),
            Functional::dense([0.0, 1.0]),
            Functional::dense([0.0, -1.0]),
        ];
        assert_eq!(
            embed(&s, &sq, &fixed).unwrap().values,
            vec![1.0, 0.0, 1.0, 0.0]
        );
        assert!(embed(&s, &sq, &[Functional::dense([2.0, 0.0])]).is_err());
    }

    #[test]
    fn distance_to_a_point() {
        let s = Space::euclidean(2);
        let v = Vector::dense([3.0, 4.0]);
        let dirs = vec![Functional::dense([0.6, 0.8]), Functional::dense([1.0, 0.0])];
        let a = embed(&s, &CompactSet::singleton(s.zero()), &dirs).unwrap();
        let b = embed(&s, &CompactSet::singleton(v), &dirs).unwrap();
        assert!((sample_distance(&a, &b).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(sample_distance(&a, &a).unwrap(), 0.0);
        let other = embed(&s, &CompactSet::singleton(s.zero()), &dirs[..1]).unwrap();
        assert!(sample_distance(&a, &other).is_err());
    }

    #[test]
    fn exact_planar_route_agrees_with_projection() {
        let s = Space::euclidean(2);
        let cases = [
            (
                vec![[0.0, 0.0], [2.0, 0.0], [1.0, 1.5]],
                vec![[0.5, 0.2], [1.0, 0.3]],
            ),
            (vec![[0.0, 0.0]], vec![[3.0, 4.0]]),
            (vec![[-1.0, 0.0], [1.0, 0.0]], vec![[0.0, 0.5]]),
            (
                vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
                vec![[0.2, 0.1], [1.3, 0.4], [0.6, 1.2], [-0.2, 0.8]],
            ),
        ];
        for (a, b) in cases {
            let pa = CompactSet::polytope(pts(&a)).unwrap();
            let pb = CompactSet::polytope(pts(&b)).unwrap();
            let exact = hausdorff_distance(&s, &pa, &pb).unwrap();
            let via_support = planar_support_distance(&s, &pa, &pb).unwrap();
            assert!(
                (exact - via_support).abs() < 1e-12,
                "{exact} vs {via_support}"
            );
        }
    }

    #[test]
    fn homogeneity_and_additivity() {
        let s = Space::euclidean(2);
        let a = CompactSet::polytope(pts(&[[0.0, 0.0], [2.0, 0.5], [1.0, 1.5]])).unwrap();
        let b = CompactSet::polytope(pts(&[[0.3, -0.2], [0.1, 0.9]])).unwrap();
        let dirs = s.sample_directions(64, 11).unwrap();
        assert_eq!(scale_property_check(&s, &a, 0.0, &dirs).unwrap(), 0.0);
        assert_eq!(scale_property_check(&s, &a, 1.0, &dirs).unwrap(), 0.0);
        assert!(scale_property_check(&s, &a, 0.731, &dirs).unwrap() <= 1e-9);
        assert!(scale_property_check(&s, &a, -1.0, &dirs).is_err());
        assert!(additivity_check(&s, &a, &b, &dirs).unwrap() <= 1e-9);
    }

    #[test]
    fn curve_is_monotone_and_converges() {
        let s = Space::euclidean(2);
        let a = CompactSet::polytope(pts(&[[0.0, 0.0], [2.0, 0.0], [1.0, 1.5]])).unwrap();
        let b = CompactSet::polytope(pts(&[[0.5, 0.2], [1.0, 0.3], [0.2, 0.9]])).unwrap();
        let curve = distance_curve(&s, &a, &b, &[4, 8, 16, 80, 400, 10_000], 0).unwrap();
        assert!(curve
            .windows(2)
            .all(|w| w[1].distance >= w[0].distance - 1e-15));
        let exact = hausdorff_distance(&s, &a, &b).unwrap();
        let last = curve.last().unwrap().distance;
        assert!(last <= exact + 1e-9 && exact - last < 1e-3);
        let s3 = Space::euclidean(3);
        let c = CompactSet::polytope(vec![Vector::dense([0.0, 0.0, 1.0])]).unwrap();
        let d = CompactSet::polytope(vec![Vector::dense([0.0, 0.0, 0.0])]).unwrap();
        let curve3 = distance_curve(&s3, &c, &d, &[6, 50, 200], 1).unwrap();
        assert!(curve3.windows(2).all(|w| w[1].distance >= w[0].distance));
    }
}
