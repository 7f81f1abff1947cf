//! Non-empty bounded sets and their calculus.
//!
//! A [`CompactSet`] is one of three representations:
//!
//! * a finite point cloud,
//! * a convex polytope given by a vertex list (the set is the hull),
//! * an [`ESum`], a structured sum of characteristic-function sets in the
//!   bin-discretized L1[0,1].
//!
//! Operations that mix representations are rejected rather than guessed.

mod esum;
mod gap;
mod hull;
mod nearest;
mod points;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{format_rational, parse_rational, rational_to_f64, Rational, Real};
use crate::space::{Functional, Mode, Space, Vector};

pub use esum::{ESum, ETerm};
pub use gap::{Bracket, GapOptions};
pub use hull::extreme_points;
pub(crate) use hull::monotone_chain;
pub use nearest::{distance_to_hull, project_onto_hull, Projection};
pub use points::{dedup_points, AffineFrame, KdTree, DEDUP_TOLERANCE};

/// Upper limit on materialized points in any cloud or vertex list.
pub const MAX_POINTS: usize = 1_000_000;

/// Edge subdivisions used by the sampled polytope distance for non-Euclidean norms.
pub const BOUNDARY_SAMPLES: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetRepr", into = "SetRepr")]
pub enum CompactSet {
    PointCloud(Vec<Vector>),
    ConvexPolytope(Vec<Vector>),
    ESum(ESum),
}

impl CompactSet {
    /// A finite point cloud; duplicates within 1e-12 are merged.
    pub fn cloud(points: Vec<Vector>) -> Result<Self> {
        Ok(CompactSet::PointCloud(dedup_vectors(points)?))
    }

    /// The convex hull of `vertices`; only duplicates are removed, so
    /// interior points may remain until [`convex_hull`] prunes them.
    pub fn polytope(vertices: Vec<Vector>) -> Result<Self> {
        Ok(CompactSet::ConvexPolytope(dedup_vectors(vertices)?))
    }

    pub fn singleton(v: Vector) -> Self {
        CompactSet::PointCloud(vec![v])
    }

    pub fn esum(e: ESum) -> Self {
        CompactSet::ESum(e)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CompactSet::PointCloud(_) => "cloud",
            CompactSet::ConvexPolytope(_) => "polytope",
            CompactSet::ESum(_) => "esum",
        }
    }

    /// Points of a cloud or vertices of a polytope.
    pub fn points(&self) -> Option<&[Vector]> {
        match self {
            CompactSet::PointCloud(p) | CompactSet::ConvexPolytope(p) => Some(p),
            CompactSet::ESum(_) => None,
        }
    }

    pub fn as_esum(&self) -> Option<&ESum> {
        match self {
            CompactSet::ESum(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_convex_representation(&self) -> bool {
        match self {
            CompactSet::ConvexPolytope(_) => true,
            CompactSet::PointCloud(p) => p.len() == 1,
            CompactSet::ESum(e) => e.terms().is_empty(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CompactSet::PointCloud(p) | CompactSet::ConvexPolytope(p) => p.len(),
            CompactSet::ESum(e) => e.terms().len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn check(&self, space: &Space) -> Result<()> {
        match self {
            CompactSet::PointCloud(p) | CompactSet::ConvexPolytope(p) => {
                p.iter().try_for_each(|v| space.check(v))
            }
            CompactSet::ESum(e) => match space.mode() {
                Mode::L1Grid(m) if m == e.bins() => Ok(()),
                Mode::L1Grid(m) => Err(Error::IncompatibleSpace(format!(
                    "E-sum on {} bins in an L1 grid of {m} bins",
                    e.bins()
                ))),
                _ => Err(Error::IncompatibleSpace(
                    "E-sums live in the L1 grid space only".into(),
                )),
            },
        }
    }
}

fn dedup_vectors(points: Vec<Vector>) -> Result<Vec<Vector>> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    if points.len() > MAX_POINTS {
        return Err(Error::TooManyPoints {
            count: points.len(),
            cap: MAX_POINTS,
        });
    }
    if points.iter().all(|p| matches!(p, Vector::Dense(_))) {
        let dim = points[0].as_dense().map_or(0, <[f64]>::len);
        let mut raw = Vec::with_capacity(points.len());
        for p in points {
            let c = match p {
                Vector::Dense(c) => c,
                Vector::Sparse(_) => unreachable!(),
            };
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.len(),
                });
            }
            raw.push(c);
        }
        return Ok(dedup_points(raw, DEDUP_TOLERANCE)
            .into_iter()
            .map(Vector::Dense)
            .collect());
    }
    if points.iter().any(|p| matches!(p, Vector::Dense(_))) {
        return Err(Error::IncompatibleSpace(
            "mixed dense and sparse points".into(),
        ));
    }
    let mut kept: Vec<Vector> = Vec::new();
    for p in points {
        let dup = kept.iter().any(|q| {
            let diff = p.sub(q);
            match diff {
                Vector::Sparse(m) => m.values().all(|x| x.abs() <= DEDUP_TOLERANCE),
                Vector::Dense(_) => false,
            }
        });
        if !dup {
            kept.push(p);
        }
    }
    Ok(kept)
}

/// Dense coordinates for a list of vectors: dense vectors as they are,
/// sparse vectors over the union of their supports (an isometry for ℓ2).
fn dense_coordinates(points: &[&[Vector]]) -> Vec<Vec<Vec<f64>>> {
    let sparse = points
        .iter()
        .flat_map(|s| s.iter())
        .any(|v| matches!(v, Vector::Sparse(_)));
    if !sparse {
        return points
            .iter()
            .map(|s| {
                s.iter()
                    .map(|v| v.as_dense().map(<[f64]>::to_vec).unwrap_or_default())
                    .collect()
            })
            .collect();
    }
    let mut keys: Vec<num_bigint::BigUint> = Vec::new();
    for s in points {
        for v in s.iter() {
            if let Vector::Sparse(m) = v {
                keys.extend(m.keys().cloned());
            }
        }
    }
    keys.sort();
    keys.dedup();
    points
        .iter()
        .map(|s| {
            s.iter()
                .map(|v| keys.iter().map(|k| v.coord(k)).collect())
                .collect()
        })
        .collect()
}

fn from_dense_coordinates(template: &[Vector], coords: Vec<Vec<f64>>) -> Vec<Vector> {
    if template.iter().all(|v| matches!(v, Vector::Dense(_))) {
        return coords.into_iter().map(Vector::Dense).collect();
    }
    let mut keys: Vec<num_bigint::BigUint> = Vec::new();
    for v in template {
        if let Vector::Sparse(m) = v {
            keys.extend(m.keys().cloned());
        }
    }
    keys.sort();
    keys.dedup();
    coords
        .into_iter()
        .map(|c| Vector::sparse(keys.iter().cloned().zip(c)))
        .collect()
}

fn pairwise_sums(a: &[Vector], b: &[Vector]) -> Result<Vec<Vector>> {
    let count = a.len().saturating_mul(b.len());
    if count > MAX_POINTS {
        return Err(Error::TooManyPoints {
            count,
            cap: MAX_POINTS,
        });
    }
    let mut out = Vec::with_capacity(count);
    for x in a {
        for y in b {
            out.push(x.add(y));
        }
    }
    Ok(out)
}

/// `A + B = {a + b}`.
pub fn minkowski_sum(space: &Space, a: &CompactSet, b: &CompactSet) -> Result<CompactSet> {
    a.check(space)?;
    b.check(space)?;
    match (a, b) {
        (CompactSet::PointCloud(x), CompactSet::PointCloud(y)) => {
            CompactSet::cloud(pairwise_sums(x, y)?)
        }
        (CompactSet::ConvexPolytope(x), CompactSet::ConvexPolytope(y)) => {
            convex_hull(space, &CompactSet::ConvexPolytope(pairwise_sums(x, y)?))
        }
        (CompactSet::ESum(x), CompactSet::ESum(y)) => Ok(CompactSet::ESum(x.minkowski(y)?)),
        _ => Err(Error::IncompatibleRepresentation(format!(
            "cannot add a {} and a {}",
            a.kind(),
            b.kind()
        ))),
    }
}

/// `λA = {λa}`. Polytopes and E-sums need `λ ≥ 0`; E-sums need `λ` exact.
pub fn scale(lambda: &Real, a: &CompactSet) -> Result<CompactSet> {
    match a {
        CompactSet::PointCloud(p) => {
            CompactSet::cloud(p.iter().map(|v| v.scaled(lambda.value())).collect())
        }
        CompactSet::ConvexPolytope(p) => {
            if lambda.is_negative() {
                return Err(Error::InvalidArgument(
                    "polytopes scale by non-negative factors only".into(),
                ));
            }
            CompactSet::polytope(p.iter().map(|v| v.scaled(lambda.value())).collect())
        }
        CompactSet::ESum(e) => {
            let r = lambda.as_rational().ok_or_else(|| {
                Error::InvalidArgument(format!("E-sums need an exact scale factor, got {lambda}"))
            })?;
            Ok(CompactSet::ESum(e.scale(r)?))
        }
    }
}

/// The polytope whose vertices are the extreme points of the input.
pub fn convex_hull(space: &Space, a: &CompactSet) -> Result<CompactSet> {
    a.check(space)?;
    let pts = match a {
        CompactSet::PointCloud(p) | CompactSet::ConvexPolytope(p) => p,
        CompactSet::ESum(_) => {
            return Err(Error::Unsupported(
                "convex hulls of E-sums are only available through support functions".into(),
            ))
        }
    };
    let coords = dense_coordinates(&[pts]).pop().unwrap_or_default();
    let ext = extreme_points(coords);
    Ok(CompactSet::ConvexPolytope(from_dense_coordinates(pts, ext)))
}

/// Hausdorff distance together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub value: Bracket,
    pub method: HausdorffMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HausdorffMethod {
    /// Max–min over finite point sets.
    PointPairs,
    /// Vertex-to-polytope Euclidean projections.
    VertexProjection,
    /// Closed form on the L1 grid.
    #[serde(rename = "exact-esum")]
    ExactESum,
    /// Non-Euclidean polytopes: edge sampling, `upper − lower` is the resolution.
    BoundarySampling,
    /// Cloud against polytope: exact planar search or certified branch and bound.
    HullGap,
}

/// `d_H(A, B)` for same-family pairs. Polytopes in non-Euclidean norms use
/// boundary sampling and report the upper end of the resolution bracket.
pub fn hausdorff_distance(space: &Space, a: &CompactSet, b: &CompactSet) -> Result<f64> {
    match (a, b) {
        (CompactSet::PointCloud(_), CompactSet::PointCloud(_))
        | (CompactSet::ConvexPolytope(_), CompactSet::ConvexPolytope(_))
        | (CompactSet::ESum(_), CompactSet::ESum(_)) => {
            Ok(hausdorff_report(space, a, b, &GapOptions::default())?.value.upper)
        }
        _ => Err(Error::IncompatibleRepresentation(format!(
            "Hausdorff distance between a {} and a {} (use hausdorff_report for cloud/polytope pairs)",
            a.kind(),
            b.kind()
        ))),
    }
}

/// `d_H(A, B)` as a bracket; also accepts cloud/polytope pairs.
pub fn hausdorff_report(
    space: &Space,
    a: &CompactSet,
    b: &CompactSet,
    opts: &GapOptions,
) -> Result<HausdorffReport> {
    a.check(space)?;
    b.check(space)?;
    match (a, b) {
        (CompactSet::ESum(x), CompactSet::ESum(y)) => Ok(HausdorffReport {
            value: Bracket::exact(rational_to_f64(x.hausdorff(y)?)),
            method: HausdorffMethod::ExactESum,
        }),
        (CompactSet::PointCloud(x), CompactSet::PointCloud(y)) => {
            let c = dense_coordinates(&[x, y]);
            let d = directed_cloud(space, &c[0], &c[1]).max(directed_cloud(space, &c[1], &c[0]));
            Ok(HausdorffReport {
                value: Bracket::exact(d),
                method: HausdorffMethod::PointPairs,
            })
        }
        (CompactSet::ConvexPolytope(x), CompactSet::ConvexPolytope(y)) => {
            let c = dense_coordinates(&[x, y]);
            if space.exponent().is_two() {
                let d = directed_to_polytope(&c[0], &c[1]).max(directed_to_polytope(&c[1], &c[0]));
                Ok(HausdorffReport {
                    value: Bracket::exact(d),
                    method: HausdorffMethod::VertexProjection,
                })
            } else {
                let ab = sampled_directed(space, &c[0], &c[1]);
                let ba = sampled_directed(space, &c[1], &c[0]);
                Ok(HausdorffReport {
                    value: ab.max(ba),
                    method: HausdorffMethod::BoundarySampling,
                })
            }
        }
        (CompactSet::PointCloud(x), CompactSet::ConvexPolytope(y))
        | (CompactSet::ConvexPolytope(y), CompactSet::PointCloud(x)) => {
            let c = dense_coordinates(&[x, y]);
            let to_poly = if space.exponent().is_two() {
                Bracket::exact(directed_to_polytope(&c[0], &c[1]))
            } else {
                sampled_directed(space, &c[0], &c[1])
            };
            let from_poly = hull_gap(space, &c[1], &c[0], opts);
            Ok(HausdorffReport {
                value: to_poly.max(from_poly),
                method: HausdorffMethod::HullGap,
            })
        }
        _ => Err(Error::IncompatibleRepresentation(format!(
            "Hausdorff distance between a {} and a {}",
            a.kind(),
            b.kind()
        ))),
    }
}

fn hull_gap(space: &Space, hull: &[Vec<f64>], cloud: &[Vec<f64>], opts: &GapOptions) -> Bracket {
    let dist = |p: &[f64], q: &[f64]| space.dense_distance(p, q);
    let metric = gap::Metric {
        distance: &dist,
        axis_scale: axis_scale(space),
        euclidean: space.exponent().is_two() && !matches!(space.mode(), Mode::L1Grid(_)),
    };
    gap::hull_to_cloud_gap(&metric, hull, cloud, opts)
}

/// `sup_{y ∈ conv P} d(y, S)` for a cloud `S` and a polytope `P`.
///
/// This is `d_H(S, P)` whenever `S ⊆ conv P`, for instance when `P` is a
/// hull of `S`, and skips the point-to-polytope half of [`hausdorff_report`].
pub fn hull_excess(
    space: &Space,
    cloud: &CompactSet,
    polytope: &CompactSet,
    opts: &GapOptions,
) -> Result<Bracket> {
    cloud.check(space)?;
    polytope.check(space)?;
    match (cloud, polytope) {
        (CompactSet::PointCloud(x), CompactSet::ConvexPolytope(y)) => {
            let c = dense_coordinates(&[x, y]);
            Ok(hull_gap(space, &c[1], &c[0], opts))
        }
        _ => Err(Error::IncompatibleRepresentation(format!(
            "hull excess needs a cloud and a polytope, got a {} and a {}",
            cloud.kind(),
            polytope.kind()
        ))),
    }
}

fn axis_scale(space: &Space) -> f64 {
    match space.mode() {
        Mode::L1Grid(m) => 1.0 / m as f64,
        _ => 1.0,
    }
}

fn directed_cloud(space: &Space, from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    let dist = |p: &[f64], q: &[f64]| space.dense_distance(p, q);
    if from.len().saturating_mul(to.len()) <= 4096 {
        return from
            .iter()
            .map(|p| to.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
    }
    let tree = KdTree::new(to, axis_scale(space));
    from.iter()
        .map(|p| tree.nearest(p, &dist).1)
        .fold(0.0, f64::max)
}

/// `max_{a ∈ from} d(a, conv(to))`; the distance to a convex set is convex,
/// so the supremum over a polytope sits at one of its vertices.
fn directed_to_polytope(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    from.iter()
        .map(|p| distance_to_hull(to, p))
        .fold(0.0, f64::max)
}

/// Non-Euclidean fallback: distances to samples along every vertex-pair
/// segment of `to` (plus its Euclidean projection). In the plane the nearest
/// point lies on an edge, so the result exceeds the truth by at most half a
/// sample spacing; in higher dimension only the upper end is certified.
fn sampled_directed(space: &Space, from: &[Vec<f64>], to: &[Vec<f64>]) -> Bracket {
    let dist = |p: &[f64], q: &[f64]| space.dense_distance(p, q);
    let mut spacing: f64 = 0.0;
    let mut samples: Vec<Vec<f64>> = to.to_vec();
    for i in 0..to.len() {
        for j in i + 1..to.len() {
            spacing = spacing.max(dist(&to[i], &to[j]) / BOUNDARY_SAMPLES as f64);
            for k in 1..BOUNDARY_SAMPLES {
                let t = k as f64 / BOUNDARY_SAMPLES as f64;
                samples.push(
                    to[i]
                        .iter()
                        .zip(&to[j])
                        .map(|(a, b)| a + t * (b - a))
                        .collect(),
                );
            }
        }
    }
    let upper = from
        .iter()
        .map(|p| {
            let proj = project_onto_hull(to, p).point;
            samples
                .iter()
                .map(|q| dist(p, q))
                .fold(dist(p, &proj), f64::min)
        })
        .fold(0.0, f64::max);
    let planar = AffineFrame::of(to, 1e-12).dimension() <= 2;
    let lower = if planar {
        (upper - 0.5 * spacing).max(0.0)
    } else {
        0.0
    };
    Bracket { lower, upper }
}

/// `h_A(f) = sup_{a ∈ A} ⟨f, a⟩`.
pub fn support_function(space: &Space, a: &CompactSet, f: &Functional) -> Result<f64> {
    a.check(space)?;
    space.check(f.coefficients())?;
    match a {
        CompactSet::PointCloud(p) | CompactSet::ConvexPolytope(p) => Ok(p
            .iter()
            .map(|v| space.pair_unchecked(f, v))
            .fold(f64::NEG_INFINITY, f64::max)),
        CompactSet::ESum(e) => {
            let coeffs = f.coefficients().as_dense().ok_or_else(|| {
                Error::IncompatibleSpace("E-sum support needs a per-bin functional".into())
            })?;
            e.support(coeffs)
        }
    }
}

/// `‖A‖ = sup_{a ∈ A} ‖a‖`.
pub fn set_norm(space: &Space, a: &CompactSet) -> Result<f64> {
    a.check(space)?;
    Ok(match a {
        CompactSet::PointCloud(p) | CompactSet::ConvexPolytope(p) => p
            .iter()
            .map(|v| space.norm_unchecked(v))
            .fold(0.0, f64::max),
        CompactSet::ESum(e) => rational_to_f64(e.norm_exact()),
    })
}

/// Distance from a per-bin function to an E-sum, in exact arithmetic.
pub fn dist_point_to_eset(v: &[Rational], e: &ESum) -> Result<Rational> {
    e.distance_from(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityWitness {
    /// The midpoint that is far from the set (per-bin values for E-sums).
    pub midpoint: Vector,
    pub distance: f64,
    /// Exact distance, when the set lives on the L1 grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_distance: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCheck {
    pub convex: bool,
    pub witness: Option<ConvexityWitness>,
}

/// Checks midpoints against the set. Clouds test every pair; E-sums test the
/// midpoint of `0` and the full function `Σ w_k 1_{I_k}`, which is the worst
/// midpoint. The witness is reported whenever one is found, convex or not.
pub fn is_convex_within(space: &Space, a: &CompactSet, eps: f64) -> Result<ConvexityCheck> {
    a.check(space)?;
    match a {
        CompactSet::ConvexPolytope(_) => Ok(ConvexityCheck {
            convex: true,
            witness: None,
        }),
        CompactSet::PointCloud(p) => {
            let coords = dense_coordinates(&[p]).pop().unwrap_or_default();
            let dist = |x: &[f64], y: &[f64]| space.dense_distance(x, y);
            let tree = KdTree::new(&coords, axis_scale(space));
            let mut worst: Option<(usize, usize, f64)> = None;
            for i in 0..coords.len() {
                for j in i + 1..coords.len() {
                    let mid: Vec<f64> = coords[i]
                        .iter()
                        .zip(&coords[j])
                        .map(|(x, y)| 0.5 * (x + y))
                        .collect();
                    let d = tree.nearest(&mid, &dist).1;
                    if worst.is_none_or(|w| d > w.2) {
                        worst = Some((i, j, d));
                    }
                }
            }
            let witness = worst.map(|(i, j, d)| ConvexityWitness {
                midpoint: p[i].add(&p[j]).scaled(0.5),
                distance: d,
                exact_distance: None,
            });
            Ok(ConvexityCheck {
                convex: witness.as_ref().is_none_or(|w| w.distance <= eps),
                witness,
            })
        }
        CompactSet::ESum(e) => {
            if e.terms().is_empty() {
                return Ok(ConvexityCheck {
                    convex: true,
                    witness: None,
                });
            }
            let half = Rational::new(1, 2);
            let mid: Vec<Rational> = e.amplitudes().into_iter().map(|x| x * half).collect();
            let d = e.distance_from(&mid)?;
            let df = rational_to_f64(d);
            Ok(ConvexityCheck {
                convex: df <= eps,
                witness: Some(ConvexityWitness {
                    midpoint: Vector::Dense(mid.iter().map(|x| rational_to_f64(*x)).collect()),
                    distance: df,
                    exact_distance: Some(format_rational(d)),
                }),
            })
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "repr", rename_all = "lowercase")]
enum SetRepr {
    Cloud { points: Vec<Vector> },
    Polytope { vertices: Vec<Vector> },
    Esum { bins: u64, terms: Vec<TermRepr> },
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    weight: String,
    lo: String,
    hi: String,
}

impl TryFrom<SetRepr> for CompactSet {
    type Error = Error;

    fn try_from(r: SetRepr) -> Result<Self> {
        match r {
            SetRepr::Cloud { points } => CompactSet::cloud(points),
            SetRepr::Polytope { vertices } => CompactSet::polytope(vertices),
            SetRepr::Esum { bins, terms } => {
                let terms = terms
                    .into_iter()
                    .map(|t| {
                        Ok((
                            parse_rational(&t.weight)?,
                            parse_rational(&t.lo)?,
                            parse_rational(&t.hi)?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(CompactSet::ESum(ESum::new(bins, terms)?))
            }
        }
    }
}

impl From<CompactSet> for SetRepr {
    fn from(s: CompactSet) -> Self {
        match s {
            CompactSet::PointCloud(points) => SetRepr::Cloud { points },
            CompactSet::ConvexPolytope(vertices) => SetRepr::Polytope { vertices },
            CompactSet::ESum(e) => SetRepr::Esum {
                bins: e.bins(),
                terms: e
                    .terms()
                    .iter()
                    .map(|t| {
                        let (lo, hi) = e.interval(t);
                        TermRepr {
                            weight: format_rational(t.weight),
                            lo: format_rational(lo),
                            hi: format_rational(hi),
                        }
                    })
                    .collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn pts(raw: &[&[f64]]) -> Vec<Vector> {
        raw.iter().map(|p| Vector::dense(p.to_vec())).collect()
    }

    fn e2() -> Space {
        Space::euclidean(2)
    }

    #[test]
    fn minkowski_of_two_segments_clouds() {
        let a = CompactSet::cloud(pts(&[&[0.0, 0.0], &[1.0, 0.0]])).unwrap();
        let b = CompactSet::cloud(pts(&[&[0.0, 0.0], &[0.0, 1.0]])).unwrap();
        let s = minkowski_sum(&e2(), &a, &b).unwrap();
        assert_eq!(
            s,
            CompactSet::cloud(pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])).unwrap()
        );
        let zero = CompactSet::singleton(e2().zero());
        assert_eq!(minkowski_sum(&e2(), &a, &zero).unwrap(), a);
    }

    #[test]
    fn minkowski_rejects_mixed_representations() {
        let a = CompactSet::cloud(pts(&[&[0.0, 0.0]])).unwrap();
        let b = CompactSet::polytope(pts(&[&[0.0, 0.0]])).unwrap();
        assert!(matches!(
            minkowski_sum(&e2(), &a, &b),
            Err(Error::IncompatibleRepresentation(_))
        ));
    }

    #[test]
    fn scaling() {
        let a = CompactSet::cloud(pts(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_eq!(scale(&Real::integer(1), &a).unwrap(), a);
        assert_eq!(
            scale(&Real::integer(0), &a).unwrap(),
            CompactSet::singleton(e2().zero())
        );
        let p = CompactSet::polytope(pts(&[&[1.0, 0.0]])).unwrap();
        assert!(scale(&Real::integer(-1), &p).is_err());
        let e = CompactSet::ESum(
            ESum::single(4, Rational::one(), Rational::new(0, 1), Rational::one()).unwrap(),
        );
        assert!(scale(&Real::generic(0.3), &e).is_err());
    }

    #[test]
    fn hull_examples() {
        let line = Space::euclidean(1);
        let c = CompactSet::cloud(pts(&[&[0.0], &[1.0], &[0.5]])).unwrap();
        assert_eq!(
            convex_hull(&line, &c).unwrap(),
            CompactSet::ConvexPolytope(pts(&[&[0.0], &[1.0]]))
        );
        let h = convex_hull(&line, &c).unwrap();
        assert_eq!(convex_hull(&line, &h).unwrap(), h);
        let e = CompactSet::ESum(ESum::zero(4));
        assert!(convex_hull(&Space::l1_grid(4).unwrap(), &e).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let s = e2();
        let a = CompactSet::cloud(pts(&[&[0.0, 0.0], &[3.0, 1.0]])).unwrap();
        assert_eq!(hausdorff_distance(&s, &a, &a).unwrap(), 0.0);
        let v = CompactSet::singleton(Vector::dense([3.0, 4.0]));
        let o = CompactSet::singleton(s.zero());
        assert_eq!(hausdorff_distance(&s, &o, &v).unwrap(), 5.0);
        let line = Space::euclidean(1);
        let two = CompactSet::cloud(pts(&[&[0.0], &[1.0]])).unwrap();
        let zero = CompactSet::singleton(Vector::dense([0.0]));
        assert_eq!(hausdorff_distance(&line, &two, &zero).unwrap(), 1.0);
        assert!(
            hausdorff_distance(&s, &a, &CompactSet::polytope(pts(&[&[0.0, 0.0]])).unwrap())
                .is_err()
        );
    }

    #[test]
    fn polytope_hausdorff_uses_interior_of_edges() {
        // A point above the middle of a long segment is closer to the edge than to either vertex.
        let s = e2();
        let seg = CompactSet::polytope(pts(&[&[-1.0, 0.0], &[1.0, 0.0]])).unwrap();
        let pt = CompactSet::polytope(pts(&[&[0.0, 0.5]])).unwrap();
        let d = hausdorff_distance(&s, &seg, &pt).unwrap();
        assert!((d - 1.25f64.sqrt()).abs() < 1e-12);
        let d2 = hausdorff_distance(&s, &pt, &seg).unwrap();
        assert_eq!(d, d2);
    }

    #[test]
    fn non_euclidean_polytope_distance_brackets_truth() {
        let l1: Space = "l1:2".parse().unwrap();
        let seg = CompactSet::polytope(pts(&[&[-1.0, 0.0], &[1.0, 0.0]])).unwrap();
        let pt = CompactSet::polytope(pts(&[&[0.0, 0.5]])).unwrap();
        let r = hausdorff_report(&l1, &pt, &seg, &GapOptions::default()).unwrap();
        // Farthest point of the segment from (0, 1/2) in ℓ1 is an end: 1 + 1/2.
        assert!(r.value.lower <= 1.5 + 1e-12 && r.value.upper >= 1.5 - 1e-12);
        assert_eq!(r.method, HausdorffMethod::BoundarySampling);
    }

    #[test]
    fn support_examples() {
        let s = e2();
        let a = CompactSet::singleton(Vector::dense([2.0, -1.0]));
        let f = Functional::dense([0.5, 3.0]);
        assert_eq!(support_function(&s, &a, &f).unwrap(), 1.0 - 3.0);
        let sq = CompactSet::polytope(pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]))
            .unwrap();
        assert_eq!(
            support_function(&s, &sq, &Functional::dense([1.0, 0.0])).unwrap(),
            1.0
        );
        let g = Space::l1_grid(4).unwrap();
        let e = CompactSet::ESum(
            ESum::single(4, Rational::one(), Rational::new(0, 1), Rational::one()).unwrap(),
        );
        assert_eq!(
            support_function(&g, &e, &Functional::dense([1.0, -1.0, 1.0, -1.0])).unwrap(),
            0.5
        );
    }

    #[test]
    fn norm_examples() {
        let s = e2();
        assert_eq!(set_norm(&s, &CompactSet::singleton(s.zero())).unwrap(), 0.0);
        let a = CompactSet::cloud(pts(&[&[3.0, 0.0], &[0.0, -4.0]])).unwrap();
        assert_eq!(set_norm(&s, &a).unwrap(), 4.0);
    }

    #[test]
    fn convexity_checks() {
        let s = Space::euclidean(1);
        let two = CompactSet::cloud(pts(&[&[0.0], &[1.0]])).unwrap();
        let check = is_convex_within(&s, &two, 0.4).unwrap();
        assert!(!check.convex);
        assert_eq!(check.witness.unwrap().distance, 0.5);
        let poly = CompactSet::polytope(pts(&[&[0.0], &[1.0]])).unwrap();
        assert!(is_convex_within(&s, &poly, 0.0).unwrap().convex);
        let g = Space::l1_grid(6).unwrap();
        let e = CompactSet::ESum(
            ESum::single(6, Rational::one(), Rational::new(0, 1), Rational::one()).unwrap(),
        );
        let c = is_convex_within(&g, &e, 0.4).unwrap();
        assert!(!c.convex);
        assert_eq!(c.witness.unwrap().exact_distance.as_deref(), Some("1/2"));
    }

    #[test]
    fn json_shapes() {
        let a = CompactSet::cloud(pts(&[&[0.1, 0.2]])).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"repr":"cloud","points":[[0.1,0.2]]}"#
        );
        let e = CompactSet::ESum(
            ESum::single(
                4,
                Rational::from_integer(2),
                Rational::new(0, 1),
                Rational::new(1, 2),
            )
            .unwrap(),
        );
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(
            json,
            r#"{"repr":"esum","bins":4,"terms":[{"weight":"2","lo":"0","hi":"1/2"}]}"#
        );
        let back: CompactSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<CompactSet>(r#"{"repr":"cloud","points":[]}"#).is_err());
    }
}
