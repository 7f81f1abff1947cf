//! Multifunctions `F: [0,1] → 2^X \ {∅}`.
//!
//! Every multifunction is a pure evaluation rule with a declared bound
//! `M(F) ≥ sup_t ‖F(t)‖`. The built-ins cover constants, singleton-valued
//! rules, piecewise-constant step functions, the L1 construction on prime
//! partitions, the biorthogonal construction with empty `I(F)`, and the
//! pointwise convex hull of any of the finite-dimensional ones.

mod biorth;
mod l1;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::partition::TaggedPartition;
use crate::real::{format_rational, rational_to_f64, Rational, Real};
use crate::sets::{convex_hull, set_norm, support_function, CompactSet};
use crate::space::{Functional, Space, Vector};

pub use biorth::{
    base_interval, base_interval_contains, base_level, in_pi, separating_union, BaseInterval,
    Biorthogonal, SeparatingUnion, BIORTH_TRUNCATION_BITS,
};
pub use l1::L1Example;

/// Slack allowed when checking `‖F(t)‖ ≤ M`.
pub const BOUND_SLACK: f64 = 1e-12;

pub trait Multifunction: Send + Sync {
    fn name(&self) -> String;

    fn space(&self) -> &Space;

    /// `F(t)`. Multifunctions that cannot be materialized return a truncation.
    fn eval(&self, t: &Real) -> Result<CompactSet>;

    /// Declared `M(F)`.
    fn bound(&self) -> f64;

    fn convex_valued(&self) -> bool;

    /// Whether [`eval`](Self::eval) returns the full value.
    fn materializable(&self) -> bool {
        true
    }

    /// `h_{F(t)}(f)`.
    fn support_at(&self, t: &Real, f: &Functional) -> Result<f64> {
        support_function(self.space(), &self.eval(t)?, f)
    }

    /// Tags in `[lo, hi]` at which the evaluation rule takes a special branch.
    fn special_tags(&self, _lo: Rational, _hi: Rational) -> Vec<Real> {
        Vec::new()
    }

    /// Functionals that separate the sums over `coarse` and `fine`, used to
    /// bound `d_H` from below when sums cannot be materialized.
    fn witness_functionals(
        &self,
        _coarse: &TaggedPartition,
        _fine: &TaggedPartition,
    ) -> Result<Vec<Functional>> {
        Ok(Vec::new())
    }
}

impl fmt::Debug for dyn Multifunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multifunction({})", self.name())
    }
}

pub type SharedMultifunction = Arc<dyn Multifunction>;

/// `F(t)` with the bound `‖F(t)‖ ≤ M(F)` checked.
pub fn evaluate(f: &dyn Multifunction, t: &Real) -> Result<CompactSet> {
    let value = f.eval(t)?;
    let norm = set_norm(f.space(), &value)?;
    if norm > f.bound() + BOUND_SLACK {
        return Err(Error::Precondition(format!(
            "{} at {t}: ‖F(t)‖ = {norm} exceeds the declared bound {}",
            f.name(),
            f.bound()
        )));
    }
    Ok(value)
}

fn tag_below(t: &Real, b: Rational) -> bool {
    match t.as_rational() {
        Some(r) => r < b,
        None => t.value() < rational_to_f64(b),
    }
}

/// `F(t) = A`.
#[derive(Clone, Debug)]
pub struct ConstantSet {
    space: Space,
    set: CompactSet,
    bound: f64,
}

pub fn constant_set(space: &Space, set: CompactSet) -> Result<ConstantSet> {
    let bound = set_norm(space, &set)?;
    Ok(ConstantSet {
        space: *space,
        set,
        bound,
    })
}

impl ConstantSet {
    pub fn value(&self) -> &CompactSet {
        &self.set
    }
}

impl Multifunction for ConstantSet {
    fn name(&self) -> String {
        "constant".into()
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn eval(&self, _t: &Real) -> Result<CompactSet> {
        Ok(self.set.clone())
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn convex_valued(&self) -> bool {
        self.set.is_convex_representation()
    }
}

type PointRule = dyn Fn(&Real) -> Vector + Send + Sync;
type SpecialRule = dyn Fn(Rational, Rational) -> Vec<Real> + Send + Sync;

/// `F(t) = {f(t)}`.
#[derive(Clone)]
pub struct Singleton {
    space: Space,
    name: String,
    rule: Arc<PointRule>,
    bound: f64,
    special: Option<Arc<SpecialRule>>,
}

impl fmt::Debug for Singleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Singleton")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .finish()
    }
}

/// Wraps a point rule with a declared bound `sup_t ‖f(t)‖ ≤ bound`.
pub fn singleton_of(
    space: &Space,
    name: impl Into<String>,
    bound: f64,
    rule: impl Fn(&Real) -> Vector + Send + Sync + 'static,
) -> Singleton {
    Singleton {
        space: *space,
        name: name.into(),
        rule: Arc::new(rule),
        bound,
        special: None,
    }
}

impl Singleton {
    pub fn with_special_tags(
        mut self,
        rule: impl Fn(Rational, Rational) -> Vec<Real> + Send + Sync + 'static,
    ) -> Self {
        self.special = Some(Arc::new(rule));
        self
    }
}

/// `f(t) = t·v`.
pub fn linear_singleton(space: &Space, v: Vector) -> Result<Singleton> {
    let bound = space.norm(&v)?;
    Ok(singleton_of(space, "singleton:linear", bound, move |t| {
        v.scaled(t.value())
    }))
}

/// `f(t) = Σ_k c_k t^k`, bounded on [0,1] by `Σ_k ‖c_k‖`.
pub fn poly_singleton(space: &Space, coefficients: Vec<Vector>) -> Result<Singleton> {
    if coefficients.is_empty() {
        return Err(Error::InvalidArgument(
            "polynomial needs at least one coefficient".into(),
        ));
    }
    let mut bound = 0.0;
    for c in &coefficients {
        bound += space.norm(c)?;
    }
    let zero = space.zero();
    Ok(singleton_of(space, "singleton:poly", bound, move |t| {
        // Horner from the top coefficient.
        coefficients
            .iter()
            .rev()
            .fold(zero.clone(), |acc, c| acc.scaled(t.value()).add(c))
    }))
}

/// `f(t) = v` for exact rational tags, `0` for generic ones.
pub fn rational_indicator(space: &Space, v: Vector) -> Result<Singleton> {
    let bound = space.norm(&v)?;
    let zero = space.zero();
    Ok(singleton_of(space, "singleton:indicator", bound, move |t| {
        if t.is_exact() {
            v.clone()
        } else {
            zero.clone()
        }
    })
    .with_special_tags(|lo, hi| vec![Real::exact(lo), Real::exact((lo + hi) / 2), Real::exact(hi)]))
}

impl Multifunction for Singleton {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn eval(&self, t: &Real) -> Result<CompactSet> {
        let v = (self.rule)(t);
        self.space.check(&v)?;
        Ok(CompactSet::singleton(v))
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn convex_valued(&self) -> bool {
        true
    }

    fn special_tags(&self, lo: Rational, hi: Rational) -> Vec<Real> {
        self.special.as_ref().map(|s| s(lo, hi)).unwrap_or_default()
    }
}

/// Piecewise-constant `F`: pieces are `[a, b)`, the last one `[a, 1]`.
#[derive(Clone, Debug)]
pub struct Step {
    space: Space,
    starts: Vec<Rational>,
    values: Vec<CompactSet>,
    bound: f64,
}

/// `pieces` must tile [0,1] in order: `(lo, hi, value)` with matching ends.
pub fn step_multifunction(
    space: &Space,
    pieces: Vec<(Rational, Rational, CompactSet)>,
) -> Result<Step> {
    if pieces.is_empty() {
        return Err(Error::InvalidArgument(
            "step multifunction needs at least one piece".into(),
        ));
    }
    let mut expected = Rational::from_integer(0);
    let mut starts = Vec::with_capacity(pieces.len());
    let mut values = Vec::with_capacity(pieces.len());
    let mut bound: f64 = 0.0;
    for (lo, hi, value) in pieces {
        if lo != expected {
            let kind = if lo > expected { "gap" } else { "overlap" };
            return Err(Error::InvalidArgument(format!(
                "pieces leave a {kind} at {}",
                format_rational(expected)
            )));
        }
        if hi <= lo {
            return Err(Error::InvalidArgument(format!(
                "empty piece [{}, {}]",
                format_rational(lo),
                format_rational(hi)
            )));
        }
        value.check(space)?;
        bound = bound.max(set_norm(space, &value)?);
        starts.push(lo);
        values.push(value);
        expected = hi;
    }
    if expected != Rational::from_integer(1) {
        return Err(Error::InvalidArgument(format!(
            "pieces end at {} instead of 1",
            format_rational(expected)
        )));
    }
    Ok(Step {
        space: *space,
        starts,
        values,
        bound,
    })
}

impl Step {
    pub fn pieces(&self) -> impl Iterator<Item = (Rational, &CompactSet)> {
        self.starts.iter().copied().zip(&self.values)
    }

    fn piece_of(&self, t: &Real) -> usize {
        self.starts
            .iter()
            .rposition(|&s| !tag_below(t, s))
            .unwrap_or(0)
    }
}

impl Multifunction for Step {
    fn name(&self) -> String {
        "step".into()
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn eval(&self, t: &Real) -> Result<CompactSet> {
        Ok(self.values[self.piece_of(t)].clone())
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn convex_valued(&self) -> bool {
        self.values.iter().all(CompactSet::is_convex_representation)
    }

    fn special_tags(&self, lo: Rational, hi: Rational) -> Vec<Real> {
        self.starts[1..]
            .iter()
            .filter(|&&s| lo <= s && s <= hi)
            .map(|&s| Real::exact(s))
            .collect()
    }
}

/// `(conv F)(t) = conv F(t)`.
#[derive(Clone, Debug)]
pub struct ConvLift {
    inner: SharedMultifunction,
}

pub fn conv_lift(inner: SharedMultifunction) -> Result<ConvLift> {
    if !inner.materializable() {
        return Err(Error::Unsupported(format!(
            "{} cannot be hulled pointwise",
            inner.name()
        )));
    }
    if matches!(inner.space().mode(), crate::space::Mode::L1Grid(_)) {
        return Err(Error::Unsupported(
            "convex hulls of E-sum values are out of scope".into(),
        ));
    }
    Ok(ConvLift { inner })
}

impl Multifunction for ConvLift {
    fn name(&self) -> String {
        format!("conv({})", self.inner.name())
    }

    fn space(&self) -> &Space {
        self.inner.space()
    }

    fn eval(&self, t: &Real) -> Result<CompactSet> {
        convex_hull(self.inner.space(), &self.inner.eval(t)?)
    }

    fn bound(&self) -> f64 {
        self.inner.bound()
    }

    fn convex_valued(&self) -> bool {
        true
    }

    fn support_at(&self, t: &Real, f: &Functional) -> Result<f64> {
        self.inner.support_at(t, f)
    }

    fn special_tags(&self, lo: Rational, hi: Rational) -> Vec<Real> {
        self.inner.special_tags(lo, hi)
    }
}

/// Shape of the random step multifunctions used for the conv comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomStepShape {
    pub pieces: usize,
    pub points_per_piece: usize,
}

impl Default for RandomStepShape {
    fn default() -> Self {
        RandomStepShape {
            pieces: 2,
            points_per_piece: 2,
        }
    }
}

/// A seeded cloud-valued step multifunction in `space`.
///
/// Split points are dyadic rationals drawn between 1/5 and 4/5 of the
/// remaining length; cloud points are Gaussian, rescaled to norm at most 1.
pub fn random_step_multifunction(space: &Space, shape: RandomStepShape, seed: u64) -> Result<Step> {
    let dim = space.dimension().ok_or_else(|| {
        Error::Unsupported("random step multifunctions need a dense space".into())
    })?;
    if shape.pieces == 0 || shape.points_per_piece == 0 {
        return Err(Error::InvalidArgument(
            "need at least one piece and one point".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const GRID: i64 = 1 << 16;
    let mut cuts = vec![0i64];
    for k in 1..shape.pieces {
        let last = *cuts.last().expect("non-empty");
        let left = shape.pieces - k;
        let room = (GRID - last) as f64 / (left + 1) as f64;
        let lo = (room * 0.4).ceil().max(1.0) as i64;
        let hi = (room * 1.6).floor().max(lo as f64) as i64;
        let c = last + rng.random_range(lo..=hi);
        cuts.push(c.min(GRID - left as i64));
    }
    cuts.push(GRID);
    let mut pieces = Vec::with_capacity(shape.pieces);
    for w in cuts.windows(2) {
        let mut points = Vec::with_capacity(shape.points_per_piece);
        for _ in 0..shape.points_per_piece {
            let raw: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let v = Vector::dense(raw);
            let n = space.norm(&v)?;
            let radius: f64 = rng.random_range(0.05..=1.0);
            points.push(v.scaled(radius / n.max(f64::MIN_POSITIVE)));
        }
        pieces.push((
            Rational::new(w[0], GRID),
            Rational::new(w[1], GRID),
            CompactSet::cloud(points)?,
        ));
    }
    step_multifunction(space, pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> Vector {
        Space::euclidean(2).basis(i).unwrap()
    }

    #[test]
    fn constants() {
        let s = Space::euclidean(2);
        let z = constant_set(&s, CompactSet::singleton(s.zero())).unwrap();
        assert_eq!(z.bound(), 0.0);
        assert_eq!(
            z.eval(&Real::ratio(1, 3)).unwrap(),
            CompactSet::singleton(s.zero())
        );
        let sq_pts = vec![s.zero(), e(0), e(1), e(0).add(&e(1))];
        let cloud = constant_set(&s, CompactSet::cloud(sq_pts.clone()).unwrap()).unwrap();
        assert!((cloud.bound() - 2f64.sqrt()).abs() < 1e-15);
        assert!(!cloud.convex_valued());
        assert!(constant_set(&s, CompactSet::polytope(sq_pts).unwrap())
            .unwrap()
            .convex_valued());
    }

    #[test]
    fn singletons() {
        let s = Space::euclidean(2);
        let lin = linear_singleton(&s, e(0)).unwrap();
        assert_eq!(
            lin.eval(&Real::ratio(1, 2)).unwrap(),
            CompactSet::singleton(Vector::dense([0.5, 0.0]))
        );
        let c = poly_singleton(&s, vec![Vector::dense([1.0, 2.0])]).unwrap();
        assert_eq!(
            c.eval(&Real::generic(0.7)).unwrap(),
            CompactSet::singleton(Vector::dense([1.0, 2.0]))
        );
        let p = poly_singleton(&s, vec![s.zero(), s.zero(), e(1)]).unwrap();
        assert_eq!(
            p.eval(&Real::ratio(1, 2)).unwrap(),
            CompactSet::singleton(Vector::dense([0.0, 0.25]))
        );
        let ind = rational_indicator(&s, e(0)).unwrap();
        assert_eq!(
            ind.eval(&Real::ratio(1, 3)).unwrap(),
            CompactSet::singleton(e(0))
        );
        assert_eq!(
            ind.eval(&Real::generic(0.5f64.sqrt())).unwrap(),
            CompactSet::singleton(s.zero())
        );
    }

    #[test]
    fn steps() {
        let s = Space::euclidean(2);
        let half = Rational::new(1, 2);
        let f = step_multifunction(
            &s,
            vec![
                (
                    Rational::from_integer(0),
                    half,
                    CompactSet::singleton(s.zero()),
                ),
                (
                    half,
                    Rational::from_integer(1),
                    CompactSet::singleton(e(0).scaled(3.0)),
                ),
            ],
        )
        .unwrap();
        assert_eq!(
            f.eval(&Real::ratio(1, 4)).unwrap(),
            CompactSet::singleton(s.zero())
        );
        assert_eq!(
            f.eval(&Real::ratio(1, 2)).unwrap(),
            CompactSet::singleton(e(0).scaled(3.0))
        );
        assert_eq!(
            f.eval(&Real::integer(1)).unwrap(),
            CompactSet::singleton(e(0).scaled(3.0))
        );
        assert_eq!(f.bound(), 3.0);
        let gap = step_multifunction(
            &s,
            vec![
                (
                    Rational::from_integer(0),
                    Rational::new(1, 3),
                    CompactSet::singleton(s.zero()),
                ),
                (
                    half,
                    Rational::from_integer(1),
                    CompactSet::singleton(s.zero()),
                ),
            ],
        );
        assert!(gap.is_err());
    }

    #[test]
    fn conv_lift_hulls_pointwise() {
        let s = Space::euclidean(2);
        let two = CompactSet::cloud(vec![s.zero(), e(0)]).unwrap();
        let f: SharedMultifunction = Arc::new(constant_set(&s, two).unwrap());
        let g = conv_lift(f.clone()).unwrap();
        assert_eq!(
            g.eval(&Real::ratio(1, 2)).unwrap(),
            CompactSet::polytope(vec![s.zero(), e(0)]).unwrap()
        );
        assert_eq!(g.bound(), f.bound());
        let lin: SharedMultifunction = Arc::new(linear_singleton(&s, e(1)).unwrap());
        let lifted = conv_lift(lin.clone()).unwrap();
        let t = Real::ratio(2, 7);
        assert_eq!(
            lifted.eval(&t).unwrap().points(),
            lin.eval(&t).unwrap().points()
        );
    }

    #[test]
    fn bound_is_checked_on_evaluation() {
        let s = Space::euclidean(2);
        let liar = singleton_of(&s, "liar", 0.5, |_| Vector::dense([1.0, 0.0]));
        assert!(matches!(
            evaluate(&liar, &Real::ratio(1, 2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn random_steps_are_seeded() {
        let s = Space::euclidean(3);
        let a = random_step_multifunction(&s, RandomStepShape::default(), 9).unwrap();
        let b = random_step_multifunction(&s, RandomStepShape::default(), 9).unwrap();
        let t = Real::ratio(1, 10);
        assert_eq!(a.eval(&t).unwrap(), b.eval(&t).unwrap());
        assert!(a.bound() <= 1.0 + 1e-12);
        let shape = RandomStepShape {
            pieces: 5,
            points_per_piece: 3,
        };
        let c = random_step_multifunction(&s, shape, 1).unwrap();
        assert_eq!(c.pieces().count(), 5);
    }
}
