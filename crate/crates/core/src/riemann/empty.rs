//! The certificate that the biorthogonal multifunction has no Cauchy sums.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::sum_support;
use crate::error::{Error, Result};
use crate::multifn::{in_pi, separating_union, Biorthogonal};
use crate::partition::TaggedPartition;
use crate::real::{format_rational, rational_to_f64, Rational, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmptyCertificate {
    /// `|T_n|`, distinct tags of the coarse partition.
    pub coarse_tags: usize,
    pub fine_intervals: usize,
    pub fine_diameter: String,
    /// `A = T_m \ T_n`.
    pub separated_points: Vec<String>,
    /// Base intervals of `U`, as `(index, interval)`.
    pub union: Vec<(u64, String)>,
    /// Bit positions of `i = π⁻¹(U)`.
    pub index_bits: Vec<u64>,
    /// `sup f_i(S_n(F))`, exact.
    pub support_coarse: String,
    /// `sup f_i(S_m(F)) = Σ_{t_j ∈ A} |Δ_j|`, exact.
    pub support_fine: String,
    /// The same two values through the generic support evaluation.
    pub support_coarse_value: f64,
    pub support_fine_value: f64,
    pub lower_bound: String,
    /// `1 − |T_n| d(Γ_m)`.
    pub guaranteed_bound: String,
    pub lower_bound_value: f64,
    pub guaranteed_bound_value: f64,
    /// `lower_bound ≥ guaranteed_bound > 1/2` and `support_coarse = 0`.
    pub holds: bool,
}

/// Builds the separating functional `f_i`, `i = π⁻¹(U)`, for the pair
/// `(Γ_n, Γ_m)` and evaluates the support of both sums at it.
///
/// Requires exact tags and `d(Γ_m) < 1/(2|T_n|)`.
pub fn empty_example_verifier(
    coarse: &TaggedPartition,
    fine: &TaggedPartition,
) -> Result<EmptyCertificate> {
    let mut t_n: Vec<Rational> = coarse
        .tags()
        .iter()
        .map(Real::require_exact)
        .collect::<Result<_>>()?;
    t_n.sort();
    t_n.dedup();
    let t_m: Vec<Rational> = fine
        .tags()
        .iter()
        .map(Real::require_exact)
        .collect::<Result<_>>()?;
    let k = Rational::from_integer(t_n.len() as i64);
    let d_m = fine.diameter();
    if d_m * k * 2 >= Rational::from_integer(1) {
        return Err(Error::Precondition(format!(
            "d(Γ_m) = {} is not below 1/(2|T_n|) = 1/{}",
            format_rational(d_m),
            2 * t_n.len()
        )));
    }
    let mut a: Vec<Rational> = t_m
        .iter()
        .copied()
        .filter(|t| t_n.binary_search(t).is_err())
        .collect();
    a.sort();
    a.dedup();
    let union = separating_union(&a, &t_n)?;

    let exact_support = |gamma: &TaggedPartition, tags: &[Rational]| -> Rational {
        tags.iter()
            .enumerate()
            .filter(|(_, t)| in_pi(&union.index, **t))
            .map(|(j, _)| gamma.length(j))
            .fold(Rational::zero(), |acc, l| acc + l)
    };
    let coarse_exact: Vec<Rational> = coarse
        .tags()
        .iter()
        .map(Real::require_exact)
        .collect::<Result<_>>()?;
    let support_coarse = exact_support(coarse, &coarse_exact);
    let support_fine = exact_support(fine, &t_m);

    let f = Biorthogonal::new();
    let functional = Biorthogonal::f(union.index.clone());
    let support_coarse_value = sum_support(&f, coarse, &functional)?;
    let support_fine_value = sum_support(&f, fine, &functional)?;

    let lower = (support_fine - support_coarse).abs();
    let guaranteed = Rational::from_integer(1) - k * d_m;
    let holds = support_coarse.is_zero() && lower >= guaranteed && guaranteed > Rational::new(1, 2);
    let index_bits = union.intervals.iter().map(|(i, _)| *i).collect();
    Ok(EmptyCertificate {
        coarse_tags: t_n.len(),
        fine_intervals: fine.len(),
        fine_diameter: format_rational(d_m),
        separated_points: a.iter().map(|t| format_rational(*t)).collect(),
        union: union
            .intervals
            .iter()
            .map(|(i, iv)| (*i, iv.to_string()))
            .collect(),
        index_bits,
        support_coarse: format_rational(support_coarse),
        support_fine: format_rational(support_fine),
        support_coarse_value,
        support_fine_value,
        lower_bound: format_rational(lower),
        guaranteed_bound: format_rational(guaranteed),
        lower_bound_value: rational_to_f64(lower),
        guaranteed_bound_value: rational_to_f64(guaranteed),
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{uniform_partition, TagRule};

    #[test]
    fn four_against_sixteen() {
        let n = uniform_partition(4, &TagRule::Mid).unwrap();
        let m = uniform_partition(16, &TagRule::Mid).unwrap();
        let c = empty_example_verifier(&n, &m).unwrap();
        assert!(c.holds);
        assert_eq!(c.support_coarse, "0");
        assert_eq!(c.support_coarse_value, 0.0);
        assert_eq!(c.guaranteed_bound, "3/4");
        // No mid tag of 16 equals a mid tag of 4, so all of [0,1] counts.
        assert_eq!(c.support_fine, "1");
        assert!((c.support_fine_value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shared_tags_are_excluded() {
        let n = uniform_partition(2, &TagRule::Left).unwrap();
        let m = uniform_partition(8, &TagRule::Left).unwrap();
        let c = empty_example_verifier(&n, &m).unwrap();
        // Tags 0 and 1/2 are shared: A has 6 points, each carrying 1/8.
        assert_eq!(c.separated_points.len(), 6);
        assert_eq!(c.support_fine, "3/4");
        assert!(c.holds);
    }

    #[test]
    fn diameter_precondition() {
        let n = uniform_partition(4, &TagRule::Mid).unwrap();
        let m = uniform_partition(8, &TagRule::Mid).unwrap();
        assert!(matches!(
            empty_example_verifier(&n, &m),
            Err(Error::Precondition(_))
        ));
    }
}
