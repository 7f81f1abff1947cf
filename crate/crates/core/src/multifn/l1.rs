use num_integer::Integer;

use super::Multifunction;
use crate::error::{Error, Result};
use crate::real::{is_prime, Rational, Real};
use crate::sets::{CompactSet, ESum};
use crate::space::{Mode, Space};

/// `F(x) = p·E[(2n−2)/2p, 2n/2p]` at `x = (2n−1)/2p` for prime `p`, `{0}` elsewhere.
///
/// Values live in the L1 grid with `bins` cells, so `p` must divide `bins`
/// for every prime whose tags are evaluated.
#[derive(Clone, Debug)]
pub struct L1Example {
    space: Space,
    bins: u64,
}

impl L1Example {
    pub fn new(bins: u64) -> Result<Self> {
        Ok(L1Example {
            space: Space::l1_grid(bins)?,
            bins,
        })
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    /// `(p, n)` when `t = (2n−1)/2p` in lowest terms with `p` prime.
    pub fn special_index(t: &Real) -> Option<(i64, i64)> {
        let r = t.as_rational()?;
        let (a, b) = (*r.numer(), *r.denom());
        if b % 2 != 0 || a <= 0 || a >= b {
            return None;
        }
        let p = b / 2;
        is_prime(p as u64).then_some((p, (a + 1) / 2))
    }

    fn primes_dividing_bins(&self) -> impl Iterator<Item = i64> + '_ {
        (2..=self.bins.min(1 << 20))
            .filter(|&p| self.bins.is_multiple_of(p) && is_prime(p))
            .map(|p| p as i64)
    }
}

impl Multifunction for L1Example {
    fn name(&self) -> String {
        "l1".into()
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn eval(&self, t: &Real) -> Result<CompactSet> {
        debug_assert!(matches!(self.space.mode(), Mode::L1Grid(_)));
        match Self::special_index(t) {
            Some((p, n)) => Ok(CompactSet::ESum(ESum::single(
                self.bins,
                Rational::from_integer(p),
                Rational::new(2 * n - 2, 2 * p),
                Rational::new(2 * n, 2 * p),
            )?)),
            None => Ok(CompactSet::ESum(ESum::zero(self.bins))),
        }
    }

    fn bound(&self) -> f64 {
        1.0
    }

    fn convex_valued(&self) -> bool {
        false
    }

    /// The tags `(2n−1)/2p` inside `[lo, hi]` for primes `p` dividing the bin count.
    fn special_tags(&self, lo: Rational, hi: Rational) -> Vec<Real> {
        let mut out = Vec::new();
        for p in self.primes_dividing_bins() {
            let first = ((lo * Rational::from_integer(2 * p) + Rational::from_integer(1)) / 2)
                .ceil()
                .to_integer()
                .max(1);
            let mut n = first;
            while n <= p {
                let t = Rational::new(2 * n - 1, 2 * p);
                if t > hi {
                    break;
                }
                if t >= lo && t.denom().is_even() {
                    out.push(Real::exact(t));
                }
                n += 1;
            }
        }
        out.sort_by(|a, b| a.cmp_value(b));
        out.dedup_by(|a, b| a.same_as(b));
        out
    }
}

impl L1Example {
    /// Fails early when some prime in `primes` does not divide the bin count.
    pub fn check_primes(&self, primes: &[u64]) -> Result<()> {
        for &p in primes {
            if !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            if !self.bins.is_multiple_of(p) {
                return Err(Error::NotBinAligned {
                    endpoint: format!("1/{p}"),
                    bins: self.bins,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::set_norm;

    #[test]
    fn values_at_special_and_generic_tags() {
        let f = L1Example::new(2310).unwrap();
        let v = f.eval(&Real::ratio(1, 4)).unwrap();
        let expected = ESum::single(
            2310,
            Rational::from_integer(2),
            Rational::new(0, 1),
            Rational::new(1, 2),
        )
        .unwrap();
        assert_eq!(v, CompactSet::ESum(expected));
        assert_eq!(
            f.eval(&Real::ratio(1, 3)).unwrap(),
            CompactSet::ESum(ESum::zero(2310))
        );
        assert_eq!(
            f.eval(&Real::generic(0.25)).unwrap(),
            CompactSet::ESum(ESum::zero(2310))
        );
        // 1/6 = (2·1−1)/(2·3): prime 3, first interval.
        let v3 = f.eval(&Real::ratio(1, 6)).unwrap();
        assert_eq!(v3.as_esum().unwrap().terms().len(), 1);
        // 3/8 has denominator 8 = 2·4, and 4 is not prime.
        assert_eq!(
            f.eval(&Real::ratio(3, 8)).unwrap(),
            CompactSet::ESum(ESum::zero(2310))
        );
    }

    #[test]
    fn every_special_value_has_norm_one() {
        let f = L1Example::new(2310).unwrap();
        for p in [2i64, 3, 5, 7, 11] {
            for n in 1..=p {
                let v = f.eval(&Real::ratio(2 * n - 1, 2 * p)).unwrap();
                // For odd p the middle tag p/2p reduces to 1/2, which is not special.
                let expected = if 2 * n - 1 == p { 0.0 } else { 1.0 };
                assert_eq!(set_norm(f.space(), &v).unwrap(), expected);
            }
        }
    }

    #[test]
    fn misaligned_prime_errors() {
        let f = L1Example::new(6).unwrap();
        assert!(matches!(
            f.eval(&Real::ratio(1, 10)),
            Err(Error::NotBinAligned { .. })
        ));
        assert!(f.check_primes(&[2, 3]).is_ok());
        assert!(f.check_primes(&[5]).is_err());
    }

    #[test]
    fn special_tags_in_range() {
        let f = L1Example::new(6).unwrap();
        let tags = f.special_tags(Rational::new(0, 1), Rational::new(1, 2));
        assert_eq!(
            tags,
            vec![Real::ratio(1, 6), Real::ratio(1, 4), Real::ratio(1, 2)]
        );
    }
}
