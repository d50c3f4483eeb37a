//! Strategies built from combinatorial objects: constant-weight codes for
//! the one-way model, and support-family pairs, complements and the halving
//! relay for the SMP model.

mod capacity;
mod pair;

pub use capacity::{cwc_capacity, search_cwc, Capacity, CapacitySource, CwcSearch};
pub use pair::{search_pair_capacity, smp_strategy_from_pair, PairFamilyParams, PairSearch};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::family::SubsetFamily;
use crate::scalar::ratio;
use crate::strategy::{binary_completion, uniform_on_supports, uniform_rows};
use crate::{Rational, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CwcParams {
    pub m: usize,
    pub k: usize,
    pub j: usize,
}

impl CwcParams {
    pub fn new(m: usize, k: usize, j: usize) -> Result<Self> {
        if !(j < k && k <= m) {
            return Err(Error::InvalidInput(format!(
                "constant-weight parameters need j < k <= m, got m={m} k={k} j={j}"
            )));
        }
        Ok(Self { m, k, j })
    }
}

/// Hamming distance between incidence vectors.
pub fn hamming_distance(u: u64, v: u64) -> u32 {
    (u ^ v).count_ones()
}

/// One-way strategy with uniform weight `1/k` on each member of a
/// weight-`k` family whose pairwise intersections are at most `j`.
/// Its worst-case error is exactly (largest intersection)/k.
pub fn strategy_from_cwc(f: &SubsetFamily, k: usize, j: usize) -> Result<Strategy> {
    for (i, &s) in f.sets().iter().enumerate() {
        let w = s.count_ones() as usize;
        if w != k {
            return Err(Error::WeightViolation {
                index: i,
                weight: w,
                expected: k,
            });
        }
    }
    for (a, &x) in f.sets().iter().enumerate() {
        for (b, &y) in f.sets().iter().enumerate().skip(a + 1) {
            let size = (x & y).count_ones() as usize;
            if size > j {
                return Err(Error::IntersectionViolation {
                    first: a,
                    second: b,
                    size,
                    limit: j,
                });
            }
        }
    }
    let n = f.len();
    let relay: Vec<Vec<Rational>> = (0..n)
        .map(|y| {
            (0..n)
                .map(|b| {
                    if b == y {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let s = binary_completion(uniform_rows(f), relay)?;
    debug_assert!(s.error_report().worst_case <= ratio(j as i64, k as i64));
    Ok(s)
}

/// Alice uses the `⌊m/2⌋`-subsets, Bob their complements; Roger answers
/// "equal" unless both fingerprints coincide.
pub fn complement_pair_strategy(m: usize) -> Result<Strategy> {
    if m < 2 {
        return Err(Error::InvalidInput("complement pair needs m >= 2".into()));
    }
    let alice = SubsetFamily::k_subsets(m, m / 2);
    let full = crate::family::full_mask(m);
    let bob = SubsetFamily::new(m, alice.sets().iter().map(|&s| full & !s).collect())?;
    uniform_on_supports(&alice, &bob)
}

/// Worst-case error of [`complement_pair_strategy`].
pub fn complement_pair_error(m: usize) -> Rational {
    let (lo, hi) = ((m / 2) as i64, m.div_ceil(2) as i64);
    Rational::one() - ratio(1, lo * hi)
}

/// Turns a one-way strategy with `n` messages and `m` fingerprints into an
/// SMP strategy with `2n` messages and `m + n` fingerprints per party.
///
/// Messages in the first half are fingerprinted by Alice and relayed by Bob
/// (on fingerprints `m..m+n`); in the second half the roles swap. Roger
/// answers 0 whenever the two fingerprints come from different halves, so
/// the worst-case error is unchanged.
pub fn halving_construction(base: &Strategy) -> Result<Strategy> {
    if !base.is_one_way() {
        return Err(Error::MalformedStrategy(
            "halving needs a one-way base strategy (q = identity)".into(),
        ));
    }
    let n = base.n();
    let m = base.m_a();
    let w = m + n;
    let zero = || vec![Rational::zero(); w];
    let mut p = Vec::with_capacity(2 * n);
    let mut q = Vec::with_capacity(2 * n);
    for x in 0..n {
        let mut row = zero();
        row[..m].clone_from_slice(&base.p()[x]);
        p.push(row);
        let mut relay = zero();
        relay[m + x] = Rational::one();
        q.push(relay);
    }
    for x in 0..n {
        let mut relay = zero();
        relay[m + x] = Rational::one();
        p.push(relay);
        let mut row = zero();
        row[..m].clone_from_slice(&base.p()[x]);
        q.push(row);
    }
    let mut r = vec![zero(); w];
    for a in 0..m {
        for y in 0..n {
            r[a][m + y] = base.r()[a][y].clone();
            // Second half: Alice relays x' on fingerprint m + x', Bob fingerprints.
            r[m + y][a] = base.r()[a][y].clone();
        }
    }
    Strategy::new(p, q, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::optimize_supports_one_way;

    #[test]
    fn cwc_pairs_of_four() {
        let s = strategy_from_cwc(&SubsetFamily::k_subsets(4, 2), 2, 1).unwrap();
        assert_eq!(s.error_report().worst_case, ratio(1, 2));
        assert!(s.error_report().one_sided);
    }

    #[test]
    fn cwc_singletons() {
        let s = strategy_from_cwc(&SubsetFamily::singletons(5), 1, 0).unwrap();
        assert_eq!(s.error_report().worst_case, ratio(0, 1));
    }

    #[test]
    fn cwc_violations() {
        let f = SubsetFamily::from_one_based(4, &[vec![1, 2], vec![1, 2, 3]]).unwrap();
        assert!(matches!(
            strategy_from_cwc(&f, 2, 1),
            Err(Error::WeightViolation { index: 1, .. })
        ));
        let g = SubsetFamily::from_one_based(4, &[vec![1, 2, 3], vec![1, 2, 4]]).unwrap();
        assert!(matches!(
            strategy_from_cwc(&g, 3, 1),
            Err(Error::IntersectionViolation { size: 2, .. })
        ));
    }

    #[test]
    fn complement_pairs() {
        for (m, want) in [(2, ratio(0, 1)), (4, ratio(3, 4)), (5, ratio(5, 6))] {
            let s = complement_pair_strategy(m).unwrap();
            let rep = s.error_report();
            assert_eq!(rep.worst_case, want, "m={m}");
            assert_eq!(complement_pair_error(m), want);
            assert!(rep.one_sided);
        }
        let s = complement_pair_strategy(4).unwrap();
        assert_eq!(s.n(), 6);
        // Roger's matrix is 1 - δ.
        for (a, row) in s.r().iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                assert_eq!(v.is_one(), a != b);
            }
        }
    }

    #[test]
    fn halving_keeps_error() {
        let (base, v) =
            optimize_supports_one_way::<Rational>(&SubsetFamily::k_subsets(4, 2)).unwrap();
        let h = halving_construction(&base).unwrap();
        assert_eq!((h.n(), h.m_a(), h.m_b()), (12, 10, 10));
        let rep = h.error_report();
        assert_eq!(rep.worst_case, v);
        assert!(rep.one_sided);

        let id = halving_construction(&Strategy::identity(3)).unwrap();
        assert_eq!(id.error_report().worst_case, ratio(0, 1));
    }

    #[test]
    fn halving_rejects_smp_base() {
        let s = complement_pair_strategy(4).unwrap();
        assert!(halving_construction(&s).is_err());
    }
}
