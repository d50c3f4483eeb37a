//! Subset families over a small ground set `[m]`, stored as `u64` bitmasks.
//!
//! Elements are 0-based in the API; the file formats in [`crate::io`] and the
//! CLI use 1-based elements.

mod cover;
pub mod search;

pub use cover::{is_cover_free, CoverCheck, CoverParams};

use crate::error::{Error, Result};
use crate::scalar::binomial;

pub const MAX_GROUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetFamily {
    m: usize,
    sets: Vec<u64>,
}

/// Iterates the set bits of a mask in increasing order.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

pub fn full_mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

impl SubsetFamily {
    pub fn new(m: usize, sets: Vec<u64>) -> Result<Self> {
        if m == 0 || m > MAX_GROUND {
            return Err(Error::InvalidInput(format!(
                "ground set size {m} outside 1..={MAX_GROUND}"
            )));
        }
        let full = full_mask(m);
        for (i, &s) in sets.iter().enumerate() {
            if s == 0 {
                return Err(Error::EmptySupport(i));
            }
            if s & !full != 0 {
                return Err(Error::InvalidInput(format!(
                    "set {i} has elements outside [{m}]"
                )));
            }
        }
        Ok(Self { m, sets })
    }

    /// Builds a family from 0-based element lists.
    pub fn from_elements<S: AsRef<[usize]>>(m: usize, sets: &[S]) -> Result<Self> {
        let mut masks = Vec::with_capacity(sets.len());
        for s in sets {
            let mut mask = 0u64;
            for &e in s.as_ref() {
                if e >= m {
                    return Err(Error::InvalidInput(format!("element {e} outside [{m}]")));
                }
                mask |= 1 << e;
            }
            masks.push(mask);
        }
        Self::new(m, masks)
    }

    /// Builds a family from 1-based element lists.
    pub fn from_one_based<S: AsRef<[usize]>>(m: usize, sets: &[S]) -> Result<Self> {
        let zero: Vec<Vec<usize>> = sets
            .iter()
            .map(|s| {
                s.as_ref()
                    .iter()
                    .map(|&e| {
                        e.checked_sub(1)
                            .ok_or_else(|| Error::InvalidInput("element 0 in 1-based set".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Self::from_elements(m, &zero)
    }

    /// All `k`-subsets of `[m]` in colexicographic mask order.
    pub fn k_subsets(m: usize, k: usize) -> Self {
        let sets = masks_of_weight(m, k);
        Self { m, sets }
    }

    pub fn singletons(m: usize) -> Self {
        Self {
            m,
            sets: (0..m).map(|i| 1u64 << i).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn elements(&self, i: usize) -> Vec<usize> {
        bits(self.sets[i]).collect()
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.sets
            .iter()
            .map(|&s| bits(s).map(|e| e + 1).collect())
            .collect()
    }

    /// Size of every member if they all agree.
    pub fn uniform_weight(&self) -> Option<usize> {
        let w = self.sets.first()?.count_ones();
        self.sets
            .iter()
            .all(|s| s.count_ones() == w)
            .then_some(w as usize)
    }

    pub fn max_pairwise_intersection(&self) -> usize {
        let mut best = 0;
        for (i, a) in self.sets.iter().enumerate() {
            for b in &self.sets[i + 1..] {
                best = best.max((a & b).count_ones() as usize);
            }
        }
        best
    }
}

/// `z` is the lowest mask in its orbit under the permutations of the ground
/// set that fix every member of `fam`: whenever two elements lie in exactly
/// the same members, `z` may hold the larger only if it holds the smaller.
pub(crate) fn orbit_minimal<I>(fam: I, z: u64) -> bool
where
    I: IntoIterator<Item = u64> + Clone,
{
    let twins = |e: usize, f: usize| {
        fam.clone()
            .into_iter()
            .all(|s| (s >> e & 1) == (s >> f & 1))
    };
    bits(z).all(|e| (0..e).all(|f| z >> f & 1 == 1 || !twins(e, f)))
}

/// All masks of popcount `k` below `2^m`, increasing.
pub fn masks_of_weight(m: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    if k == 0 {
        return vec![0];
    }
    let mut v: u64 = full_mask(k);
    let limit = full_mask(m);
    loop {
        out.push(v);
        // Gosper's hack.
        let c = v & v.wrapping_neg();
        let Some(r) = v.checked_add(c) else { break };
        if r > limit {
            break;
        }
        v = (((r ^ v) >> 2) / c) | r;
        if v > limit {
            break;
        }
    }
    out
}

/// Largest antichain size in `2^[m]`.
pub fn sperner_number(m: usize) -> u64 {
    binomial(m as u64, (m / 2) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntichainCheck {
    Antichain,
    /// Two members are equal.
    Duplicate {
        first: usize,
        second: usize,
    },
    /// Member `subset` is strictly contained in member `superset`.
    Contained {
        subset: usize,
        superset: usize,
    },
}

impl AntichainCheck {
    pub fn holds(&self) -> bool {
        matches!(self, AntichainCheck::Antichain)
    }
}

/// Checks ordered pairs `(i, j)` lexicographically and reports the first violation.
pub fn is_antichain(f: &SubsetFamily) -> AntichainCheck {
    let s = &f.sets;
    for i in 0..s.len() {
        for j in 0..s.len() {
            if i == j {
                continue;
            }
            if s[i] == s[j] {
                return AntichainCheck::Duplicate {
                    first: i.min(j),
                    second: i.max(j),
                };
            }
            if s[i] & !s[j] == 0 {
                return AntichainCheck::Contained {
                    subset: i,
                    superset: j,
                };
            }
        }
    }
    AntichainCheck::Antichain
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_pairs_of_four_form_an_antichain() {
        let f = SubsetFamily::k_subsets(4, 2);
        assert_eq!(f.len(), 6);
        assert!(is_antichain(&f).holds());
    }

    #[test]
    fn containment_is_reported() {
        let f = SubsetFamily::from_one_based(2, &[vec![1], vec![1, 2]]).unwrap();
        assert_eq!(
            is_antichain(&f),
            AntichainCheck::Contained {
                subset: 0,
                superset: 1
            }
        );
        let g = SubsetFamily::from_one_based(3, &[vec![1, 2], vec![3], vec![1, 2]]).unwrap();
        assert_eq!(
            is_antichain(&g),
            AntichainCheck::Duplicate {
                first: 0,
                second: 2
            }
        );
    }

    #[test]
    fn middle_layer_of_five() {
        let f = SubsetFamily::k_subsets(5, 2);
        assert_eq!(f.len(), 10);
        assert!(is_antichain(&f).holds());
    }

    #[test]
    fn sperner_values() {
        assert_eq!(sperner_number(1), 1);
        assert_eq!(sperner_number(4), 6);
        assert_eq!(sperner_number(16), 12870);
    }

    #[test]
    fn weight_masks_are_complete() {
        for m in 0..=8 {
            for k in 0..=m {
                let w = masks_of_weight(m, k);
                assert_eq!(w.len() as u64, binomial(m as u64, k as u64));
                assert!(w.windows(2).all(|p| p[0] < p[1]));
                assert!(w.iter().all(|x| x.count_ones() as usize == k));
            }
        }
        assert_eq!(masks_of_weight(64, 64), vec![u64::MAX]);
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(SubsetFamily::new(3, vec![0]).is_err());
        assert!(SubsetFamily::new(3, vec![8]).is_err());
        assert!(SubsetFamily::from_one_based(3, &[vec![0]]).is_err());
    }
}
