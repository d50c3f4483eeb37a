//! SMP strategies from a pair of uniform-weight support families.
//!
//! For Alice's `k1`-sets `A_x` and Bob's `k2`-sets `B_y`, the uniform
//! strategy errs on `(x, y)` with probability
//! `|(A_x × B_y) ∩ U| / (k1 k2)`, where `U = ∪_z A_z × B_z`.

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::family::{bits, masks_of_weight, orbit_minimal, SubsetFamily};
use crate::scalar::ratio;
use crate::strategy::uniform_on_supports;
use crate::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairFamilyParams {
    pub m: usize,
    pub k1: usize,
    pub k2: usize,
    pub j: usize,
}

impl PairFamilyParams {
    pub fn new(m: usize, k1: usize, k2: usize, j: usize) -> Result<Self> {
        if k1 == 0 || k2 == 0 || k1 > m || k2 > m || j > k1 * k2 {
            return Err(Error::InvalidInput(format!(
                "pair parameters need 1 <= k1,k2 <= m and j <= k1*k2, got ({m},{k1},{k2},{j})"
            )));
        }
        Ok(Self { m, k1, k2, j })
    }
}

/// Largest cross overlap `|(A_x × B_y) ∩ U|` over `x ≠ y`.
pub fn cross_overlap(fp: &SubsetFamily, fq: &SubsetFamily) -> usize {
    let mut union = vec![0u64; fp.m()];
    for (&a, &b) in fp.sets().iter().zip(fq.sets()) {
        for e in bits(a) {
            union[e] |= b;
        }
    }
    let mut worst = 0;
    for (x, &a) in fp.sets().iter().enumerate() {
        for (y, &b) in fq.sets().iter().enumerate() {
            if x != y {
                let c: u32 = bits(a).map(|e| (b & union[e]).count_ones()).sum();
                worst = worst.max(c as usize);
            }
        }
    }
    worst
}

/// Uniform SMP strategy on the pair and the overlap `j` it achieves; the
/// worst-case error is at most `j/(k1 k2)`.
pub fn smp_strategy_from_pair(
    fp: &SubsetFamily,
    fq: &SubsetFamily,
    k1: usize,
    k2: usize,
) -> Result<(Strategy, usize)> {
    if fp.len() != fq.len() {
        return Err(Error::InvalidInput(format!(
            "families have {} and {} members",
            fp.len(),
            fq.len()
        )));
    }
    for (f, k) in [(fp, k1), (fq, k2)] {
        if let Some((i, &s)) = f
            .sets()
            .iter()
            .enumerate()
            .find(|(_, s)| s.count_ones() as usize != k)
        {
            return Err(Error::WeightViolation {
                index: i,
                weight: s.count_ones() as usize,
                expected: k,
            });
        }
    }
    let j = cross_overlap(fp, fq);
    let s = uniform_on_supports(fp, fq)?;
    debug_assert!(s.error_report().worst_case <= ratio(j as i64, (k1 * k2) as i64));
    Ok((s, j))
}

#[derive(Debug, Clone)]
pub struct PairSearch {
    pub n: usize,
    pub fp: SubsetFamily,
    pub fq: SubsetFamily,
    pub exact: bool,
    pub nodes: u64,
}

/// Backtracking for `N_2(m,k1,k2,j)`, the most pairs satisfying the overlap
/// condition. Alice's sets are listed in increasing order; each new Alice
/// set and each new Bob set must be the lowest in its orbit under the
/// permutations fixing the earlier ones on that side.
pub fn search_pair_capacity(
    m: usize,
    k1: usize,
    k2: usize,
    j: usize,
    budget: Budget,
) -> Result<PairSearch> {
    let params = PairFamilyParams::new(m, k1, k2, j)?;
    if m * m > 64 {
        return Err(Error::InvalidInput(format!(
            "pair search supports m <= 8, got {m}"
        )));
    }
    let meter = budget.meter();
    let search = PairSearcher {
        params,
        alice: masks_of_weight(m, k1),
        bob: masks_of_weight(m, k2),
    };
    let root = (search.alice[0], search.bob[0]);
    let mut fam = vec![root];
    let cells = search.product(root.0, root.1);
    let cands: Vec<(u64, u64)> = search
        .alice
        .iter()
        .skip(1)
        .flat_map(|&a| search.bob.iter().map(move |&b| (a, b)))
        .filter(|&c| search.compatible(&fam, cells, c))
        .collect();
    let mut best = fam.clone();
    search.dfs(&mut fam, cells, &cands, &mut best, &meter);
    let (a, b): (Vec<u64>, Vec<u64>) = best.into_iter().unzip();
    Ok(PairSearch {
        n: a.len(),
        fp: SubsetFamily::new(m, a)?,
        fq: SubsetFamily::new(m, b)?,
        exact: !meter.exhausted(),
        nodes: meter.nodes(),
    })
}

struct PairSearcher {
    params: PairFamilyParams,
    alice: Vec<u64>,
    bob: Vec<u64>,
}

impl PairSearcher {
    /// `A × B` as a mask over the `m × m` grid.
    fn product(&self, a: u64, b: u64) -> u64 {
        bits(a).fold(0, |acc, e| acc | b << (e * self.params.m))
    }

    fn compatible(&self, fam: &[(u64, u64)], cells: u64, (a, b): (u64, u64)) -> bool {
        let j = self.params.j as u32;
        let u = cells | self.product(a, b);
        let over = |x: u64, y: u64| (self.product(x, y) & u).count_ones() > j;
        for &(ax, bx) in fam {
            if over(a, bx) || over(ax, b) {
                return false;
            }
        }
        // Existing cross pairs see the enlarged union too.
        for (x, &(ax, _)) in fam.iter().enumerate() {
            for (y, &(_, by)) in fam.iter().enumerate() {
                if x != y && over(ax, by) {
                    return false;
                }
            }
        }
        true
    }

    fn canonical(&self, side: impl Iterator<Item = u64> + Clone, z: u64) -> bool {
        orbit_minimal(side, z)
    }

    fn bound(&self, fam_len: usize, cands: &[(u64, u64)]) -> usize {
        let mut a: Vec<u64> = cands.iter().map(|c| c.0).collect();
        a.dedup();
        let mut b: Vec<u64> = cands.iter().map(|c| c.1).collect();
        b.sort_unstable();
        b.dedup();
        fam_len + a.len().min(b.len())
    }

    fn dfs(
        &self,
        fam: &mut Vec<(u64, u64)>,
        cells: u64,
        cands: &[(u64, u64)],
        best: &mut Vec<(u64, u64)>,
        meter: &Meter,
    ) {
        if !meter.tick() {
            return;
        }
        if fam.len() > best.len() {
            *best = fam.clone();
        }
        if self.bound(fam.len(), cands) <= best.len() {
            return;
        }
        for i in 0..cands.len() {
            let z = cands[i];
            // Later candidates have larger Alice sets; stop once they cannot win.
            if self.bound(fam.len(), &cands[i..]) <= best.len() {
                return;
            }
            if !self.canonical(fam.iter().map(|p| p.0), z.0)
                || !self.canonical(fam.iter().map(|p| p.1), z.1)
            {
                continue;
            }
            let next_cells = cells | self.product(z.0, z.1);
            fam.push(z);
            let rest: Vec<(u64, u64)> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|c| c.0 != z.0 && self.compatible(fam, next_cells, *c))
                .collect();
            self.dfs(fam, next_cells, &rest, best, meter);
            fam.pop();
            if meter.exhausted() {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn reference_pair() -> (SubsetFamily, SubsetFamily) {
        let a: Vec<Vec<usize>> = vec![
            vec![1, 3],
            vec![1, 4],
            vec![1, 5],
            vec![2, 3],
            vec![2, 4],
            vec![2, 5],
            vec![1, 2],
            vec![3, 4],
        ];
        let mut b = a.clone();
        b.swap(6, 7);
        (
            SubsetFamily::from_one_based(5, &a).unwrap(),
            SubsetFamily::from_one_based(5, &b).unwrap(),
        )
    }

    #[test]
    fn eight_pair_example() {
        let (fp, fq) = reference_pair();
        let (s, j) = smp_strategy_from_pair(&fp, &fq, 2, 2).unwrap();
        assert_eq!(j, 3);
        assert_eq!(s.error_report().worst_case, ratio(3, 4));
        assert!(s.error_report().one_sided);
    }

    #[test]
    fn singletons_pair() {
        let f = SubsetFamily::singletons(4);
        let (s, j) = smp_strategy_from_pair(&f, &f, 1, 1).unwrap();
        assert_eq!(j, 0);
        assert_eq!(s.error_report().worst_case, ratio(0, 1));
    }

    #[test]
    fn mismatched_pair_is_rejected() {
        let f = SubsetFamily::singletons(4);
        let g = SubsetFamily::singletons(3);
        assert!(smp_strategy_from_pair(&f, &g, 1, 1).is_err());
    }

    #[test]
    fn small_capacities() {
        for m in 1..=6 {
            let r = search_pair_capacity(m, 1, 1, 0, Budget::unlimited()).unwrap();
            assert_eq!(r.n, m);
            assert!(r.exact);
        }
        let r = search_pair_capacity(5, 2, 2, 3, Budget::unlimited()).unwrap();
        assert!(r.exact);
        assert_eq!(r.n, 8);
        assert_eq!(cross_overlap(&r.fp, &r.fq), 3);
    }
}
