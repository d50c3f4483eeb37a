//! `N(m,k,j)`: the largest number of `k`-subsets of `[m]` with pairwise
//! intersections of at most `j`, which equals the constant-weight code size
//! `A(m, 2(k-j), k)`.

use num_integer::Integer;

use super::CwcParams;
use crate::budget::Budget;
use crate::data;
use crate::error::Result;
use crate::family::{masks_of_weight, orbit_minimal, SubsetFamily};
use crate::scalar::binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacitySource {
    ClosedForm,
    Literature,
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Capacity {
    pub value: u64,
    pub source: CapacitySource,
    pub detail: String,
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q)
        .find(|d| q.is_multiple_of(*d))
        .expect("q >= 2 has a divisor");
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
    }
    r == 1
}

fn closed_form(cp: CwcParams) -> Option<Capacity> {
    let CwcParams { m, k, j } = cp;
    let (m64, k64) = (m as u64, k as u64);
    let cap = |value, detail: String| Capacity {
        value,
        source: CapacitySource::ClosedForm,
        detail,
    };
    if j + 1 == k {
        return Some(cap(
            binomial(m64, k64),
            format!("N({m},{k},{j}) = C({m},{k})"),
        ));
    }
    if j == 0 {
        return Some(cap(
            m64 / k64,
            format!("N({m},{k},0) = floor({m}/{k}) disjoint sets"),
        ));
    }
    if k == 3 && j == 1 {
        let base = (m64 * ((m64 - 1) / 2)) / 3;
        let v = if m64.mod_floor(&6) == 5 {
            base - 1
        } else {
            base
        };
        return Some(cap(v, format!("N({m},3,1) = A({m},4,3) packing formula")));
    }
    if j == 1 && k64 * k64 == m64 && is_prime_power(k64) {
        return Some(cap(
            k64 * (k64 + 1),
            format!("N({m},{k},1) = q(q+1) for prime power q = {k}"),
        ));
    }
    None
}

/// Known value of `N(m,k,j)`: closed forms first, then the bundled
/// `A(n,d,w)` table. `None` when neither applies.
pub fn cwc_capacity(m: usize, k: usize, j: usize) -> Result<Option<Capacity>> {
    let cp = CwcParams::new(m, k, j)?;
    if let Some(c) = closed_form(cp) {
        return Ok(Some(c));
    }
    let d = 2 * (k - j);
    let lit = data::literature()?;
    Ok(lit
        .constant_weight
        .iter()
        .find(|e| e.n == m && e.d == d && e.w == k)
        .map(|e| Capacity {
            value: e.value,
            source: CapacitySource::Literature,
            detail: format!("A({m},{d},{k}) = {} ({})", e.value, e.source),
        }))
}

#[derive(Debug, Clone)]
pub struct CwcSearch {
    pub size: usize,
    pub family: SubsetFamily,
    pub exact: bool,
    pub nodes: u64,
}

/// Exhaustive search for `N(m,k,j)` with the same orbit pruning as the
/// cover-free search. Intended for `m ≤ 9` or so.
pub fn search_cwc(m: usize, k: usize, j: usize, budget: Budget) -> Result<CwcSearch> {
    let cp = CwcParams::new(m, k, j)?;
    let meter = budget.meter();
    let universe = masks_of_weight(m, k);
    let first = universe[0];
    let cands: Vec<u64> = universe[1..]
        .iter()
        .copied()
        .filter(|&c| (c & first).count_ones() as usize <= j)
        .collect();
    let mut best = vec![first];
    let mut fam = vec![first];
    dfs(cp, &mut fam, &cands, &mut best, &meter);
    Ok(CwcSearch {
        size: best.len(),
        family: SubsetFamily::new(m, best)?,
        exact: !meter.exhausted(),
        nodes: meter.nodes(),
    })
}

fn dfs(
    cp: CwcParams,
    fam: &mut Vec<u64>,
    cands: &[u64],
    best: &mut Vec<u64>,
    meter: &crate::budget::Meter,
) {
    if !meter.tick() {
        return;
    }
    if fam.len() > best.len() {
        *best = fam.clone();
    }
    for i in 0..cands.len() {
        if fam.len() + cands.len() - i <= best.len() {
            return;
        }
        let z = cands[i];
        if !orbit_minimal(fam.iter().copied(), z) {
            continue;
        }
        let rest: Vec<u64> = cands[i + 1..]
            .iter()
            .copied()
            .filter(|&c| (c & z).count_ones() as usize <= cp.j)
            .collect();
        fam.push(z);
        dfs(cp, fam, &rest, best, meter);
        fam.pop();
        if meter.exhausted() {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(cwc_capacity(9, 3, 1).unwrap().unwrap().value, 12);
        assert_eq!(cwc_capacity(16, 4, 1).unwrap().unwrap().value, 20);
        assert_eq!(cwc_capacity(7, 3, 1).unwrap().unwrap().value, 7);
        assert_eq!(cwc_capacity(11, 3, 1).unwrap().unwrap().value, 17);
        assert_eq!(cwc_capacity(16, 3, 1).unwrap().unwrap().value, 37);
        for m in 3..12 {
            for k in 2..=m {
                let c = cwc_capacity(m, k, k - 1).unwrap().unwrap();
                assert_eq!(c.value, binomial(m as u64, k as u64));
                assert_eq!(c.source, CapacitySource::ClosedForm);
            }
        }
        assert!(cwc_capacity(3, 3, 3).is_err());
    }

    #[test]
    fn prime_powers() {
        let pp: Vec<u64> = (1..30).filter(|&q| is_prime_power(q)).collect();
        assert_eq!(
            pp,
            vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]
        );
    }

    #[test]
    fn search_agrees_with_closed_forms() {
        for (m, k, j) in [
            (7, 3, 1),
            (6, 3, 1),
            (8, 3, 1),
            (9, 3, 1),
            (6, 2, 1),
            (7, 3, 0),
        ] {
            let s = search_cwc(m, k, j, Budget::unlimited()).unwrap();
            assert!(s.exact);
            assert_eq!(
                s.size as u64,
                closed_form(CwcParams::new(m, k, j).unwrap()).unwrap().value,
                "({m},{k},{j})"
            );
            assert!(s.family.max_pairwise_intersection() <= j);
        }
    }
}
