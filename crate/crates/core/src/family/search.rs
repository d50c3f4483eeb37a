//! Branch and bound for the largest `k/j`-cover-free family on `[m]`.
//!
//! Two reductions keep this tractable for `m ≤ 10`:
//!
//! * A member `X` with `|X|·j ≤ k` always has a private element, so
//!   `T(m) = max(T(m-1) + 1, L(m))` where `L(m)` only uses members larger
//!   than `k/j`. The recursion supplies the incumbent for the large search.
//! * Each new member must be the lowest representative of its orbit under
//!   the permutations fixing every earlier member (members are chosen in
//!   `(popcount, mask)` order).
//!
//! Compatibility is tracked with a bitset over all `2^m` masks. Every way a
//! future candidate `Q` can break the family is an up-set or a down-set:
//! `Q` covered by members means `Q ⊆ Th_j(W)`, and `Q` helping to cover a
//! member `X` with multiplicity `c` means `Q ⊇ X \ Th_j(W)` given
//! `X ⊆ Th_{j-c}(W)`, where `Th_t(W)` is the set of elements hit at least
//! `t` times by the multiset `W`.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{full_mask, is_cover_free, orbit_minimal, CoverParams, SubsetFamily};
use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_GROUND: usize = 10;

#[derive(Debug, Clone)]
pub struct CoverFreeSearch {
    pub size: usize,
    pub family: SubsetFamily,
    pub exact: bool,
    pub nodes: u64,
}

pub fn search_largest_cover_free(
    m: usize,
    cp: CoverParams,
    budget: Budget,
) -> Result<CoverFreeSearch> {
    search_largest_cover_free_capped(m, cp, budget, DEFAULT_MAX_GROUND)
}

pub fn search_largest_cover_free_capped(
    m: usize,
    cp: CoverParams,
    budget: Budget,
    max_ground: usize,
) -> Result<CoverFreeSearch> {
    if m == 0 || m > max_ground || m > 16 {
        return Err(Error::InvalidInput(format!(
            "cover-free search supports 1 <= m <= {}, got {m}",
            max_ground.min(16)
        )));
    }
    let meter = budget.meter();
    let mut family = vec![1u64];
    let mut exact = true;
    for g in 2..=m {
        let mut base = family.clone();
        base.push(1u64 << (g - 1));
        let (large, complete) = LargeSearch::new(g, cp).run(base.len(), &meter);
        exact &= complete;
        family = match large {
            Some(f) if f.len() > base.len() => f,
            _ => base,
        };
    }
    let family = SubsetFamily::new(m, family)?;
    debug_assert!(is_cover_free(&family, cp).holds());
    Ok(CoverFreeSearch {
        size: family.len(),
        family,
        exact: exact && !meter.exhausted(),
        nodes: meter.nodes(),
    })
}

/// Up- and down-closures of every mask, as bitsets over all masks.
struct Closures {
    words: usize,
    up: Vec<u64>,
    down: Vec<u64>,
}

impl Closures {
    fn new(m: usize) -> Self {
        let n = 1usize << m;
        let words = n.div_ceil(64);
        let mut up = vec![0u64; n * words];
        let mut down = vec![0u64; n * words];
        let full = full_mask(m);
        for s in 0..n as u64 {
            let comp = full & !s;
            let mut sub = comp;
            loop {
                let sup = (s | sub) as usize;
                up[s as usize * words + sup / 64] |= 1 << (sup % 64);
                down[sup * words + s as usize / 64] |= 1 << (s % 64);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & comp;
            }
        }
        Self { words, up, down }
    }

    fn or_up(&self, into: &mut [u64], mask: u64) {
        let row = &self.up[mask as usize * self.words..][..self.words];
        into.iter_mut().zip(row).for_each(|(a, b)| *a |= b);
    }

    fn or_down(&self, into: &mut [u64], mask: u64) {
        let row = &self.down[mask as usize * self.words..][..self.words];
        into.iter_mut().zip(row).for_each(|(a, b)| *a |= b);
    }
}

fn contains(bits: &[u64], mask: u64) -> bool {
    bits[mask as usize / 64] >> (mask % 64) & 1 == 1
}

struct LargeSearch {
    m: usize,
    k: usize,
    j: usize,
    closures: Closures,
    universe: Vec<u64>,
}

impl LargeSearch {
    fn new(m: usize, cp: CoverParams) -> Self {
        let (k, j) = (cp.k(), cp.j());
        let mut universe: Vec<u64> = (1..=full_mask(m))
            .filter(|s| s.count_ones() as usize * j > k)
            .collect();
        universe.sort_by_key(|&s| (s.count_ones(), s));
        Self {
            m,
            k,
            j,
            closures: Closures::new(m),
            universe,
        }
    }

    fn threshold(&self, counts: &[u8], t: isize) -> u64 {
        if t <= 0 {
            return full_mask(self.m);
        }
        counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c as isize >= t)
            .fold(0, |acc, (e, _)| acc | 1 << e)
    }

    /// Marks every mask that becomes incompatible once `z` joins `fam`.
    fn extend_forbidden(&self, forbidden: &mut [u64], fam: &[u64], z: u64) {
        let (k, j) = (self.k, self.j as isize);
        let mut counts = vec![0u8; self.m];
        // Candidates covered by multisets containing z.
        for d in 1..=k {
            add(&mut counts, z, d as u8);
            for_each_multiset(fam, k - d, &mut counts, &mut |cnt| {
                self.closures.or_down(forbidden, self.threshold(cnt, j));
            });
            sub(&mut counts, z, d as u8);
        }
        // Candidates that would help cover z itself.
        for c in 1..=k {
            if k - c > 0 && fam.is_empty() {
                continue;
            }
            for_each_multiset(fam, k - c, &mut counts, &mut |cnt| {
                if z & !self.threshold(cnt, j - c as isize) == 0 {
                    let r = z & !self.threshold(cnt, j);
                    debug_assert!(r != 0);
                    self.closures.or_up(forbidden, r);
                }
            });
        }
        // Candidates that would cover an earlier member together with z.
        let mut rest: Vec<u64> = Vec::with_capacity(fam.len());
        for (xi, &x) in fam.iter().enumerate() {
            rest.clear();
            rest.extend(
                fam.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != xi)
                    .map(|(_, &s)| s),
            );
            for c in 1..k {
                for d in 1..=k - c {
                    add(&mut counts, z, d as u8);
                    for_each_multiset(&rest, k - c - d, &mut counts, &mut |cnt| {
                        if x & !self.threshold(cnt, j - c as isize) == 0 {
                            let r = x & !self.threshold(cnt, j);
                            debug_assert!(r != 0);
                            self.closures.or_up(forbidden, r);
                        }
                    });
                    sub(&mut counts, z, d as u8);
                }
            }
        }
    }

    /// `z` is the lowest mask in its orbit under permutations that fix
    /// every member of `fam`.
    fn is_canonical(&self, fam: &[u64], z: u64) -> bool {
        orbit_minimal(fam.iter().copied(), z)
    }

    /// Searches for a family strictly larger than `incumbent`. Returns the
    /// best family found (if any beat the incumbent) and whether the search
    /// space was exhausted.
    fn run(&self, incumbent: usize, meter: &Meter) -> (Option<Vec<u64>>, bool) {
        let best = AtomicUsize::new(incumbent);
        let words = self.closures.words;
        let mut roots: Vec<(u64, Vec<u64>, Vec<u64>)> = Vec::new();
        let sizes: Vec<u32> = {
            let mut s: Vec<u32> = self.universe.iter().map(|x| x.count_ones()).collect();
            s.dedup();
            s
        };
        for s in sizes {
            let first = (1u64 << s) - 1;
            let mut forbidden = vec![0u64; words];
            self.extend_forbidden(&mut forbidden, &[], first);
            let cands: Vec<u64> = self
                .universe
                .iter()
                .copied()
                .filter(|&c| c > first || c.count_ones() > s)
                .filter(|&c| (c.count_ones(), c) > (s, first) && !contains(&forbidden, c))
                .collect();
            roots.push((first, forbidden, cands));
        }
        // Phase one: the optimum size. Under a node cap the roots share one
        // incumbent and run in order; otherwise each root keeps its own, so
        // the node count does not depend on scheduling.
        let found: Vec<Option<Vec<u64>>> = if meter.node_capped() {
            roots
                .iter()
                .map(|(first, forbidden, cands)| {
                    let mut fam = vec![*first];
                    let mut out = None;
                    self.dfs(&mut fam, forbidden, cands, &best, meter, &mut out, None);
                    out
                })
                .collect()
        } else {
            roots
                .par_iter()
                .map(|(first, forbidden, cands)| {
                    let local = AtomicUsize::new(incumbent);
                    let mut fam = vec![*first];
                    let mut out = None;
                    self.dfs(&mut fam, forbidden, cands, &local, meter, &mut out, None);
                    best.fetch_max(local.load(Ordering::Relaxed), Ordering::Relaxed);
                    out
                })
                .collect()
        };
        let complete = !meter.exhausted();
        let size = best.load(Ordering::Relaxed);
        if size == incumbent {
            return (None, complete);
        }
        if !complete {
            let f = found.into_iter().flatten().max_by_key(|f| f.len());
            return (f, false);
        }
        // Phase two: the first family of that size in search order, which
        // does not depend on how phase one was scheduled.
        let target = AtomicUsize::new(size - 1);
        for (first, forbidden, cands) in &roots {
            let mut fam = vec![*first];
            let mut out = None;
            let unlimited = Budget::unlimited().meter();
            self.dfs(
                &mut fam,
                forbidden,
                cands,
                &target,
                &unlimited,
                &mut out,
                Some(size),
            );
            if out.is_some() {
                return (out, true);
            }
        }
        unreachable!("phase two must rediscover a family of size {size}")
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        fam: &mut Vec<u64>,
        forbidden: &[u64],
        cands: &[u64],
        best: &AtomicUsize,
        meter: &Meter,
        out: &mut Option<Vec<u64>>,
        stop_at: Option<usize>,
    ) -> bool {
        if !meter.tick() {
            return true;
        }
        if fam.len() > best.load(Ordering::Relaxed) {
            best.fetch_max(fam.len(), Ordering::Relaxed);
            *out = Some(fam.clone());
            if stop_at == Some(fam.len()) {
                return true;
            }
        }
        for i in 0..cands.len() {
            if fam.len() + cands.len() - i <= best.load(Ordering::Relaxed) {
                break;
            }
            let z = cands[i];
            if !self.is_canonical(fam, z) {
                continue;
            }
            let mut next = forbidden.to_vec();
            self.extend_forbidden(&mut next, fam, z);
            let rest: Vec<u64> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&c| !contains(&next, c))
                .collect();
            fam.push(z);
            let stop = self.dfs(fam, &next, &rest, best, meter, out, stop_at);
            fam.pop();
            if stop && (stop_at.is_some() || meter.exhausted()) {
                return true;
            }
        }
        false
    }
}

fn add(counts: &mut [u8], mask: u64, by: u8) {
    for (e, c) in counts.iter_mut().enumerate() {
        if mask >> e & 1 == 1 {
            *c += by;
        }
    }
}

fn sub(counts: &mut [u8], mask: u64, by: u8) {
    for (e, c) in counts.iter_mut().enumerate() {
        if mask >> e & 1 == 1 {
            *c -= by;
        }
    }
}

/// Calls `f` with element counts of every multiset of `size` members of
/// `pool`, added on top of the incoming `counts`.
fn for_each_multiset(pool: &[u64], size: usize, counts: &mut [u8], f: &mut dyn FnMut(&[u8])) {
    fn go(pool: &[u64], start: usize, left: usize, counts: &mut [u8], f: &mut dyn FnMut(&[u8])) {
        if left == 0 {
            f(counts);
            return;
        }
        for i in start..pool.len() {
            add(counts, pool[i], 1);
            go(pool, i, left - 1, counts, f);
            sub(counts, pool[i], 1);
        }
    }
    go(pool, 0, size, counts, f);
}
