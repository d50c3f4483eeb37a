//! Exhaustive minimum of the worst-case error over binary strategies.
//!
//! One-way: by the support reduction only antichain supports can beat 1, and
//! for fixed supports the per-message LP is exact, so enumerating antichains
//! up to ground-set symmetry gives the true minimum.
//!
//! SMP: Alice's antichain is enumerated up to symmetry, Bob's labeled family
//! by backtracking, each pair seeded uniformly and refined by alternating
//! LPs. The bilinear problem is not solved exactly, so the result is only an
//! upper bound unless a closed-form shortcut applies.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::optimize::{minimax_row, optimize_supports_one_way, refine_smp};
use super::{uniform_on_supports, ClassicalStrategy};
use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::family::{bits, full_mask, orbit_minimal, sperner_number, SubsetFamily};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    OneWay,
    Smp,
}

#[derive(Debug, Clone)]
pub struct MinWce {
    pub value: Rational,
    pub strategy: Option<ClassicalStrategy>,
    /// The value is the true minimum.
    pub exact: bool,
    /// The value is only known to be achievable.
    pub upper_bound_only: bool,
    pub budget_exhausted: bool,
    pub evaluated: u64,
}

pub fn brute_force_min_wce(
    n: usize,
    m_a: usize,
    m_b: usize,
    model: Model,
    budget: Budget,
) -> Result<MinWce> {
    if n == 0 || m_a == 0 || m_b == 0 {
        return Err(Error::InvalidInput(
            "n, m_a and m_b must be positive".into(),
        ));
    }
    match model {
        Model::OneWay => {
            if m_b != n {
                return Err(Error::InvalidInput(format!(
                    "one-way model relays Bob's message: m_b must equal n = {n}, got {m_b}"
                )));
            }
            one_way(n, m_a, budget)
        }
        Model::Smp => smp(n, m_a, m_b, budget),
    }
}

fn trivial(n: usize, m_a: usize, m_b: usize) -> Option<MinWce> {
    let m = m_a.min(m_b);
    if n <= m {
        let single = SubsetFamily::singletons(n);
        let pad =
            |f: &SubsetFamily, w| SubsetFamily::new(w, f.sets().to_vec()).expect("n <= width");
        let s =
            uniform_on_supports(&pad(&single, m_a), &pad(&single, m_b)).expect("valid supports");
        return Some(MinWce {
            value: Rational::zero(),
            strategy: Some(s),
            exact: true,
            upper_bound_only: false,
            budget_exhausted: false,
            evaluated: 0,
        });
    }
    if n as u64 > sperner_number(m) {
        // Everything maps to fingerprint 0 and Roger always says "equal".
        let row = |w: usize| {
            let mut r = vec![Rational::zero(); w];
            r[0] = Rational::one();
            r
        };
        let s = ClassicalStrategy::new(
            vec![row(m_a); n],
            vec![row(m_b); n],
            vec![vec![Rational::one(); m_b]; m_a],
        )
        .expect("valid constant strategy");
        return Some(MinWce {
            value: Rational::one(),
            strategy: Some(s),
            exact: true,
            upper_bound_only: false,
            budget_exhausted: false,
            evaluated: 0,
        });
    }
    None
}

/// Enumerates antichains of size `n` on `[m]` whose members are listed in
/// `(popcount, mask)` order and each member is the lowest in its orbit under
/// the permutations fixing the earlier members.
struct AntichainWalker {
    m: usize,
    n: usize,
    universe: Vec<u64>,
}

impl AntichainWalker {
    fn new(m: usize, n: usize) -> Self {
        let mut universe: Vec<u64> = (1..=full_mask(m)).collect();
        universe.sort_by_key(|&s| (s.count_ones(), s));
        Self { m, n, universe }
    }

    fn roots(&self) -> Vec<u64> {
        (1..=self.m).map(|s| (1u64 << s) - 1).collect()
    }

    fn canonical(&self, fam: &[u64], z: u64) -> bool {
        orbit_minimal(fam.iter().copied(), z)
    }

    /// Calls `leaf` on every complete family below `root`; `leaf` returns
    /// false to stop. Returns false if stopped.
    fn walk(&self, root: u64, meter: &Meter, leaf: &mut dyn FnMut(&[u64]) -> bool) -> bool {
        let start = self
            .universe
            .iter()
            .position(|&u| u == root)
            .expect("root in universe");
        let cands: Vec<u64> = self.universe[start + 1..]
            .iter()
            .copied()
            .filter(|&c| c & root != root && c & root != c)
            .collect();
        let mut fam = vec![root];
        self.go(&mut fam, &cands, meter, leaf)
    }

    fn go(
        &self,
        fam: &mut Vec<u64>,
        cands: &[u64],
        meter: &Meter,
        leaf: &mut dyn FnMut(&[u64]) -> bool,
    ) -> bool {
        if !meter.tick() {
            return false;
        }
        if fam.len() == self.n {
            return leaf(fam);
        }
        let need = self.n - fam.len();
        for i in 0..cands.len() {
            if cands.len() - i < need {
                break;
            }
            let z = cands[i];
            if !self.canonical(fam, z) {
                continue;
            }
            let rest: Vec<u64> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&c| c & z != z && c & z != c)
                .collect();
            fam.push(z);
            let cont = self.go(fam, &rest, meter, leaf);
            fam.pop();
            if !cont {
                return false;
            }
        }
        true
    }
}

type RowKey = (u64, Vec<u64>);

/// Exact one-way value of a support family, stopping early once it reaches
/// `cutoff`. Per-message optima are cached by their reduced trace pattern.
fn one_way_value(
    fam: &[u64],
    cutoff: &Rational,
    cache: &mut HashMap<RowKey, Rational>,
) -> Rational {
    let mut worst = Rational::zero();
    for (x, &ix) in fam.iter().enumerate() {
        let mut traces: Vec<u64> = fam
            .iter()
            .enumerate()
            .filter(|&(y, _)| y != x)
            .map(|(_, &iy)| iy & ix)
            .filter(|&t| t != 0)
            .collect();
        traces.sort_unstable();
        traces.dedup();
        let maximal: Vec<u64> = traces
            .iter()
            .copied()
            .filter(|&t| !traces.iter().any(|&u| u != t && t & !u == 0))
            .collect();
        let key = (ix, maximal);
        let v = match cache.get(&key) {
            Some(v) => v.clone(),
            None => {
                let support: Vec<usize> = bits(ix).collect();
                let width = 64 - ix.leading_zeros() as usize;
                let rows: Vec<Vec<Rational>> = key
                    .1
                    .iter()
                    .map(|&t| {
                        (0..width)
                            .map(|a| {
                                if t >> a & 1 == 1 {
                                    Rational::one()
                                } else {
                                    Rational::zero()
                                }
                            })
                            .collect()
                    })
                    .collect();
                let (_, v) = minimax_row(&support, &rows);
                cache.insert(key, v.clone());
                v
            }
        };
        if v > worst {
            worst = v;
            if worst >= *cutoff {
                break;
            }
        }
    }
    worst
}

fn one_way(n: usize, m: usize, budget: Budget) -> Result<MinWce> {
    if let Some(t) = trivial(n, m, n) {
        return Ok(t);
    }
    let meter = budget.meter();
    let walker = AntichainWalker::new(m, n);
    let roots = walker.roots();
    let run = |&root: &_| {
        let mut cache = HashMap::new();
        let mut best: Option<(Rational, Vec<u64>)> = None;
        let mut evaluated = 0u64;
        walker.walk(root, &meter, &mut |fam| {
            evaluated += 1;
            let cutoff = best.as_ref().map_or_else(Rational::one, |b| b.0.clone());
            let v = one_way_value(fam, &cutoff, &mut cache);
            if best.as_ref().is_none_or(|b| v < b.0) {
                let stop = v.is_zero();
                best = Some((v, fam.to_vec()));
                return !stop;
            }
            true
        });
        best.map(|(v, f)| (v, f, evaluated))
    };
    // A node cap stops at the same place only if the roots run in order.
    let results: Vec<Option<(Rational, Vec<u64>, u64)>> = if meter.node_capped() {
        roots.iter().map(run).collect()
    } else {
        roots.par_iter().map(run).collect()
    };
    let evaluated = results.iter().flatten().map(|r| r.2).sum();
    // Deterministic reduction: smallest value, then earliest root.
    let best = results.into_iter().flatten().fold(
        None::<(Rational, Vec<u64>)>,
        |acc, (v, f, _)| match acc {
            Some((bv, bf)) if bv <= v => Some((bv, bf)),
            _ => Some((v, f)),
        },
    );
    let exhausted = meter.exhausted();
    let Some((value, fam)) = best else {
        return Err(Error::InvalidInput(format!(
            "no antichain of size {n} was reached on [{m}] within budget"
        )));
    };
    let (strategy, v) = optimize_supports_one_way::<Rational>(&SubsetFamily::new(m, fam)?)?;
    debug_assert_eq!(v, value);
    Ok(MinWce {
        value,
        strategy: Some(strategy),
        exact: !exhausted,
        upper_bound_only: exhausted,
        budget_exhausted: exhausted,
        evaluated,
    })
}

const SMP_ROUNDS: usize = 8;

fn smp(n: usize, m_a: usize, m_b: usize, budget: Budget) -> Result<MinWce> {
    if let Some(t) = trivial(n, m_a, m_b) {
        return Ok(t);
    }
    let meter = budget.meter();
    let walker = AntichainWalker::new(m_a, n);
    let mut best: Option<(Rational, ClassicalStrategy)> = None;
    let mut evaluated = 0u64;
    for root in walker.roots() {
        let cont = walker.walk(root, &meter, &mut |alice| {
            bob_search(alice, m_a, m_b, &meter, &mut |fp, fq| {
                evaluated += 1;
                let Ok(s) = uniform_on_supports::<Rational>(fp, fq) else {
                    return true;
                };
                let s = refine_smp(&s, SMP_ROUNDS);
                let v = s.error_report().worst_case;
                if best.as_ref().is_none_or(|b| v < b.0) {
                    let stop = v.is_zero();
                    best = Some((v, s));
                    return !stop;
                }
                true
            })
        });
        if !cont {
            break;
        }
    }
    let exhausted = meter.exhausted();
    let Some((value, strategy)) = best else {
        return Err(Error::InvalidInput(format!(
            "no admissible support pair for n = {n} was reached within budget"
        )));
    };
    Ok(MinWce {
        value,
        strategy: Some(strategy),
        exact: false,
        upper_bound_only: true,
        budget_exhausted: exhausted,
        evaluated,
    })
}

/// Labeled Bob families for a fixed Alice family, keeping every cross pair
/// `A_x × B_y` (x ≠ y) outside the union of the diagonal products; that
/// union only grows, so violations prune. Bob tries the complement of
/// Alice's set first.
fn bob_search(
    alice: &[u64],
    m_a: usize,
    m_b: usize,
    meter: &Meter,
    leaf: &mut dyn FnMut(&SubsetFamily, &SubsetFamily) -> bool,
) -> bool {
    let n = alice.len();
    let full_b = full_mask(m_b);
    let order: Vec<Vec<u64>> = alice
        .iter()
        .map(|&a| {
            let mut v: Vec<u64> = (1..=full_b).collect();
            v.sort_by_key(|&s| (s.count_ones(), s));
            let comp = !a & full_mask(m_a) & full_b;
            if comp != 0 {
                v.retain(|&s| s != comp);
                v.insert(0, comp);
            }
            v
        })
        .collect();
    let fp = SubsetFamily::new(m_a, alice.to_vec()).expect("valid Alice family");
    let mut bob: Vec<u64> = Vec::with_capacity(n);
    // union[a] = ∪ { B_z : a ∈ A_z }
    let mut union = vec![0u64; m_a];

    fn admissible(alice: &[u64], bob: &[u64], union: &[u64]) -> bool {
        for (x, &ax) in alice.iter().enumerate().take(bob.len()) {
            for (y, &by) in bob.iter().enumerate() {
                if x != y && bits(ax).all(|a| by & !union[a] == 0) {
                    return false;
                }
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        alice: &[u64],
        order: &[Vec<u64>],
        bob: &mut Vec<u64>,
        union: &mut Vec<u64>,
        fp: &SubsetFamily,
        m_b: usize,
        meter: &Meter,
        leaf: &mut dyn FnMut(&SubsetFamily, &SubsetFamily) -> bool,
    ) -> bool {
        if !meter.tick() {
            return false;
        }
        let x = bob.len();
        if x == alice.len() {
            let fq = SubsetFamily::new(m_b, bob.clone()).expect("valid Bob family");
            return leaf(fp, &fq);
        }
        for &b in &order[x] {
            let saved = union.clone();
            for a in bits(alice[x]) {
                union[a] |= b;
            }
            bob.push(b);
            let ok = admissible(alice, bob, union);
            let cont = !ok || go(alice, order, bob, union, fp, m_b, meter, leaf);
            bob.pop();
            *union = saved;
            if !cont {
                return false;
            }
        }
        true
    }

    go(alice, &order, &mut bob, &mut union, &fp, m_b, meter, leaf)
}
