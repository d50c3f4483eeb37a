//! Fractional cover-freeness.
//!
//! A family is `k/j`-cover free when no member `X` is covered `j` times over
//! by a multiset of `k` other members. Repeats are allowed in the multiset,
//! which is what makes the property monotone in `k/j`: with distinct coverers
//! only, a 2/1 family would not automatically be 3/2 free.

use num_integer::Integer;

use super::{bits, SubsetFamily};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoverParams {
    k: usize,
    j: usize,
}

impl CoverParams {
    /// Reduces `k/j` to lowest terms. Requires `k ≥ j ≥ 1`.
    pub fn new(k: usize, j: usize) -> Result<Self> {
        if j == 0 || k < j {
            return Err(Error::InvalidInput(format!(
                "cover parameters need k >= j >= 1, got {k}/{j}"
            )));
        }
        let g = k.gcd(&j);
        Ok(Self { k: k / g, j: j / g })
    }

    pub fn integer(k: usize) -> Result<Self> {
        Self::new(k, 1)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn q(&self) -> Rational {
        Rational::new((self.k as i64).into(), (self.j as i64).into())
    }
}

impl std::fmt::Display for CoverParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.j == 1 {
            write!(f, "{}", self.k)
        } else {
            write!(f, "{}/{}", self.k, self.j)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverCheck {
    /// `vacuous` is set when the family has fewer than two members.
    CoverFree { vacuous: bool },
    /// Member `target` is covered by the multiset `coverers` (length `k`).
    Covered { target: usize, coverers: Vec<usize> },
}

impl CoverCheck {
    pub fn holds(&self) -> bool {
        matches!(self, CoverCheck::CoverFree { .. })
    }
}

pub fn is_cover_free(f: &SubsetFamily, cp: CoverParams) -> CoverCheck {
    let sets = f.sets();
    if sets.len() <= 1 {
        return CoverCheck::CoverFree { vacuous: true };
    }
    for (t, &x) in sets.iter().enumerate() {
        let others: Vec<(usize, u64)> = sets
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| i != t)
            .collect();
        if let Some(coverers) = covering_multiset(x, &others, cp.k, cp.j) {
            return CoverCheck::Covered {
                target: t,
                coverers,
            };
        }
    }
    CoverCheck::CoverFree { vacuous: false }
}

/// Finds `k` members (with repetition) of `others` covering every element of
/// `x` at least `j` times. Returned indices are those stored in `others`.
pub(crate) fn covering_multiset(
    x: u64,
    others: &[(usize, u64)],
    k: usize,
    j: usize,
) -> Option<Vec<usize>> {
    if others.is_empty() {
        return None;
    }
    // Only traces on x matter; equal traces are interchangeable and a trace
    // strictly inside another is never needed.
    let mut traces: Vec<(usize, u64)> = Vec::new();
    for &(i, y) in others {
        let t = y & x;
        if t != 0 && !traces.iter().any(|&(_, u)| u == t) {
            traces.push((i, t));
        }
    }
    let traces: Vec<(usize, u64)> = traces
        .iter()
        .copied()
        .filter(|&(_, t)| !traces.iter().any(|&(_, u)| u != t && t & !u == 0))
        .collect();
    let elems: Vec<usize> = bits(x).collect();
    let mut need: Vec<usize> = vec![j; elems.len()];
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    if !search(&traces, &elems, 0, k, &mut need, &mut chosen) {
        return None;
    }
    let mut out: Vec<usize> = Vec::with_capacity(k);
    for &(ti, c) in &chosen {
        out.extend(std::iter::repeat_n(traces[ti].0, c));
    }
    let pad = out.first().copied().unwrap_or(others[0].0);
    out.resize(k, pad);
    out.sort_unstable();
    Some(out)
}

fn search(
    traces: &[(usize, u64)],
    elems: &[usize],
    idx: usize,
    remaining: usize,
    need: &mut [usize],
    chosen: &mut Vec<(usize, usize)>,
) -> bool {
    let max_need = need.iter().copied().max().unwrap_or(0);
    if max_need == 0 {
        return true;
    }
    if max_need > remaining || idx == traces.len() {
        return false;
    }
    // Every element still short must appear in some remaining trace.
    for (e, &nd) in elems.iter().zip(need.iter()) {
        if nd > 0 && !traces[idx..].iter().any(|&(_, t)| t >> e & 1 == 1) {
            return false;
        }
    }
    let t = traces[idx].1;
    let useful = elems
        .iter()
        .zip(need.iter())
        .filter(|(&e, _)| t >> e & 1 == 1)
        .map(|(_, &nd)| nd)
        .max()
        .unwrap_or(0);
    for c in (0..=useful.min(remaining)).rev() {
        let saved: Vec<usize> = need.to_vec();
        for (e, nd) in elems.iter().zip(need.iter_mut()) {
            if t >> e & 1 == 1 {
                *nd = nd.saturating_sub(c);
            }
        }
        if c > 0 {
            chosen.push((idx, c));
        }
        if search(traces, elems, idx + 1, remaining - c, need, chosen) {
            return true;
        }
        if c > 0 {
            chosen.pop();
        }
        need.copy_from_slice(&saved);
    }
    false
}
