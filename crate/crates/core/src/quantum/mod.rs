//! Pure-state fingerprints: packings, equiangular tight frames, mutually
//! unbiased bases and the SMP measurement built from their support.
//!
//! Everything here is `f64`. Vectors are plain `Vec<Complex64>`; `nalgebra`
//! is only used for Hermitian eigendecompositions.

mod packing;
mod smp;

pub use packing::{
    grassmann_search, packing_bounds, PackingBoundSet, PackingConfig, PackingResult,
};
pub use smp::{
    complement_relation_residual, conjugate_pair, etf_2m_strategy, etf_complement,
    etf_conjugate_strategy, gram_residual, smp_numeric_search, smp_support_projector, smp_wce,
    smp_wce_with, sym_projector, sym_strategy, two_m_xi_states, xi_states, ClosedFormPair,
    ProjectorBasis, SmpReport, SmpSearchConfig, SmpSearchResult, SymReport,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::data::{self, StateKind};
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Allowed deviation of a fingerprint norm from one.
pub const TOL_NORM: f64 = 1e-12;

/// Tolerance used when a construction requires an ETF as input.
pub const ETF_INPUT_TOL: f64 = 1e-9;

/// Pairwise overlaps within this distance count as ties when picking a
/// witness, so the lexicographically smallest pair wins.
pub(crate) const TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    dim: usize,
    vectors: Vec<Vec<C64>>,
}

impl StateSet {
    /// Validates shape and unit norms.
    pub fn new(dim: usize, vectors: Vec<Vec<C64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "state dimension must be positive".into(),
            ));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "state {i} has {} components, expected {dim}",
                    v.len()
                )));
            }
            let norm = norm_sq(v);
            if (norm - 1.0).abs() > TOL_NORM {
                return Err(Error::InvalidInput(format!(
                    "state {i} has squared norm {norm}, not 1"
                )));
            }
        }
        Ok(Self { dim, vectors })
    }

    /// Rescales every vector to unit length.
    pub fn normalized(dim: usize, mut vectors: Vec<Vec<C64>>) -> Result<Self> {
        for (i, v) in vectors.iter_mut().enumerate() {
            let n = norm_sq(v).sqrt();
            if n == 0.0 || !n.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "state {i} cannot be normalized"
                )));
            }
            v.iter_mut().for_each(|z| *z /= n);
        }
        Self::new(dim, vectors)
    }

    /// The first `n` computational basis vectors (`n ≤ dim`).
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        if n > dim {
            return Err(Error::InvalidInput(format!(
                "{n} orthonormal states do not fit in dimension {dim}"
            )));
        }
        let vectors = (0..n)
            .map(|i| {
                (0..dim)
                    .map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        Self::new(dim, vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[C64] {
        &self.vectors[i]
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conjugate(&self) -> Self {
        Self {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(|z| z.conj()).collect())
                .collect(),
        }
    }

    /// The first `n` states.
    pub fn prefix(&self, n: usize) -> Self {
        Self {
            dim: self.dim,
            vectors: self.vectors[..n.min(self.count())].to_vec(),
        }
    }

    /// `|<ψ_x|ψ_y>|^2` for all pairs.
    pub fn overlap_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.count();
        let mut g = vec![vec![0.0; n]; n];
        for x in 0..n {
            g[x][x] = 1.0;
            for y in x + 1..n {
                let o = inner(&self.vectors[x], &self.vectors[y]).norm_sqr();
                g[x][y] = o;
                g[y][x] = o;
            }
        }
        g
    }
}

/// `<a|b>` with Neumaier-compensated sums for the real and imaginary parts.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    for (x, y) in a.iter().zip(b) {
        let p = x.conj() * y;
        re.add(p.re);
        im.add(p.im);
    }
    C64::new(re.total(), im.total())
}

pub fn norm_sq(v: &[C64]) -> f64 {
    let mut s = Neumaier::default();
    v.iter().for_each(|z| s.add(z.norm_sqr()));
    s.total()
}

/// `a ⊗ b` with `a`'s index major.
pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    /// Largest squared overlap over distinct pairs.
    pub max_overlap: f64,
    /// Lexicographically smallest pair attaining it (0-based).
    pub argmax: Option<(usize, usize)>,
    pub mean_off_diagonal: f64,
    pub min_off_diagonal: f64,
    /// Fewer than two states: there is no pair to compare.
    pub vacuous: bool,
}

pub fn max_pairwise_overlap(s: &StateSet) -> OverlapReport {
    let n = s.count();
    if n < 2 {
        return OverlapReport {
            max_overlap: 0.0,
            argmax: None,
            mean_off_diagonal: 0.0,
            min_off_diagonal: 0.0,
            vacuous: true,
        };
    }
    let g = s.overlap_matrix();
    let mut max = f64::NEG_INFINITY;
    let mut arg = (0, 1);
    let mut min = f64::INFINITY;
    let mut sum = 0.0;
    for x in 0..n {
        for y in x + 1..n {
            let o = g[x][y];
            if o > max + TIE {
                arg = (x, y);
            }
            max = max.max(o);
            min = min.min(o);
            sum += o;
        }
    }
    OverlapReport {
        max_overlap: max,
        argmax: Some(arg),
        mean_off_diagonal: sum / (n * (n - 1) / 2) as f64,
        min_off_diagonal: min,
        vacuous: false,
    }
}

/// Worst-case error of the one-way strategy that sends `|ψ(x)>` and lets
/// the referee project onto `|ψ(y)>`.
pub fn one_way_wce(s: &StateSet) -> f64 {
    max_pairwise_overlap(s).max_overlap
}

/// `(n-m)/(m(n-1))`, the common overlap of an ETF and the simplex bound.
pub fn etf_overlap(n: usize, m: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    (n as f64 - m as f64) / (m as f64 * (n as f64 - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtfReport {
    pub target_overlap: f64,
    /// Largest `| |<ψ_x|ψ_y>|^2 - target |` over distinct pairs.
    pub equiangular_deviation: f64,
    /// Largest entry of `Σ |ψ><ψ| - (n/m) I` in modulus.
    pub frame_deviation: f64,
    pub equiangular: bool,
    pub tight: bool,
}

impl EtfReport {
    pub fn holds(&self) -> bool {
        self.equiangular && self.tight
    }
}

pub fn check_etf(s: &StateSet, tol: f64) -> EtfReport {
    let (n, m) = (s.count(), s.dim());
    let target = etf_overlap(n, m);
    let g = s.overlap_matrix();
    let mut dev: f64 = 0.0;
    for x in 0..n {
        for y in x + 1..n {
            dev = dev.max((g[x][y] - target).abs());
        }
    }
    let scale = n as f64 / m as f64;
    let mut frame: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut re = Neumaier::default();
            let mut im = Neumaier::default();
            for v in s.vectors() {
                let p = v[i] * v[j].conj();
                re.add(p.re);
                im.add(p.im);
            }
            let want = if i == j { scale } else { 0.0 };
            frame = frame.max(C64::new(re.total() - want, im.total()).norm());
        }
    }
    EtfReport {
        target_overlap: target,
        equiangular_deviation: dev,
        frame_deviation: frame,
        equiangular: dev <= tol,
        tight: frame <= tol,
    }
}

/// The `m + 1` vertices of a regular simplex in `C^m`, an ETF for every `m`:
/// the standard basis of `R^{m+1}` projected off the all-ones vector, in
/// Helmert coordinates.
pub fn simplex_states(m: usize) -> Result<StateSet> {
    if m == 0 {
        return Err(Error::InvalidInput("simplex needs m >= 1".into()));
    }
    let vectors = (0..=m)
        .map(|i| {
            (1..=m)
                .map(|k| {
                    let h = if i < k {
                        1.0
                    } else if i == k {
                        -(k as f64)
                    } else {
                        0.0
                    };
                    C64::new(h / ((k * (k + 1)) as f64).sqrt(), 0.0)
                })
                .collect()
        })
        .collect();
    StateSet::normalized(m, vectors)
}

pub fn is_prime(m: usize) -> bool {
    m >= 2
        && (2..)
            .take_while(|d| d * d <= m)
            .all(|d| !m.is_multiple_of(d))
}

/// `m + 1` mutually unbiased bases of `C^m` for prime `m`: the computational
/// basis followed by the quadratic-phase bases `ω^{a j² + b j}/√m`
/// (for `m = 2`, the phases `i^{a j} (-1)^{b j}`), basis by basis.
pub fn mub_states(m: usize) -> Result<StateSet> {
    if !is_prime(m) {
        return Err(Error::InvalidInput(format!(
            "mutually unbiased bases are constructed for prime dimensions only, got {m}"
        )));
    }
    let amp = 1.0 / (m as f64).sqrt();
    let mut vectors = StateSet::basis(m, m)?.vectors;
    for a in 0..m {
        for b in 0..m {
            let v = (0..m)
                .map(|j| {
                    let turns = if m == 2 {
                        (a * j) as f64 / 4.0 + (b * j) as f64 / 2.0
                    } else {
                        ((a * j * j + b * j) % m) as f64 / m as f64
                    };
                    C64::from_polar(amp, 2.0 * std::f64::consts::PI * turns)
                })
                .collect();
            vectors.push(v);
        }
    }
    StateSet::new(m, vectors)
}

/// A state set shipped with the crate.
#[derive(Debug, Clone)]
pub struct BundledSet {
    pub kind: StateKind,
    pub source: String,
    pub states: StateSet,
}

fn convert(b: &data::BundledStates) -> Result<BundledSet> {
    let vectors = b
        .vectors
        .iter()
        .map(|v| v.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    Ok(BundledSet {
        kind: b.kind,
        source: b.source.clone(),
        states: StateSet::new(b.dim, vectors)?,
    })
}

pub fn bundled_sets() -> Result<Vec<BundledSet>> {
    data::states()?.iter().map(convert).collect()
}

/// Bundled equiangular tight frames, SICs included.
pub fn bundled_etfs() -> Result<Vec<BundledSet>> {
    Ok(bundled_sets()?
        .into_iter()
        .filter(|b| matches!(b.kind, StateKind::Etf | StateKind::Sic))
        .collect())
}

/// The bundled set of this shape, if any (ETFs and SICs before MUBs).
pub fn bundled(dim: usize, count: usize, kind: Option<StateKind>) -> Result<Option<BundledSet>> {
    data::find_states(dim, count, kind)?
        .map(convert)
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_has_no_overlap() {
        let s = StateSet::basis(3, 3).unwrap();
        let r = max_pairwise_overlap(&s);
        assert_eq!(r.max_overlap, 0.0);
        assert_eq!(r.argmax, Some((0, 1)));
        assert!(check_etf(&s, 1e-12).holds());
    }

    #[test]
    fn simplex_is_etf() {
        for m in 1..8 {
            let s = simplex_states(m).unwrap();
            assert!(check_etf(&s, 1e-12).holds(), "m = {m}");
            let o = max_pairwise_overlap(&s).max_overlap;
            assert!((o - etf_overlap(m + 1, m)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_state_is_vacuous() {
        let s = StateSet::basis(1, 2).unwrap();
        assert!(max_pairwise_overlap(&s).vacuous);
    }

    #[test]
    fn rejects_unnormalized() {
        let v = vec![vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]];
        assert!(StateSet::new(2, v.clone()).is_err());
        assert!(StateSet::normalized(2, v).is_ok());
    }

    #[test]
    fn mub_overlaps() {
        for m in [2, 3, 5, 7] {
            let s = mub_states(m).unwrap();
            assert_eq!(s.count(), m * (m + 1));
            let g = s.overlap_matrix();
            for x in 0..s.count() {
                for y in 0..s.count() {
                    let want = if x / m == y / m {
                        if x == y {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        1.0 / m as f64
                    };
                    assert!((g[x][y] - want).abs() < 1e-10, "m={m} ({x},{y})");
                }
            }
        }
        assert!(mub_states(4).is_err());
        assert!(mub_states(6).is_err());
    }

    #[test]
    fn bundled_etfs_verify() {
        let sets = bundled_etfs().unwrap();
        assert_eq!(sets.len(), 11);
        for b in sets {
            let r = check_etf(&b.states, 1e-12);
            assert!(r.holds(), "{} {:?}", b.source, r);
        }
    }

    #[test]
    fn perturbed_etf_fails_both_checks() {
        let b = bundled(3, 4, Some(StateKind::Etf)).unwrap().unwrap();
        let mut v = b.states.vectors().to_vec();
        let (c, s) = (1e-3f64.cos(), 1e-3f64.sin());
        let (a0, a1) = (v[0][0], v[0][1]);
        v[0][0] = a0 * c - a1 * s;
        v[0][1] = a0 * s + a1 * c;
        let r = check_etf(&StateSet::new(3, v).unwrap(), 1e-9);
        assert!(!r.equiangular && !r.tight);
    }

    #[test]
    fn known_packings() {
        let tetra = bundled(2, 4, None).unwrap().unwrap();
        assert!((one_way_wce(&tetra.states) - 1.0 / 3.0).abs() < 1e-12);
        let tri = bundled(2, 3, None).unwrap().unwrap();
        assert!((one_way_wce(&tri.states) - 0.25).abs() < 1e-12);
        let mub4 = bundled(4, 20, Some(StateKind::Mub)).unwrap().unwrap();
        assert!((one_way_wce(&mub4.states) - 0.25).abs() < 1e-12);
    }
}
