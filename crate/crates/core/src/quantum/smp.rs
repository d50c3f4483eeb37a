//! SMP quantum strategies: the referee projects onto the support of
//! `Σ_z |ψ(z)><ψ(z)| ⊗ |φ(z)><φ(z)|`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::packing::{normalize, random_states, rng_for};
use super::{
    check_etf, inner, kron, max_pairwise_overlap, norm_sq, StateSet, C64, ETF_INPUT_TOL, TIE,
};
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Orthonormal columns spanning a projector's range.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorBasis {
    ambient: usize,
    columns: Vec<Vec<C64>>,
}

impl ProjectorBasis {
    pub fn new(ambient: usize, columns: Vec<Vec<C64>>) -> Result<Self> {
        if columns.iter().any(|c| c.len() != ambient) {
            return Err(Error::DimensionMismatch(format!(
                "projector columns must have length {ambient}"
            )));
        }
        let p = Self { ambient, columns };
        let r = p.orthonormality_residual();
        if r > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "projector columns are not orthonormal (residual {r:e})"
            )));
        }
        Ok(p)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<C64>] {
        &self.columns
    }

    /// `<v|P|v>`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        self.columns.iter().map(|c| inner(c, v).norm_sqr()).sum()
    }

    /// `‖v - P v‖`.
    pub fn residual(&self, v: &[C64]) -> f64 {
        let mut r = v.to_vec();
        for c in &self.columns {
            let a = inner(c, v);
            r.iter_mut().zip(c).for_each(|(ri, ci)| *ri -= ci * a);
        }
        norm_sq(&r).sqrt()
    }

    pub fn orthonormality_residual(&self) -> f64 {
        gram_residual(&self.columns)
    }

    /// `P = B B†` as a dense matrix.
    pub fn matrix(&self) -> DMatrix<C64> {
        let b = DMatrix::from_fn(self.ambient, self.rank(), |i, k| self.columns[k][i]);
        &b * b.adjoint()
    }

    /// Largest entry of `P² - P`.
    pub fn idempotence_residual(&self) -> f64 {
        let p = self.matrix();
        (&p * &p - &p).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Largest entry of `V† V - I` for a list of vectors.
pub fn gram_residual(vs: &[Vec<C64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(a, b) - C64::new(want, 0.0)).norm());
        }
    }
    worst
}

/// Eigenvectors of a Hermitian matrix with eigenvalue above
/// `cutoff × largest`, ordered by decreasing eigenvalue.
fn range_basis(m: DMatrix<C64>, cutoff: f64) -> Vec<Vec<C64>> {
    let d = m.nrows();
    let eig = m.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut idx: Vec<usize> = (0..d)
        .filter(|&i| eig.eigenvalues[i] > cutoff * top)
        .collect();
    idx.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    idx.into_iter()
        .map(|i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect()
}

/// Support of `Σ_z |ψ(z)⊗φ(z)><ψ(z)⊗φ(z)|`.
pub fn smp_support_projector(a: &StateSet, b: &StateSet) -> Result<ProjectorBasis> {
    if a.count() != b.count() {
        return Err(Error::DimensionMismatch(format!(
            "Alice has {} states, Bob has {}",
            a.count(),
            b.count()
        )));
    }
    let d = a.dim() * b.dim();
    let mut m = DMatrix::<C64>::zeros(d, d);
    for (x, y) in a.vectors().iter().zip(b.vectors()) {
        let v = kron(x, y);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    ProjectorBasis::new(d, range_basis(m, RANK_CUTOFF))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmpReport {
    pub wce: f64,
    /// Lexicographically smallest `(x, y)`, `x ≠ y`, attaining `wce` (0-based).
    pub witness: Option<(usize, usize)>,
    pub rank: usize,
    /// Smallest `<ψ(x)⊗φ(x)|P|ψ(x)⊗φ(x)>`; one for a one-sided strategy.
    pub min_diagonal: f64,
}

/// Worst-case error when the referee accepts with projector `p`.
pub fn smp_wce_with(p: &ProjectorBasis, a: &StateSet, b: &StateSet) -> Result<SmpReport> {
    if a.count() != b.count() || a.dim() * b.dim() != p.ambient() {
        return Err(Error::DimensionMismatch(format!(
            "projector on dimension {} does not fit {}x{} states",
            p.ambient(),
            a.dim(),
            b.dim()
        )));
    }
    let n = a.count();
    let mut wce = 0.0;
    let mut witness = None;
    let mut min_diagonal = f64::INFINITY;
    for x in 0..n {
        for y in 0..n {
            let e = p.expectation(&kron(a.vector(x), b.vector(y)));
            if x == y {
                min_diagonal = min_diagonal.min(e);
            } else if witness.is_none() || e > wce + TIE {
                wce = e;
                witness = Some((x, y));
            } else if e > wce {
                wce = e;
            }
        }
    }
    Ok(SmpReport {
        wce,
        witness,
        rank: p.rank(),
        min_diagonal: if n == 0 { 1.0 } else { min_diagonal },
    })
}

/// Worst-case error with the optimal one-sided measurement.
pub fn smp_wce(a: &StateSet, b: &StateSet) -> Result<SmpReport> {
    smp_wce_with(&smp_support_projector(a, b)?, a, b)
}

/// Projector onto the symmetric subspace of `C^m ⊗ C^m`.
pub fn sym_projector(m: usize) -> ProjectorBasis {
    let d = m * m;
    let mut cols = Vec::with_capacity(m * (m + 1) / 2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..m {
        for b in a..m {
            let mut v = vec![C64::new(0.0, 0.0); d];
            if a == b {
                v[a * m + a] = C64::new(1.0, 0.0);
            } else {
                v[a * m + b] = C64::new(s, 0.0);
                v[b * m + a] = C64::new(s, 0.0);
            }
            cols.push(v);
        }
    }
    ProjectorBasis::new(d, cols).expect("symmetric basis is orthonormal")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymReport {
    /// `(1 + max overlap)/2`.
    pub wce: f64,
    pub witness: Option<(usize, usize)>,
}

/// Both parties send `s`; the referee projects onto the symmetric subspace.
pub fn sym_strategy(s: &StateSet) -> SymReport {
    let r = max_pairwise_overlap(s);
    SymReport {
        wce: if r.vacuous {
            0.0
        } else {
            0.5 * (1.0 + r.max_overlap)
        },
        witness: r.argmax,
    }
}

/// States for both parties and the closed-form error they should achieve.
#[derive(Debug, Clone)]
pub struct ClosedFormPair {
    pub a: StateSet,
    pub b: StateSet,
    pub predicted: f64,
}

fn require_etf(s: &StateSet) -> Result<()> {
    let r = check_etf(s, ETF_INPUT_TOL);
    if r.holds() {
        Ok(())
    } else {
        Err(Error::NotEtf(format!(
            "equiangular deviation {:e}, frame deviation {:e}",
            r.equiangular_deviation, r.frame_deviation
        )))
    }
}

/// `(ξ, ξ*)` without the degeneracy check; the support rank is `n`.
pub fn conjugate_pair(etf: &StateSet) -> Result<(StateSet, StateSet)> {
    require_etf(etf)?;
    Ok((etf.clone(), etf.conjugate()))
}

/// Alice sends `ξ_x`, Bob sends `ξ_y*`. Error `(n²-m²)/(m²(n-1))`.
pub fn etf_conjugate_strategy(etf: &StateSet) -> Result<ClosedFormPair> {
    let (a, b) = conjugate_pair(etf)?;
    let (n, m) = (etf.count() as f64, etf.dim() as f64);
    if etf.count() > 1 && etf.count() == etf.dim() * etf.dim() {
        return Err(Error::Degenerate(format!(
            "(n²-m²)/(m²(n-1)) equals 1 at n = m² = {}; use the symmetric-subspace strategy instead",
            etf.count()
        )));
    }
    let predicted = if etf.count() <= 1 {
        0.0
    } else {
        (n * n - m * m) / (m * m * (n - 1.0))
    };
    Ok(ClosedFormPair { a, b, predicted })
}

fn phase(j: usize, k: usize, n: usize) -> C64 {
    C64::from_polar(
        1.0,
        2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64,
    )
}

/// The `n` Fourier combinations `Ξ_k` of `ξ_j ⊗ ξ_j*` that span the
/// conjugate strategy's support (`k = 1..n`, with `Ξ_n` last).
pub fn xi_states(etf: &StateSet) -> Result<Vec<Vec<C64>>> {
    require_etf(etf)?;
    let (n, m) = (etf.count(), etf.dim());
    if m < 2 {
        return Err(Error::InvalidInput(
            "Ξ states need dimension at least 2".into(),
        ));
    }
    let prods: Vec<Vec<C64>> = etf.vectors().iter().map(|v| kron(v, &conj(v))).collect();
    let (nf, mf) = (n as f64, m as f64);
    let c = (mf * (nf - 1.0) / (nf * nf * (mf - 1.0))).sqrt();
    let last = (mf / (nf * nf)).sqrt();
    Ok((1..=n)
        .map(|k| {
            let scale = if k == n { last } else { c };
            combine(&prods, k, scale)
        })
        .collect())
}

fn conj(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| z.conj()).collect()
}

/// `scale · Σ_j e^{2πi jk/n} v_j` with 1-based `j`.
fn combine(vs: &[Vec<C64>], k: usize, scale: f64) -> Vec<C64> {
    let n = vs.len();
    let mut out = vec![C64::new(0.0, 0.0); vs[0].len()];
    for (j, v) in vs.iter().enumerate() {
        let w = phase(j + 1, k, n) * scale;
        out.iter_mut().zip(v).for_each(|(o, x)| *o += x * w);
    }
    out
}

/// Completes the synthesis matrix `X = √(m/n) [ξ_1 … ξ_n]` to a unitary and
/// reads the complementary ETF in `C^{n-m}` off the added rows.
pub fn etf_complement(etf: &StateSet) -> Result<StateSet> {
    require_etf(etf)?;
    let (n, m) = (etf.count(), etf.dim());
    if n <= m {
        return Err(Error::InvalidInput(format!(
            "complement needs n > m, got n = {n}, m = {m}"
        )));
    }
    let s = (m as f64 / n as f64).sqrt();
    let x = DMatrix::from_fn(m, n, |j, k| etf.vector(k)[j] * s);
    let p = DMatrix::<C64>::identity(n, n) - x.adjoint() * &x;
    let rows = range_basis(p, 0.5);
    if rows.len() != n - m {
        return Err(Error::NotEtf(format!(
            "complement has rank {}, expected {}",
            rows.len(),
            n - m
        )));
    }
    // Y_{jk} = conj(u_j(k)), so that Y†Y = I - X†X.
    let t = (n as f64 / (n - m) as f64).sqrt();
    let chi: Vec<Vec<C64>> = (0..n)
        .map(|k| rows.iter().map(|u| u[k].conj() * t).collect())
        .collect();
    let chi = StateSet::normalized(n - m, chi)?;
    let r = complement_relation_residual(etf, &chi);
    if r > 1e-10 {
        return Err(Error::NotEtf(format!(
            "complement violates the inner-product relation by {r:e}"
        )));
    }
    Ok(chi)
}

/// Largest `|<χ_j|χ_k> + m/(n-m) <ξ_j|ξ_k>|` over `j ≠ k`; for `n = 2m`
/// this is the sign-flip relation `<χ_j|χ_k> = -<ξ_j|ξ_k>`.
pub fn complement_relation_residual(xi: &StateSet, chi: &StateSet) -> f64 {
    let (n, m) = (xi.count(), xi.dim());
    let f = m as f64 / (n - m) as f64;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let d = inner(chi.vector(j), chi.vector(k)) + inner(xi.vector(j), xi.vector(k)) * f;
                worst = worst.max(d.norm());
            }
        }
    }
    worst
}

/// Alice sends `ξ_x`, Bob sends `χ_y*` from the complementary ETF.
/// Requires `n = 2m`; error `(3m-2)/(m(2m-1))`.
pub fn etf_2m_strategy(etf: &StateSet) -> Result<ClosedFormPair> {
    let (n, m) = (etf.count(), etf.dim());
    if n != 2 * m {
        return Err(Error::InvalidInput(format!(
            "this construction needs n = 2m, got n = {n}, m = {m}"
        )));
    }
    let chi = etf_complement(etf)?;
    let mf = m as f64;
    Ok(ClosedFormPair {
        a: etf.clone(),
        b: chi.conjugate(),
        predicted: (3.0 * mf - 2.0) / (mf * (2.0 * mf - 1.0)),
    })
}

/// The `n - 1` states `Ξ_k = √(n-1)/n Σ_j e^{2πi jk/n} ξ_j ⊗ χ_j*`.
pub fn two_m_xi_states(xi: &StateSet, chi: &StateSet) -> Vec<Vec<C64>> {
    let n = xi.count();
    let prods: Vec<Vec<C64>> = xi
        .vectors()
        .iter()
        .zip(chi.vectors())
        .map(|(a, b)| kron(a, &conj(b)))
        .collect();
    let c = ((n - 1) as f64).sqrt() / n as f64;
    (1..n).map(|k| combine(&prods, k, c)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmpSearchConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SmpSearchConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            iterations: 4000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SmpSearchResult {
    pub a: StateSet,
    pub b: StateSet,
    pub wce: f64,
    pub restart: usize,
}

/// Random-perturbation hill climbing, one state at a time. Moves are
/// accepted on a smoothed maximum of the off-diagonal errors whose
/// sharpness grows geometrically; the step size grows on success and
/// shrinks on failure. The best true `smp_wce` seen is returned.
pub fn smp_numeric_search(n: usize, m: usize, cfg: SmpSearchConfig) -> Result<SmpSearchResult> {
    if m == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if n <= m {
        let a = StateSet::basis(n, m)?;
        return Ok(SmpSearchResult {
            b: a.clone(),
            a,
            wce: 0.0,
            restart: 0,
        });
    }
    let (restart, wce, va, vb) = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let (w, a, b) = climb(n, m, cfg.iterations, cfg.seed, r as u64);
            (r, w, a, b)
        })
        .reduce_with(|x, y| {
            if y.1 < x.1 || (y.1 == x.1 && y.0 < x.0) {
                y
            } else {
                x
            }
        })
        .expect("at least one restart");
    Ok(SmpSearchResult {
        a: StateSet::normalized(m, va)?,
        b: StateSet::normalized(m, vb)?,
        wce,
        restart,
    })
}

/// Worst-case error and its smoothed maximum `log Σ exp(β e_xy) / β`.
fn evaluate(m: usize, a: &[Vec<C64>], b: &[Vec<C64>], beta: f64) -> (f64, f64) {
    let sa = StateSet {
        dim: m,
        vectors: a.to_vec(),
    };
    let sb = StateSet {
        dim: m,
        vectors: b.to_vec(),
    };
    let Ok(p) = smp_support_projector(&sa, &sb) else {
        return (f64::INFINITY, f64::INFINITY);
    };
    let n = a.len();
    let mut vals = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            if x != y {
                vals.push(p.expectation(&kron(&a[x], &b[y])));
            }
        }
    }
    let top = vals.iter().copied().fold(0.0, f64::max);
    let sum: f64 = vals.iter().map(|v| (beta * (v - top)).exp()).sum();
    (top, top + sum.ln() / beta)
}

fn climb(
    n: usize,
    m: usize,
    iterations: usize,
    seed: u64,
    stream: u64,
) -> (f64, Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let mut rng = rng_for(seed, stream);
    let mut a = random_states(n, m, &mut rng);
    let mut b = random_states(n, m, &mut rng);
    let mut beta = 32.0;
    let growth = (1e4f64 / beta).powf(1.0 / iterations.max(1) as f64);
    let (mut best, mut cur) = evaluate(m, &a, &b, beta);
    let (mut best_a, mut best_b) = (a.clone(), b.clone());
    let mut sigma = 0.3;
    for _ in 0..iterations {
        let pick = rng.random_range(0..2 * n);
        let (side, i) = if pick < n {
            (&mut a, pick)
        } else {
            (&mut b, pick - n)
        };
        let old = side[i].clone();
        for z in side[i].iter_mut() {
            let dr: f64 = StandardNormal.sample(&mut rng);
            let di: f64 = StandardNormal.sample(&mut rng);
            *z += C64::new(dr, di) * sigma;
        }
        normalize(&mut side[i]);
        let (top, smooth) = evaluate(m, &a, &b, beta);
        if smooth <= cur {
            sigma = (sigma * 1.1).min(1.0);
            if top < best {
                best = top;
                best_a.clone_from(&a);
                best_b.clone_from(&b);
            }
        } else {
            let side = if pick < n { &mut a } else { &mut b };
            side[i] = old;
            sigma = (sigma * 0.97).max(1e-6);
        }
        beta *= growth;
        cur = evaluate(m, &a, &b, beta).1;
    }
    (best, best_a, best_b)
}
