//! Line packings in `C^m`: analytic lower bounds and a numerical search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{etf_overlap, inner, max_pairwise_overlap, OverlapReport, StateSet, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingBoundSet {
    pub simplex: f64,
    /// `1/m`, applicable only when `n > m²`.
    pub orthoplex: Option<f64>,
    /// The orthoplex bound can be attained only for `n ≤ 2(m² - 1)`.
    pub orthoplex_attainable: bool,
    /// `m = 2` only.
    pub fejes_toth: Option<f64>,
    /// Bounds on the mixed-state overlap `Δ²(n, m)`.
    pub delta2_lower: f64,
    pub delta2_upper: f64,
}

impl PackingBoundSet {
    /// Strongest applicable lower bound on the pure-state packing overlap.
    pub fn best_lower(&self) -> f64 {
        [Some(self.simplex), self.orthoplex, self.fejes_toth]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max)
    }
}

pub fn packing_bounds(n: usize, m: usize) -> Result<PackingBoundSet> {
    if m == 0 || n < m {
        return Err(Error::InvalidInput(format!(
            "packing bounds need n >= m >= 1, got n = {n}, m = {m}"
        )));
    }
    let simplex = etf_overlap(n, m);
    let beyond = n > m * m;
    let orthoplex = beyond.then(|| 1.0 / m as f64);
    let fejes_toth = (m == 2 && n >= 3).then(|| {
        let s = (std::f64::consts::PI * n as f64 / (6.0 * (n as f64 - 2.0))).sin();
        0.25 / (s * s)
    });
    Ok(PackingBoundSet {
        simplex,
        orthoplex,
        orthoplex_attainable: beyond && n <= 2 * (m * m - 1),
        fejes_toth,
        delta2_lower: if beyond { 1.0 / m as f64 } else { simplex },
        delta2_upper: 1.0 / m as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PackingConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for PackingConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            iterations: 5000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PackingResult {
    #[serde(skip)]
    pub states: StateSet,
    pub report: OverlapReport,
    pub bounds: PackingBoundSet,
    /// Distance above the strongest lower bound.
    pub gap: f64,
    /// Index of the restart that produced `states`.
    pub restart: usize,
}

/// Smoothed-maximum descent on the product of unit spheres. The objective
/// is `log Σ exp(β g_xy) / β` over squared overlaps `g_xy`; `β` doubles
/// whenever the true maximum stops improving.
pub fn grassmann_search(n: usize, m: usize, cfg: PackingConfig) -> Result<PackingResult> {
    let bounds = packing_bounds(n, m)?;
    if n <= m {
        let states = StateSet::basis(n, m)?;
        return Ok(PackingResult {
            report: max_pairwise_overlap(&states),
            gap: 0.0,
            states,
            bounds,
            restart: 0,
        });
    }
    let (restart, value, vectors) = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let (v, x) = descend(n, m, cfg.iterations, cfg.seed, r as u64);
            (r, v, x)
        })
        .reduce_with(|a, b| {
            if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");
    let states = StateSet::normalized(m, vectors)?;
    let report = max_pairwise_overlap(&states);
    debug_assert!((report.max_overlap - value).abs() < 1e-9);
    Ok(PackingResult {
        gap: report.max_overlap - bounds.best_lower(),
        report,
        bounds,
        states,
        restart,
    })
}

pub(crate) fn random_states(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    (0..n)
        .map(|_| {
            let mut v: Vec<C64> = (0..m)
                .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect();
            normalize(&mut v);
            v
        })
        .collect()
}

pub(crate) fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn max_overlap(psi: &[Vec<C64>]) -> f64 {
    let mut best: f64 = 0.0;
    for x in 0..psi.len() {
        for y in x + 1..psi.len() {
            best = best.max(inner(&psi[x], &psi[y]).norm_sqr());
        }
    }
    best
}

/// Smoothed objective and, if asked, its gradient with respect to `conj(ψ_x)`.
fn smoothed(psi: &[Vec<C64>], beta: f64, grad: Option<&mut [Vec<C64>]>) -> f64 {
    let n = psi.len();
    let mut c = vec![vec![C64::new(0.0, 0.0); n]; n];
    let mut top = f64::NEG_INFINITY;
    for x in 0..n {
        for y in x + 1..n {
            let z = inner(&psi[x], &psi[y]);
            c[x][y] = z;
            top = top.max(z.norm_sqr());
        }
    }
    let mut total = 0.0;
    let mut w = vec![vec![0.0; n]; n];
    for x in 0..n {
        for y in x + 1..n {
            let e = (beta * (c[x][y].norm_sqr() - top)).exp();
            w[x][y] = e;
            total += e;
        }
    }
    if let Some(g) = grad {
        for v in g.iter_mut() {
            v.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
        for x in 0..n {
            for y in x + 1..n {
                let wt = w[x][y] / total;
                if wt < 1e-300 {
                    continue;
                }
                // d|<x|y>|²/d conj(ψ_x) = ψ_y <y|x>, and symmetrically.
                let cxy = c[x][y];
                for i in 0..psi[x].len() {
                    g[x][i] += psi[y][i] * cxy.conj() * wt;
                    g[y][i] += psi[x][i] * cxy * wt;
                }
            }
        }
    }
    top + total.ln() / beta
}

fn descend(n: usize, m: usize, iterations: usize, seed: u64, stream: u64) -> (f64, Vec<Vec<C64>>) {
    const PLATEAU: usize = 50;
    let mut rng = rng_for(seed, stream);
    let mut psi = random_states(n, m, &mut rng);
    let mut grad = vec![vec![C64::new(0.0, 0.0); m]; n];
    let mut beta = 64.0;
    let mut eta = 0.1;
    let mut best = max_overlap(&psi);
    let mut best_psi = psi.clone();
    let mut stall = 0;
    for _ in 0..iterations {
        let f = smoothed(&psi, beta, Some(&mut grad));
        for (v, g) in psi.iter().zip(grad.iter_mut()) {
            let radial = inner(v, g).re;
            for (gi, vi) in g.iter_mut().zip(v) {
                *gi -= vi * radial;
            }
        }
        let mut moved = false;
        for _ in 0..30 {
            let cand: Vec<Vec<C64>> = psi
                .iter()
                .zip(&grad)
                .map(|(v, g)| {
                    let mut u: Vec<C64> = v.iter().zip(g).map(|(a, b)| a - b * eta).collect();
                    normalize(&mut u);
                    u
                })
                .collect();
            if smoothed(&cand, beta, None) < f {
                psi = cand;
                eta *= 1.2;
                moved = true;
                break;
            }
            eta *= 0.5;
        }
        let now = max_overlap(&psi);
        if now < best - 1e-13 {
            best = now;
            best_psi.clone_from(&psi);
            stall = 0;
        } else {
            stall += 1;
        }
        if stall >= PLATEAU || !moved {
            beta *= 2.0;
            eta = eta.max(1e-3);
            stall = 0;
        }
        if beta > 1e12 {
            break;
        }
    }
    (best, best_psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        let b = packing_bounds(4, 2).unwrap();
        assert!((b.simplex - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.fejes_toth.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let b = packing_bounds(6, 2).unwrap();
        assert!((b.fejes_toth.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(packing_bounds(3, 3).unwrap().simplex, 0.0);
        let b = packing_bounds(10, 3).unwrap();
        assert_eq!(b.orthoplex, Some(1.0 / 3.0));
        assert!(b.orthoplex_attainable);
        assert_eq!(b.delta2_lower, 1.0 / 3.0);
        assert!(packing_bounds(2, 3).is_err());
    }

    #[test]
    fn simplex_at_most_inverse_dimension() {
        for m in 2..6 {
            for n in m..=m * m {
                assert!(packing_bounds(n, m).unwrap().simplex <= 1.0 / m as f64 + 1e-15);
            }
        }
    }

    #[test]
    fn small_searches() {
        let cfg = PackingConfig {
            restarts: 8,
            iterations: 2000,
            seed: 3,
        };
        let r = grassmann_search(2, 2, cfg).unwrap();
        assert_eq!(r.report.max_overlap, 0.0);
        let r = grassmann_search(5, 2, cfg).unwrap();
        assert!(
            (r.report.max_overlap - 0.5).abs() < 1e-6,
            "{}",
            r.report.max_overlap
        );
        let r = grassmann_search(4, 3, cfg).unwrap();
        assert!(
            (r.report.max_overlap - 1.0 / 9.0).abs() < 1e-6,
            "{}",
            r.report.max_overlap
        );
        assert!(r.gap > -1e-9);
    }

    #[test]
    fn search_is_deterministic() {
        let cfg = PackingConfig {
            restarts: 4,
            iterations: 300,
            seed: 11,
        };
        let a = grassmann_search(7, 2, cfg).unwrap();
        let b = grassmann_search(7, 2, cfg).unwrap();
        assert_eq!(a.states, b.states);
        assert_eq!(a.restart, b.restart);
    }
}
