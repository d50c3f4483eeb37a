//! Per-message linear programs for the referee-fixed problems.

use crate::error::{Error, Result};
use crate::family::{bits, SubsetFamily};
use crate::lp::{LinearProgram, Relation};
use crate::scalar::Scalar;

use super::ClassicalStrategy;

/// Solves `min_p max_i Σ_a p_a rows[i][a]` over distributions `p` supported
/// on `support`. Returns `p` indexed like `support`, and the optimum.
pub fn minimax_row<T: Scalar>(support: &[usize], rows: &[Vec<T>]) -> (Vec<T>, T) {
    let s = support.len();
    assert!(s > 0, "empty support");
    let mut reduced: Vec<Vec<T>> = Vec::new();
    for row in rows {
        let r: Vec<T> = support.iter().map(|&a| row[a].clone()).collect();
        if r.iter().all(|v| v.is_zero_tol()) || reduced.contains(&r) {
            continue;
        }
        reduced.push(r);
    }
    // A row dominated entrywise by another never binds.
    let keep: Vec<Vec<T>> = reduced
        .iter()
        .enumerate()
        .filter(|&(i, r)| {
            !reduced
                .iter()
                .enumerate()
                .any(|(j, o)| j != i && o != r && r.iter().zip(o).all(|(a, b)| a <= b))
        })
        .map(|(_, r)| r.clone())
        .collect();
    let uniform = vec![T::from_fraction(1, s as i64); s];
    if keep.is_empty() {
        return (uniform, T::zero());
    }
    if s == 1 {
        let v = keep.iter().map(|r| r[0].clone()).fold(T::zero(), T::max_of);
        return (vec![T::one()], v);
    }
    let mut lp = LinearProgram::new(s + 1);
    lp.objective[s] = T::one();
    for r in &keep {
        let mut coeffs = r.clone();
        coeffs.push(-T::one());
        lp.add(coeffs, Relation::Le, T::zero());
    }
    let mut ones = vec![T::one(); s];
    ones.push(T::zero());
    lp.add(ones, Relation::Eq, T::one());
    let (x, value) = lp
        .solve()
        .optimal()
        .expect("minimax LP is feasible and bounded");
    (x[..s].to_vec(), value)
}

/// Best one-way strategy with Alice's supports fixed to `supports`.
///
/// The referee is the support incidence matrix, so the error report of the
/// returned strategy equals the returned optimum.
pub fn optimize_supports_one_way<T: Scalar>(
    supports: &SubsetFamily,
) -> Result<(ClassicalStrategy<T>, T)> {
    let n = supports.len();
    let m = supports.m();
    if n == 0 {
        return Err(Error::InvalidInput("no messages".into()));
    }
    let sets = supports.sets();
    let incidence: Vec<Vec<T>> = (0..m)
        .map(|a| {
            sets.iter()
                .map(|&s| if s >> a & 1 == 1 { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    let mut p = Vec::with_capacity(n);
    let mut worst = T::zero();
    for (x, &ix) in sets.iter().enumerate() {
        let support: Vec<usize> = bits(ix).collect();
        let rows: Vec<Vec<T>> = sets
            .iter()
            .enumerate()
            .filter(|&(y, _)| y != x)
            .map(|(_, &iy)| {
                (0..m)
                    .map(|a| {
                        if iy >> a & 1 == 1 {
                            T::one()
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let (px, v) = minimax_row(&support, &rows);
        let mut row = vec![T::zero(); m];
        for (&a, w) in support.iter().zip(px) {
            row[a] = w;
        }
        p.push(row);
        worst = T::max_of(worst, v);
    }
    Ok((ClassicalStrategy::one_way(p, incidence)?, worst))
}

fn support_of<T: Scalar>(row: &[T]) -> Vec<usize> {
    row.iter()
        .enumerate()
        .filter(|(_, v)| v.is_positive_tol())
        .map(|(i, _)| i)
        .collect()
}

/// Alternating minimization for SMP: re-optimizes `p` with `q` fixed, then
/// `q` with `p` fixed, keeping supports and referee. Never increases the
/// worst-case error; stops after `rounds` or when a round gains nothing.
pub fn refine_smp<T: Scalar>(s: &ClassicalStrategy<T>, rounds: usize) -> ClassicalStrategy<T> {
    let mut cur = s.clone();
    let mut best = cur.error_report().worst_case;
    for _ in 0..rounds {
        let mut next = cur.clone();
        next.p = alternate(&next.q, &next.p, &next.r, false);
        next.q = alternate(&next.p, &next.q, &next.r, true);
        let v = next.error_report().worst_case;
        if v < best && !v.approx_eq(&best) {
            best = v;
            cur = next;
        } else {
            if v <= best {
                cur = next;
            }
            break;
        }
    }
    cur
}

/// One half-step: rows of `free` are re-optimized against `fixed`.
fn alternate<T: Scalar>(
    fixed: &[Vec<T>],
    free: &[Vec<T>],
    r: &[Vec<T>],
    transpose: bool,
) -> Vec<Vec<T>> {
    let width = free[0].len();
    // weights[z][c] = Σ_d fixed(d|z) r(c,d), where c indexes the free side.
    let weights: Vec<Vec<T>> = fixed
        .iter()
        .map(|frow| {
            (0..width)
                .map(|c| {
                    frow.iter().enumerate().filter(|(_, f)| !f.is_zero()).fold(
                        T::zero(),
                        |acc, (d, f)| {
                            let rv = if transpose { &r[d][c] } else { &r[c][d] };
                            acc + f.clone() * rv.clone()
                        },
                    )
                })
                .collect()
        })
        .collect();
    free.iter()
        .enumerate()
        .map(|(x, row)| {
            let support = support_of(row);
            let rows: Vec<Vec<T>> = weights
                .iter()
                .enumerate()
                .filter(|&(z, _)| z != x)
                .map(|(_, w)| w.clone())
                .collect();
            let (px, _) = minimax_row(&support, &rows);
            let mut out = vec![T::zero(); width];
            for (&a, w) in support.iter().zip(px) {
                out[a] = w;
            }
            out
        })
        .collect()
}
