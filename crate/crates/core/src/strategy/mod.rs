//! Classical strategies `(p, q, r)` and their error probabilities.
//!
//! `p` is `n × m_a` (Alice's fingerprint distribution per message), `q` is
//! `n × m_b` (Bob's) and `r` is `m_a × m_b`, Roger's probability of answering
//! "equal". Messages and fingerprints are 0-based in the API.

mod brute;
mod optimize;

pub use brute::{brute_force_min_wce, MinWce, Model};
pub use optimize::{minimax_row, optimize_supports_one_way, refine_smp};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::family::SubsetFamily;
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalStrategy<T = Rational> {
    n: usize,
    m_a: usize,
    m_b: usize,
    p: Vec<Vec<T>>,
    q: Vec<Vec<T>>,
    r: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport<T = Rational> {
    pub worst_case: T,
    pub average: T,
    /// Lexicographically smallest `(x, y)` attaining `worst_case`.
    pub witness: (usize, usize),
    pub one_sided: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPair {
    pub supports_p: SubsetFamily,
    pub supports_q: SubsetFamily,
}

fn check_stochastic<T: Scalar>(name: &str, rows: &[Vec<T>], width: usize) -> Result<()> {
    for (x, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::MalformedStrategy(format!(
                "{name} row {x} has {} entries, expected {width}",
                row.len()
            )));
        }
        if row
            .iter()
            .any(|v| v.is_negative_tol() || (v.clone() - T::one()).is_positive_tol())
        {
            return Err(Error::MalformedStrategy(format!(
                "{name} row {x} has an entry outside [0,1]"
            )));
        }
        let sum = row.iter().fold(T::zero(), |acc, v| acc + v.clone());
        if !sum.approx_eq(&T::one()) {
            return Err(Error::MalformedStrategy(format!(
                "{name} row {x} sums to {sum}, not 1"
            )));
        }
    }
    Ok(())
}

fn identity<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

impl<T: Scalar> ClassicalStrategy<T> {
    pub fn new(p: Vec<Vec<T>>, q: Vec<Vec<T>>, r: Vec<Vec<T>>) -> Result<Self> {
        let n = p.len();
        if n == 0 || q.len() != n {
            return Err(Error::MalformedStrategy(format!(
                "p has {} rows and q has {} rows",
                p.len(),
                q.len()
            )));
        }
        let m_a = p[0].len();
        let m_b = q[0].len();
        if m_a == 0 || m_b == 0 {
            return Err(Error::MalformedStrategy("no fingerprints".into()));
        }
        check_stochastic("p", &p, m_a)?;
        check_stochastic("q", &q, m_b)?;
        if r.len() != m_a || r.iter().any(|row| row.len() != m_b) {
            return Err(Error::MalformedStrategy(format!("r must be {m_a}x{m_b}")));
        }
        if r.iter()
            .flatten()
            .any(|v| v.is_negative_tol() || (v.clone() - T::one()).is_positive_tol())
        {
            return Err(Error::MalformedStrategy(
                "r has an entry outside [0,1]".into(),
            ));
        }
        Ok(Self {
            n,
            m_a,
            m_b,
            p,
            q,
            r,
        })
    }

    /// One-way strategy: Bob relays his message, so `q` is the identity and
    /// `r` is `m_a × n`.
    pub fn one_way(p: Vec<Vec<T>>, r: Vec<Vec<T>>) -> Result<Self> {
        let n = p.len();
        Self::new(p, identity(n), r)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            m_a: n,
            m_b: n,
            p: identity(n),
            q: identity(n),
            r: identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_a(&self) -> usize {
        self.m_a
    }

    pub fn m_b(&self) -> usize {
        self.m_b
    }

    pub fn p(&self) -> &[Vec<T>] {
        &self.p
    }

    pub fn q(&self) -> &[Vec<T>] {
        &self.q
    }

    pub fn r(&self) -> &[Vec<T>] {
        &self.r
    }

    /// `q` is the identity on `n` fingerprints.
    pub fn is_one_way(&self) -> bool {
        self.m_b == self.n
            && self.q.iter().enumerate().all(|(y, row)| {
                row.iter()
                    .enumerate()
                    .all(|(b, v)| if b == y { v.is_one() } else { v.is_zero() })
            })
    }

    pub fn is_binary(&self) -> bool {
        self.r.iter().flatten().all(|v| v.is_zero() || v.is_one())
    }

    /// Probability that Roger answers "equal" on messages `(x, y)`.
    pub fn evaluate_p1(&self, x: usize, y: usize) -> Result<T> {
        for i in [x, y] {
            if i >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.n,
                });
            }
        }
        Ok(self.p1_unchecked(x, y))
    }

    fn p1_unchecked(&self, x: usize, y: usize) -> T {
        let mut total = T::zero();
        for (pa, r_row) in self.p[x].iter().zip(&self.r) {
            if pa.is_zero() {
                continue;
            }
            let mut inner = T::zero();
            for (qb, rab) in self.q[y].iter().zip(r_row) {
                if !qb.is_zero() && !rab.is_zero() {
                    inner = inner + qb.clone() * rab.clone();
                }
            }
            total = total + pa.clone() * inner;
        }
        total
    }

    /// `1 - P1(x,x)` on the diagonal, `P1(x,y)` off it.
    pub fn error_probability(&self, x: usize, y: usize) -> Result<T> {
        let p1 = self.evaluate_p1(x, y)?;
        Ok(if x == y { T::one() - p1 } else { p1 })
    }

    /// `P1` for every pair, using `w[a][y] = Σ_b r(a,b) q(b|y)`.
    pub fn p1_matrix(&self) -> Vec<Vec<T>> {
        let w: Vec<Vec<T>> = self
            .r
            .iter()
            .map(|r_row| {
                self.q
                    .iter()
                    .map(|q_row| {
                        q_row
                            .iter()
                            .zip(r_row)
                            .filter(|(qb, rab)| !qb.is_zero() && !rab.is_zero())
                            .fold(T::zero(), |acc, (qb, rab)| acc + qb.clone() * rab.clone())
                    })
                    .collect()
            })
            .collect();
        self.p
            .iter()
            .map(|p_row| {
                (0..self.n)
                    .map(|y| {
                        p_row
                            .iter()
                            .zip(&w)
                            .filter(|(pa, wa)| !pa.is_zero() && !wa[y].is_zero())
                            .fold(T::zero(), |acc, (pa, wa)| acc + pa.clone() * wa[y].clone())
                    })
                    .collect()
            })
            .collect()
    }

    pub fn error_report(&self) -> ErrorReport<T> {
        let p1 = self.p1_matrix();
        let mut worst = T::zero();
        let mut witness = (0, 0);
        let mut total = T::zero();
        let mut one_sided = true;
        let mut first = true;
        for (x, row) in p1.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                let e = if x == y {
                    if !v.is_one() && !(v.approx_eq(&T::one()) && !T::is_exact()) {
                        one_sided = false;
                    }
                    T::one() - v.clone()
                } else {
                    v.clone()
                };
                if first || e > worst {
                    worst = e.clone();
                    witness = (x, y);
                    first = false;
                }
                total = total + e;
            }
        }
        let nn = T::from_usize(self.n * self.n).expect("n^2 fits the scalar");
        ErrorReport {
            worst_case: worst,
            average: total / nn,
            witness,
            one_sided,
        }
    }

    pub fn supports(&self) -> Result<SupportPair> {
        Ok(SupportPair {
            supports_p: support_family(&self.p)?,
            supports_q: support_family(&self.q)?,
        })
    }

    /// Same `p`, `q` with a different referee matrix.
    pub fn with_r(&self, r: Vec<Vec<T>>) -> Result<Self> {
        Self::new(self.p.clone(), self.q.clone(), r)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> ClassicalStrategy<U> {
        let conv = |m: &Vec<Vec<T>>| m.iter().map(|row| row.iter().map(&f).collect()).collect();
        ClassicalStrategy {
            n: self.n,
            m_a: self.m_a,
            m_b: self.m_b,
            p: conv(&self.p),
            q: conv(&self.q),
            r: conv(&self.r),
        }
    }
}

fn support_family<T: Scalar>(rows: &[Vec<T>]) -> Result<SubsetFamily> {
    let width = rows.first().map_or(0, Vec::len);
    let sets: Vec<Vec<usize>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| v.is_positive_tol())
                .map(|(a, _)| a)
                .collect()
        })
        .collect();
    SubsetFamily::from_elements(width, &sets)
}

/// Referee matrix forced by the one-sided constraint: `r(a,b) = 1` iff some
/// message uses both `a` and `b` with positive probability.
pub fn binary_completion<T: Scalar>(
    p: Vec<Vec<T>>,
    q: Vec<Vec<T>>,
) -> Result<ClassicalStrategy<T>> {
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::MalformedStrategy(
            "p and q need the same positive number of rows".into(),
        ));
    }
    let m_a = p[0].len();
    let m_b = q[0].len();
    check_stochastic("p", &p, m_a)?;
    check_stochastic("q", &q, m_b)?;
    let mut r = vec![vec![T::zero(); m_b]; m_a];
    for (prow, qrow) in p.iter().zip(&q) {
        for (a, pa) in prow.iter().enumerate() {
            if !pa.is_positive_tol() {
                continue;
            }
            for (b, qb) in qrow.iter().enumerate() {
                if qb.is_positive_tol() {
                    r[a][b] = T::one();
                }
            }
        }
    }
    ClassicalStrategy::new(p, q, r)
}

/// Uniform strategy on a support pair with the binary referee.
pub fn uniform_on_supports<T: Scalar>(
    fp: &SubsetFamily,
    fq: &SubsetFamily,
) -> Result<ClassicalStrategy<T>> {
    if fp.len() != fq.len() {
        return Err(Error::InvalidInput(format!(
            "support families have {} and {} members",
            fp.len(),
            fq.len()
        )));
    }
    binary_completion(uniform_rows(fp), uniform_rows(fq))
}

pub(crate) fn uniform_rows<T: Scalar>(f: &SubsetFamily) -> Vec<Vec<T>> {
    f.sets()
        .iter()
        .map(|&s| {
            let w = T::from_fraction(1, s.count_ones() as i64);
            (0..f.m())
                .map(|a| {
                    if s >> a & 1 == 1 {
                        w.clone()
                    } else {
                        T::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Minimum average error over one-sided strategies.
pub fn optimal_average_error(n: usize, m_a: usize, m_b: usize) -> Result<Rational> {
    if n == 0 || m_a == 0 || m_b == 0 {
        return Err(Error::InvalidInput(
            "n, m_a and m_b must be positive".into(),
        ));
    }
    let m = m_a.min(m_b) as i64;
    let n = n as i64;
    let (fl, k) = n.div_rem(&m);
    let ce = if k == 0 { fl } else { fl + 1 };
    let num = k * ce * ce + (m - k) * fl * fl - n;
    Ok(Rational::new(num.into(), (n * n).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn antichain46() -> ClassicalStrategy {
        let f = SubsetFamily::k_subsets(4, 2);
        let p: Vec<Vec<Rational>> = uniform_rows(&f);
        binary_completion(p, identity(6)).unwrap()
    }

    #[test]
    fn identity_is_perfect() {
        let s = ClassicalStrategy::<Rational>::identity(4);
        assert_eq!(s.evaluate_p1(2, 2).unwrap(), ratio(1, 1));
        assert_eq!(s.evaluate_p1(2, 3).unwrap(), ratio(0, 1));
        let rep = s.error_report();
        assert_eq!(rep.worst_case, ratio(0, 1));
        assert_eq!(rep.average, ratio(0, 1));
        assert!(rep.one_sided);
        assert!(s.is_one_way());
    }

    #[test]
    fn antichain_strategy_values() {
        let s = antichain46();
        // Messages {1,2} = 0, {1,3} = 1, {3,4} = 5 in colex order: {1,2},{1,3},{2,3},{1,4},{2,4},{3,4}.
        assert_eq!(s.evaluate_p1(0, 1).unwrap(), ratio(1, 2));
        assert_eq!(s.evaluate_p1(0, 5).unwrap(), ratio(0, 1));
        let rep = s.error_report();
        assert_eq!(rep.worst_case, ratio(1, 2));
        assert_eq!(rep.witness, (0, 1));
        assert!(rep.one_sided);
    }

    #[test]
    fn out_of_range_and_malformed() {
        let s = antichain46();
        assert!(matches!(
            s.evaluate_p1(6, 0),
            Err(Error::IndexOutOfRange { index: 6, len: 6 })
        ));
        let bad = ClassicalStrategy::one_way(
            vec![vec![ratio(1, 2), ratio(1, 3)]],
            vec![vec![ratio(1, 1)], vec![ratio(1, 1)]],
        );
        assert!(matches!(bad, Err(Error::MalformedStrategy(_))));
    }

    #[test]
    fn single_message_has_zero_error() {
        let s =
            ClassicalStrategy::one_way(vec![vec![ratio(1, 1)]], vec![vec![ratio(1, 1)]]).unwrap();
        let rep = s.error_report();
        assert_eq!(rep.worst_case, ratio(0, 1));
        assert_eq!(rep.witness, (0, 0));
    }

    #[test]
    fn completion_of_identity_is_identity() {
        let s = binary_completion::<Rational>(identity(3), identity(3)).unwrap();
        assert_eq!(s.r(), identity::<Rational>(3).as_slice());
    }

    #[test]
    fn average_error_formula() {
        assert_eq!(optimal_average_error(4, 4, 4).unwrap(), ratio(0, 1));
        assert_eq!(optimal_average_error(4, 2, 2).unwrap(), ratio(1, 4));
        assert_eq!(optimal_average_error(5, 2, 3).unwrap(), ratio(8, 25));
    }

    #[test]
    fn float_strategies_evaluate() {
        let s: ClassicalStrategy<f64> = antichain46().map(crate::Scalar::to_f64);
        let rep = s.error_report();
        assert!((rep.worst_case - 0.5).abs() < 1e-12);
        assert!(rep.one_sided);
    }
}
