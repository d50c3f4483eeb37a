//! Dense two-phase simplex with Bland's rule.
//!
//! Problems here have at most a few dozen rows and columns, so a dense
//! tableau is fine. Over an exact [`Scalar`] the optimum is exact; over
//! floats the usual tolerance-based pivoting applies.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// `minimize objective·x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

impl<T: Scalar> LpOutcome<T> {
    pub fn optimal(self) -> Option<(Vec<T>, T)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![T::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> LpOutcome<T> {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    // Objective row; last entry holds minus the current objective value.
    obj: Vec<T>,
    basis: Vec<usize>,
    num_orig: usize,
    first_artificial: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let n = lp.num_vars();
        let m = lp.constraints.len();
        let normalized: Vec<(Vec<T>, Relation, T)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative_tol() {
                    let rel = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (
                        c.coeffs.iter().map(|v| -v.clone()).collect(),
                        rel,
                        -c.rhs.clone(),
                    )
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs.clone())
                }
            })
            .collect();
        let num_slack = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Eq)
            .count();
        let num_art = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Le)
            .count();
        let first_artificial = n + num_slack;
        let width = first_artificial + num_art + 1;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut a) = (n, first_artificial);
        for (coeffs, rel, rhs) in normalized {
            let mut row = vec![T::zero(); width];
            for (dst, v) in row.iter_mut().zip(coeffs) {
                *dst = v;
            }
            row[width - 1] = rhs;
            match rel {
                Relation::Le => {
                    row[s] = T::one();
                    basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -T::one();
                    s += 1;
                    row[a] = T::one();
                    basis.push(a);
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = T::one();
                    basis.push(a);
                    a += 1;
                }
            }
            rows.push(row);
        }
        Tableau {
            rows,
            obj: vec![T::zero(); width],
            basis,
            num_orig: n,
            first_artificial,
        }
    }

    fn width(&self) -> usize {
        self.obj.len()
    }

    fn set_objective(&mut self, cost: &[T]) {
        let w = self.width();
        let mut obj: Vec<T> = (0..w)
            .map(|j| cost.get(j).cloned().unwrap_or_else(T::zero))
            .collect();
        obj[w - 1] = T::zero();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = match cost.get(b) {
                Some(c) if !c.is_zero() => c.clone(),
                _ => continue,
            };
            for (o, v) in obj.iter_mut().zip(row) {
                if !v.is_zero() {
                    *o = o.clone() - cb.clone() * v.clone();
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        if !piv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / piv.clone();
                }
            }
        }
        let prow = self.rows[r].clone();
        let eliminate = |row: &mut Vec<T>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
            // Keep the pivot column clean under floating point.
            row[c] = T::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Runs simplex iterations over columns `< limit`. Returns false if unbounded.
    fn iterate(&mut self, limit: usize) -> bool {
        let rhs = self.width() - 1;
        loop {
            let Some(c) = (0..limit).find(|&j| self.obj[j].is_negative_tol()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive_tol() {
                    continue;
                }
                let ratio = row[rhs].clone() / row[c].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio.approx_eq(br) && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn run(mut self, cost: &[T]) -> LpOutcome<T> {
        let w = self.width();
        let rhs = w - 1;
        if self.first_artificial < rhs {
            let phase1: Vec<T> = (0..w)
                .map(|j| {
                    if j >= self.first_artificial && j < rhs {
                        T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            self.set_objective(&phase1);
            self.iterate(rhs);
            if (-self.obj[rhs].clone()).is_positive_tol() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining artificials out of the basis, dropping redundant rows.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero_tol()) {
                        Some(j) => {
                            self.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            self.rows.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
            let fa = self.first_artificial;
            for row in self.rows.iter_mut() {
                let last = row[rhs].clone();
                row.truncate(fa);
                row.push(last);
            }
            self.obj = vec![T::zero(); fa + 1];
        }
        self.set_objective(cost);
        let limit = self.width() - 1;
        if !self.iterate(limit) {
            return LpOutcome::Unbounded;
        }
        let rhs = self.width() - 1;
        let mut x = vec![T::zero(); self.num_orig];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_orig {
                x[b] = row[rhs].clone();
            }
        }
        let value = -self.obj[rhs].clone();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::Rational;
    use num_traits::Zero;

    fn r(n: i64) -> Rational {
        ratio(n, 1)
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![r(-3), r(-5)];
        lp.add(vec![r(1), r(0)], Relation::Le, r(4));
        lp.add(vec![r(0), r(2)], Relation::Le, r(12));
        lp.add(vec![r(3), r(2)], Relation::Le, r(18));
        let (x, v) = lp.solve().optimal().unwrap();
        assert_eq!(v, r(-36));
        assert_eq!(x, vec![r(2), r(6)]);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y, x + 2y = 3, x ≥ 1/2 → x = 1/2, y = 5/4
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![r(1), r(1)];
        lp.add(vec![r(1), r(2)], Relation::Eq, r(3));
        lp.add(vec![r(1), r(0)], Relation::Ge, ratio(1, 2));
        let (x, v) = lp.solve().optimal().unwrap();
        assert_eq!(x, vec![ratio(1, 2), ratio(5, 4)]);
        assert_eq!(v, ratio(7, 4));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![r(1)];
        lp.add(vec![r(1)], Relation::Le, r(1));
        lp.add(vec![r(1)], Relation::Ge, r(2));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.objective = vec![r(-1)];
        lp.add(vec![r(1)], Relation::Ge, r(0));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![r(1), r(0)];
        lp.add(vec![r(1), r(1)], Relation::Eq, r(1));
        lp.add(vec![r(2), r(2)], Relation::Eq, r(2));
        let (_, v) = lp.solve().optimal().unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule; Bland must finish.
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![ratio(-3, 4), r(150), ratio(-1, 50), r(6)];
        lp.add(
            vec![ratio(1, 4), r(-60), ratio(-1, 25), r(9)],
            Relation::Le,
            r(0),
        );
        lp.add(
            vec![ratio(1, 2), r(-90), ratio(-1, 50), r(3)],
            Relation::Le,
            r(0),
        );
        lp.add(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1));
        let (_, v) = lp.solve().optimal().unwrap();
        assert_eq!(v, ratio(-1, 20));
    }

    #[test]
    fn floats_agree_with_rationals() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add(vec![1.0, 2.0], Relation::Eq, 3.0);
        lp.add(vec![1.0, 0.0], Relation::Ge, 0.5);
        let (_, v) = lp.solve().optimal().unwrap();
        assert!((v - 1.75).abs() < 1e-12);
    }
}
