//! Dense two-phase simplex over exact rationals, Bland's pivoting rule.
//!
//! Solves `max c·x` subject to `A x = b`, `x >= 0`. Sized for problems with
//! a few dozen variables; every pivot is exact, so there is no tolerance
//! anywhere in here.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub a: Vec<Vec<BigRational>>,
    pub b: Vec<BigRational>,
    pub c: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<BigRational>,
    pub value: BigRational,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &BigRational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(pivot_row.iter()) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    fn reduced_cost(&self, cost: &[BigRational], col: usize) -> BigRational {
        let mut rc = cost[col].clone();
        for (i, &bv) in self.basis.iter().enumerate() {
            if !cost[bv].is_zero() && !self.rows[i][col].is_zero() {
                rc -= &cost[bv] * &self.rows[i][col];
            }
        }
        rc
    }

    /// Maximizes `cost` over columns `0..allowed`.
    fn run(&mut self, cost: &[BigRational], allowed: usize) -> Step {
        loop {
            let entering = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j).is_positive());
            let Some(col) = entering else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return Step::Unbounded,
            }
        }
    }

    fn objective(&self, cost: &[BigRational]) -> BigRational {
        self.basis
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (i, &bv)| {
                acc + &cost[bv] * self.rhs(i)
            })
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let m = lp.a.len();
    let n = lp.c.len();
    if lp.b.len() != m || lp.a.iter().any(|row| row.len() != n) {
        return Err(Error::Lp("constraint matrix shape mismatch".into()));
    }

    // Columns: n originals, m artificials, then the right-hand side.
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in lp.a.iter().zip(lp.b.iter()).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<BigRational> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        r.extend((0..m).map(|k| {
            if k == i {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        }));
        r.push(if flip { -bi.clone() } else { bi.clone() });
        rows.push(r);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        width,
        pivots: 0,
    };

    let phase1: Vec<BigRational> = (0..width)
        .map(|j| {
            if j >= n {
                -BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    t.run(&phase1, width);
    if t.objective(&phase1).is_negative() {
        return Ok(LpOutcome::Infeasible);
    }

    // Pivot remaining artificials out of the basis; rows where that is
    // impossible are redundant and dropped.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] < n {
            i += 1;
            continue;
        }
        match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
            Some(col) => {
                t.pivot(i, col);
                i += 1;
            }
            None => {
                t.rows.remove(i);
                t.basis.remove(i);
            }
        }
    }

    let mut phase2 = lp.c.clone();
    phase2.extend((0..m).map(|_| BigRational::zero()));
    if let Step::Unbounded = t.run(&phase2, n) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![BigRational::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs(i).clone();
        }
    }
    let value = x
        .iter()
        .zip(lp.c.iter())
        .fold(BigRational::zero(), |acc, (xi, ci)| acc + xi * ci);
    Ok(LpOutcome::Optimal(LpSolution {
        x,
        value,
        pivots: t.pivots,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn rows(v: &[&[i64]]) -> Vec<Vec<BigRational>> {
        v.iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect()
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x + s1 = 4, 2y + s2 = 12, 3x + 2y + s3 = 18 -> 36 at (2, 6).
        let lp = LinearProgram {
            a: rows(&[&[1, 0, 1, 0, 0], &[0, 2, 0, 1, 0], &[3, 2, 0, 0, 1]]),
            b: vec![q(4), q(12), q(18)],
            c: vec![q(3), q(5), q(0), q(0), q(0)],
        };
        let LpOutcome::Optimal(s) = solve(&lp).unwrap() else {
            panic!()
        };
        assert_eq!(s.value, q(36));
        assert_eq!(s.x[0], q(2));
        assert_eq!(s.x[1], q(6));
    }

    #[test]
    fn redundant_and_negative_rhs_rows() {
        // x + y = 1 twice, and -x = -1/2 written with a negative rhs.
        let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
        let lp = LinearProgram {
            a: rows(&[&[1, 1], &[1, 1], &[-1, 0]]),
            b: vec![q(1), q(1), half],
            c: vec![q(0), q(1)],
        };
        let LpOutcome::Optimal(s) = solve(&lp).unwrap() else {
            panic!()
        };
        assert_eq!(s.value, BigRational::new(BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram {
            a: rows(&[&[1, 1]]),
            b: vec![q(-1)],
            c: vec![q(1), q(0)],
        };
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Infeasible);
        let lp = LinearProgram {
            a: rows(&[&[1, -1]]),
            b: vec![q(0)],
            c: vec![q(1), q(0)],
        };
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let lp = LinearProgram {
            a: rows(&[&[1, 1]]),
            b: vec![],
            c: vec![q(1), q(0)],
        };
        assert!(solve(&lp).is_err());
    }
}
