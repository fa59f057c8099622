//! Exact two-phase simplex over the rationals.
//!
//! Variables are nonnegative and the objective is maximised. Pivoting uses
//! the smallest-index rule for both the entering and the leaving variable,
//! which rules out cycling.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::rational::{serde_rational, serde_rational_vec, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    #[serde(with = "serde_rational_vec")]
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, point);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// Maximise `objective · x` subject to `constraints` and `x ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearProgram {
    pub variables: usize,
    #[serde(with = "serde_rational_vec")]
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    /// `duals` holds one multiplier per constraint: `≥ 0` for `≤` rows,
    /// `≤ 0` for `≥` rows, free for equalities, with `Aᵀy ≥ c` and
    /// `b·y = value`.
    Optimal { value: Rational, point: Vec<Rational>, duals: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(variables: usize, objective: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), variables);
        LinearProgram { variables, objective, constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.variables, "constraint width");
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    pub fn is_feasible_point(&self, point: &[Rational]) -> bool {
        point.len() == self.variables
            && point.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied_by(point))
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

struct Tableau {
    /// `rows[i]` holds the coefficients of every column followed by the rhs.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs followed by the objective value.
    obj: Vec<Rational>,
    cols: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for v in self.rows[row].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[row].clone();
        let nonzero: Vec<usize> = (0..=self.cols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (r, target) in self.rows.iter_mut().enumerate() {
            if r == row || target[col].is_zero() {
                continue;
            }
            let factor = target[col].clone();
            for &j in &nonzero {
                target[j] -= &factor * &pivot_row[j];
            }
        }
        if !self.obj[col].is_zero() {
            let factor = self.obj[col].clone();
            for &j in &nonzero {
                self.obj[j] -= &factor * &pivot_row[j];
            }
        }
        self.basis[row] = col;
    }

    /// Sets reduced costs for maximising `cost · x`.
    fn price(&mut self, cost: &[Rational]) {
        let mut obj: Vec<Rational> = (0..=self.cols)
            .map(|j| if j < self.cols { -cost[j].clone() } else { Rational::zero() })
            .collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if cost[b].is_zero() {
                continue;
            }
            for j in 0..=self.cols {
                if !row[j].is_zero() {
                    obj[j] += &cost[b] * &row[j];
                }
            }
        }
        self.obj = obj;
    }

    fn run(&mut self, allowed: usize) -> Phase {
        loop {
            let Some(col) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[col];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                None => return Phase::Unbounded,
                Some((r, _)) => self.pivot(r, col),
            }
        }
    }
}

pub fn lp_solve(lp: &LinearProgram) -> LpOutcome {
    let n = lp.variables;
    let m = lp.constraints.len();
    let slack_count = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let mut artificial_count = 0;
    for c in &lp.constraints {
        let flipped = c.rhs.is_negative();
        let rel = effective_relation(c.relation, flipped);
        if rel != Relation::Le {
            artificial_count += 1;
        }
    }
    let art_start = n + slack_count;
    let cols = art_start + artificial_count;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    // Per constraint: the column holding its unit vector, and whether the
    // row was negated to make the rhs nonnegative.
    let mut unit_col = Vec::with_capacity(m);
    let mut negated = Vec::with_capacity(m);
    let (mut slack, mut art) = (n, art_start);
    for c in &lp.constraints {
        let flipped = c.rhs.is_negative();
        let sign = if flipped { -Rational::from_integer(BigInt::from(1)) } else { Rational::from_integer(BigInt::from(1)) };
        let mut row = vec![Rational::zero(); cols + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = a * &sign;
        }
        row[cols] = &c.rhs * &sign;
        negated.push(flipped);
        match effective_relation(c.relation, flipped) {
            Relation::Le => {
                row[slack] = Rational::from_integer(BigInt::from(1));
                basis.push(slack);
                unit_col.push(Some(slack));
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = Rational::from_integer(BigInt::from(-1));
                slack += 1;
                row[art] = Rational::from_integer(BigInt::from(1));
                basis.push(art);
                unit_col.push(Some(art));
                art += 1;
            }
            Relation::Eq => {
                row[art] = Rational::from_integer(BigInt::from(1));
                basis.push(art);
                unit_col.push(Some(art));
                art += 1;
            }
        }
        rows.push(row);
    }

    let mut t = Tableau { rows, basis, obj: Vec::new(), cols };

    if artificial_count > 0 {
        let mut cost = vec![Rational::zero(); cols];
        for c in cost.iter_mut().skip(art_start) {
            *c = Rational::from_integer(BigInt::from(-1));
        }
        t.price(&cost);
        t.run(cols);
        if t.obj[cols].is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        // A dropped row gets multiplier zero and its unit column no longer
        // reads off a multiplier.
        let mut origin: Vec<usize> = (0..m).collect();
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= art_start {
                match (0..art_start).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(j) => {
                        t.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        unit_col[origin[r]] = None;
                        t.rows.remove(r);
                        t.basis.remove(r);
                        origin.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    let mut cost = vec![Rational::zero(); cols];
    cost[..n].clone_from_slice(&lp.objective);
    t.price(&cost);
    match t.run(art_start) {
        Phase::Unbounded => LpOutcome::Unbounded,
        Phase::Optimal => {
            let mut point = vec![Rational::zero(); n];
            for (row, &b) in t.rows.iter().zip(&t.basis) {
                if b < n {
                    point[b] = row[cols].clone();
                }
            }
            let value = dot(&lp.objective, &point);
            debug_assert!(lp.is_feasible_point(&point));
            debug_assert_eq!(value, t.obj[cols]);
            let duals = unit_col
                .iter()
                .zip(&negated)
                .map(|(col, &neg)| match col {
                    Some(j) if neg => -t.obj[*j].clone(),
                    Some(j) => t.obj[*j].clone(),
                    None => Rational::zero(),
                })
                .collect();
            LpOutcome::Optimal { value, point, duals }
        }
    }
}

fn effective_relation(rel: Relation, flipped: bool) -> Relation {
    match (rel, flipped) {
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (r, _) => r,
    }
}
