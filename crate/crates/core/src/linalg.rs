//! Exact Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

/// Reduces `rows` in place to row echelon form and returns the rank.
pub(crate) fn eliminate(rows: &mut [Vec<Rational>], cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut work = rows.to_vec();
    eliminate(&mut work, cols)
}

/// Solves the square system `a·x = b`; `None` when `a` is singular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut work: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    if eliminate(&mut work, n) < n {
        return None;
    }
    Some(work.into_iter().map(|mut r| r.pop().expect("augmented")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{integer, rational};

    #[test]
    fn rank_and_solve() {
        let a = vec![
            vec![integer(2), integer(1)],
            vec![integer(1), integer(3)],
        ];
        assert_eq!(rank(&a), 2);
        let x = solve(&a, &[integer(3), integer(4)]).unwrap();
        assert_eq!(x, vec![integer(1), integer(1)]);
        let singular = vec![
            vec![integer(1), integer(2)],
            vec![integer(2), integer(4)],
        ];
        assert_eq!(rank(&singular), 1);
        assert!(solve(&singular, &[integer(1), integer(1)]).is_none());
        let x = solve(&[vec![integer(3)]], &[integer(1)]).unwrap();
        assert_eq!(x[0], rational(1, 3));
    }
}
