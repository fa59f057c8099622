//! Test-side oracles. Nothing here calls the library's search, LP or
//! linear-algebra code; they work from first principles on bitmasks and
//! rationals so that agreement with the library means something.

#![allow(dead_code)]

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use qpcone::{Rational, SimplicialComplex, Subset};
use rand::Rng;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

pub fn set(n: usize, atoms: &[u64]) -> Subset {
    Subset::from_atoms(n, atoms.iter().copied()).unwrap()
}

/// Every downward-closed family of subsets of `[n]` (including the empty
/// family), by brute force over all families. Only for `n ≤ 4`.
pub fn all_downsets(n: usize) -> Vec<Vec<bool>> {
    assert!(n <= 4);
    let m = 1usize << n;
    let mut out = Vec::new();
    for fam in 0u64..(1u64 << m) {
        let member = |s: usize| fam >> s & 1 == 1;
        let closed = (0..m).all(|s| !member(s) || (0..n).all(|i| s >> i & 1 == 0 || member(s & !(1 << i))));
        if closed {
            out.push((0..m).map(member).collect());
        }
    }
    out
}

pub fn complex_from_members(n: usize, members: &[bool]) -> SimplicialComplex {
    SimplicialComplex::from_predicate(n, |s| members[s.bits() as usize]).unwrap()
}

/// A random downward-closed family: the closure of a few random sets.
pub fn random_complex(rng: &mut impl Rng, n: usize) -> SimplicialComplex {
    let gens: Vec<Subset> =
        (0..rng.gen_range(1..=4)).map(|_| Subset::new(n, rng.gen_range(0..1u64 << n)).unwrap()).collect();
    SimplicialComplex::from_generators(n, &gens).unwrap()
}

pub fn random_weights(rng: &mut impl Rng, n: usize, max: i64) -> Vec<Rational> {
    (0..n).map(|_| int(rng.gen_range(1..=max))).collect()
}

pub fn weight_of(weights: &[Rational], bits: u64) -> Rational {
    weights.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).fold(Rational::zero(), |a, (_, w)| a + w)
}

/// Per-atom counts of a multiset of sets, three bits per atom (k ≤ 7).
fn packed_counts(sets: &[u64], n: usize) -> u64 {
    let mut packed = 0u64;
    for &s in sets {
        for i in 0..n {
            if s >> i & 1 == 1 {
                packed += 1 << (3 * i);
            }
        }
    }
    packed
}

fn multisets(items: &[u64], k: usize, start: usize, cur: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..items.len() {
        cur.push(items[i]);
        multisets(items, k, i, cur, f);
        cur.pop();
    }
}

/// Exhaustive CC_k* check: is there a multiset of `k` faces and a multiset
/// of `k` non-faces with identical atom counts? Returns one such pair.
pub fn brute_cck_star(complex: &SimplicialComplex, k: usize) -> Option<(Vec<u64>, Vec<u64>)> {
    let n = complex.n();
    assert!(n <= 21 && k <= 7);
    let faces: Vec<u64> = (0..1u64 << n).filter(|&b| complex.contains(&Subset::new(n, b).unwrap())).collect();
    let nonfaces: Vec<u64> = (0..1u64 << n).filter(|&b| !complex.contains(&Subset::new(n, b).unwrap())).collect();
    let mut sums = std::collections::HashMap::new();
    multisets(&faces, k, 0, &mut Vec::new(), &mut |m| {
        sums.entry(packed_counts(m, n)).or_insert_with(|| m.to_vec());
    });
    let mut found = None;
    multisets(&nonfaces, k, 0, &mut Vec::new(), &mut |m| {
        if found.is_none() {
            if let Some(left) = sums.get(&packed_counts(m, n)) {
                found = Some((left.clone(), m.to_vec()));
            }
        }
    });
    found
}

/// Independent check that `left`/`right` is a CC* violation of `complex`.
pub fn is_star_violation(complex: &SimplicialComplex, left: &[Subset], right: &[Subset]) -> bool {
    let n = complex.n();
    let l: Vec<u64> = left.iter().map(Subset::bits).collect();
    let r: Vec<u64> = right.iter().map(Subset::bits).collect();
    l.len() == r.len()
        && packed_counts(&l, n) == packed_counts(&r, n)
        && left.iter().all(|a| complex.contains(a))
        && right.iter().all(|b| !complex.contains(b))
}

/// Exact re-substitution of a threshold certificate over all subsets.
pub fn threshold_weights_work(complex: &SimplicialComplex, weights: &[Rational], threshold: &Rational) -> bool {
    let n = complex.n();
    weights.len() == n
        && weights.iter().all(|w| !w.is_negative())
        && (0..1u64 << n).all(|b| complex.contains(&Subset::new(n, b).unwrap()) == (weight_of(weights, b) < *threshold))
}

/// Dense rational matrix solve by Gauss-Jordan elimination. Returns `None`
/// for singular systems.
pub fn gauss_solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / a[col][col].clone();
        for j in col..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..n {
                    let v = &f * &a[col][j];
                    a[r][j] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some(b)
}

/// A small LP in the form: maximize `c·x` subject to `rows[i]·x (rel) rhs[i]`
/// and `x ≥ 0`, where the constraint set is bounded.
#[derive(Clone, Debug)]
pub struct SmallLp {
    pub c: Vec<Rational>,
    /// `(coefficients, relation, rhs)` with relation -1 for ≤, 0 for =, 1 for ≥.
    pub rows: Vec<(Vec<Rational>, i8, Rational)>,
}

impl SmallLp {
    pub fn feasible(&self, x: &[Rational]) -> bool {
        x.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|(a, rel, rhs)| {
                let lhs = a.iter().zip(x).fold(Rational::zero(), |s, (p, q)| s + p * q);
                match rel {
                    -1 => lhs <= *rhs,
                    0 => lhs == *rhs,
                    _ => lhs >= *rhs,
                }
            })
    }

    /// Optimal value by enumerating every basic solution: each choice of
    /// `d` tight constraints among the rows and the bounds `x_i = 0`.
    /// `None` means infeasible. The feasible region must be bounded.
    pub fn vertex_optimum(&self) -> Option<Rational> {
        let d = self.c.len();
        let mut hyperplanes: Vec<(Vec<Rational>, Rational)> =
            self.rows.iter().map(|(a, _, rhs)| (a.clone(), rhs.clone())).collect();
        for i in 0..d {
            let mut e = vec![Rational::zero(); d];
            e[i] = Rational::one();
            hyperplanes.push((e, Rational::zero()));
        }
        let mut best: Option<Rational> = None;
        let mut pick = Vec::new();
        choose(hyperplanes.len(), d, 0, &mut pick, &mut |idx| {
            let a = idx.iter().map(|&i| hyperplanes[i].0.clone()).collect();
            let b = idx.iter().map(|&i| hyperplanes[i].1.clone()).collect();
            if let Some(x) = gauss_solve(a, b) {
                if self.feasible(&x) {
                    let v = self.c.iter().zip(&x).fold(Rational::zero(), |s, (p, q)| s + p * q);
                    if best.as_ref().is_none_or(|b| v > *b) {
                        best = Some(v);
                    }
                }
            }
        });
        best
    }
}

fn choose(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..m {
        cur.push(i);
        choose(m, k, i + 1, cur, f);
        cur.pop();
    }
}

/// Random bounded LP: small integer data plus the box `x_i ≤ bound`.
pub fn random_lp(rng: &mut impl Rng) -> SmallLp {
    let d = rng.gen_range(1..=3);
    let mut rows = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let a = (0..d).map(|_| int(rng.gen_range(-3..=3))).collect();
        let rel = [-1i8, -1, 0, 1][rng.gen_range(0..4)];
        rows.push((a, rel, int(rng.gen_range(-4..=6))));
    }
    for i in 0..d {
        let mut e = vec![int(0); d];
        e[i] = int(1);
        rows.push((e, -1, int(rng.gen_range(1..=5))));
    }
    let c = (0..d).map(|_| int(rng.gen_range(-3..=3))).collect();
    SmallLp { c, rows }
}

/// Set of bit patterns, for duplicate checks.
pub fn distinct(sets: &[Subset]) -> bool {
    sets.iter().map(Subset::bits).collect::<HashSet<_>>().len() == sets.len()
}

/// `A ≺_W B` straight from the definition: some `Z` disjoint from `A ∪ B`'s
/// symmetric difference has `(A∖B) ∪ Z` a face and `(B∖A) ∪ Z` not.
pub fn brute_winder_prec(complex: &SimplicialComplex, a: u64, b: u64) -> bool {
    let n = complex.n();
    let p = a & !b;
    let q = b & !a;
    let free = ((1u64 << n) - 1) & !(p | q);
    let member = |s: u64| complex.contains(&Subset::new(n, s).unwrap());
    let mut z = 0u64;
    loop {
        if member(p | z) && !member(q | z) {
            return true;
        }
        if z == free {
            return false;
        }
        z = (z.wrapping_sub(free)) & free;
    }
}

/// Whether the `≺_W` digraph on `2^[n]` has a directed cycle, by
/// depth-first search with colors.
pub fn brute_winder_has_cycle(complex: &SimplicialComplex) -> bool {
    let size = 1usize << complex.n();
    let adj: Vec<Vec<usize>> = (0..size)
        .map(|a| (0..size).filter(|&b| brute_winder_prec(complex, a as u64, b as u64)).collect())
        .collect();
    // 0 = unvisited, 1 = on stack, 2 = done.
    let mut color = vec![0u8; size];
    for root in 0..size {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    false
}
