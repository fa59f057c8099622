//! Worked instances used by the CLI reproduction run and the test suites.

use crate::complex::{shift_closure, SimplicialComplex};
use crate::error::Result;
use crate::order::{order_from_weights, QPOrder};
use crate::rational::{integer, rational, Rational};
use crate::subset::Subset;
use crate::ternary::{characteristic_vector, TernaryVector};
use crate::transform::TradingTransform;

fn set(n: usize, atoms: &[u64]) -> Subset {
    Subset::from_atoms(n, atoms.iter().copied()).expect("atoms in range")
}

/// Weights `(7, 10, 16, 20, 22)`, whose order begins `∅ ≺ 1 ≺ 2 ≺ 3 ≺ 12 ≺ 4`.
pub fn five_atom_weights() -> Vec<Rational> {
    [7, 10, 16, 20, 22].iter().map(|&w| integer(w)).collect()
}

/// The order of [`five_atom_weights`] with `{1,2}` and `{4}` exchanged,
/// together with every translate `{1,2} ∪ C`, `{4} ∪ C` for `C ⊆ {3, 5}`,
/// so that the result still satisfies the order axioms.
pub fn swapped_five_atom_order() -> Result<QPOrder> {
    let mut order = order_from_weights(&five_atom_weights())?;
    for extra in [&[][..], &[3], &[5], &[3, 5]] {
        let mut a = vec![1, 2];
        let mut b = vec![4];
        a.extend_from_slice(extra);
        b.extend_from_slice(extra);
        order = order.swap(&set(5, &a), &set(5, &b))?;
    }
    Ok(order)
}

/// The measure `(6, 4, 3, 2, 1)/16`.
pub fn tied_five_atom_weights() -> Vec<Rational> {
    [6, 4, 3, 2, 1].iter().map(|&w| rational(w, 16)).collect()
}

/// The four ties `35 ∼ 2`, `25 ∼ 34`, `23 ∼ 15`, `14 ∼ 235` of
/// [`tied_five_atom_weights`].
pub fn tied_five_atom_pairs() -> Vec<(Subset, Subset)> {
    vec![
        (set(5, &[3, 5]), set(5, &[2])),
        (set(5, &[2, 5]), set(5, &[3, 4])),
        (set(5, &[2, 3]), set(5, &[1, 5])),
        (set(5, &[1, 4]), set(5, &[2, 3, 5])),
    ]
}

/// `u_1 = χ(2,35)`, `u_2 = χ(34,25)`, `u_3 = χ(15,23)`, `u_4 = χ(235,14)`.
pub fn tied_five_atom_vectors() -> Vec<TernaryVector> {
    [([2u64].as_slice(), [3u64, 5].as_slice()), (&[3, 4], &[2, 5]), (&[1, 5], &[2, 3]), (&[2, 3, 5], &[1, 4])]
        .iter()
        .map(|(a, b)| characteristic_vector(&set(5, a), &set(5, b)).expect("same n"))
        .collect()
}

/// Lo Shu magic square weights on the cells of a 3×3 grid numbered row by
/// row: every row and every column weighs 15.
pub fn magic_square_weights() -> Vec<Rational> {
    [2, 7, 6, 9, 5, 1, 4, 3, 8].iter().map(|&w| integer(w)).collect()
}

/// The grid's rows `123, 456, 789` and columns `147, 258, 369`.
pub fn magic_square_lines() -> (Vec<Subset>, Vec<Subset>) {
    let rows = vec![set(9, &[1, 2, 3]), set(9, &[4, 5, 6]), set(9, &[7, 8, 9])];
    let cols = vec![set(9, &[1, 4, 7]), set(9, &[2, 5, 8]), set(9, &[3, 6, 9])];
    (rows, cols)
}

/// `x_1 = χ(123,147)`, `x_2 = χ(456,258)`, `x_3 = χ(789,369)`; they sum
/// to zero and `x_1 ⊕ x_2 = −x_3`.
pub fn magic_square_vectors() -> Vec<TernaryVector> {
    let (rows, cols) = magic_square_lines();
    rows.iter()
        .zip(&cols)
        .map(|(r, c)| characteristic_vector(r, c).expect("same n"))
        .collect()
}

/// The complex on the grid with faces the sets lighter than a line
/// (weight below 15) together with all subsets of the columns: the order's
/// tie between rows and columns is broken in favour of the columns.
pub fn magic_square_complex() -> Result<SimplicialComplex> {
    let weights = [2u32, 7, 6, 9, 5, 1, 4, 3, 8];
    let (_, cols) = magic_square_lines();
    SimplicialComplex::from_predicate(9, |x| {
        let w: u32 = x.atoms().map(|a| weights[a - 1]).sum();
        w < 15 || cols.iter().any(|c| x.is_subset_of(c))
    })
}

/// Generators `{1,5,7}` and `{2,3,4,6}` on seven atoms.
pub fn shift_example_generators() -> Vec<Subset> {
    vec![set(7, &[1, 5, 7]), set(7, &[2, 3, 4, 6])]
}

/// The smallest complex containing [`shift_example_generators`] that is
/// shifted with respect to `1, 2, …, 7`.
pub fn shift_example_complex() -> Result<SimplicialComplex> {
    shift_closure(7, &shift_example_generators(), &[1, 2, 3, 4, 5, 6, 7])
}

/// `({1,5,7}, {2,3,4,6}; {3,4,7}, {1,2,5,6})`, a `CC_2*` violation of
/// [`shift_example_complex`].
pub fn shift_example_transform() -> TradingTransform {
    TradingTransform::new(
        shift_example_generators(),
        vec![set(7, &[3, 4, 7]), set(7, &[1, 2, 5, 6])],
    )
    .expect("balanced")
}
