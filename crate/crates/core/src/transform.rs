//! Trading transforms and compatible pairs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::subset::{same_n, Subset};
use crate::ternary::{characteristic_vector, TernaryVector};

/// Two equal-length lists `(A_1, …, A_k; B_1, …, B_k)` of subsets in which
/// every atom occurs equally often on both sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TradingTransform {
    left: Vec<Subset>,
    right: Vec<Subset>,
}

impl TradingTransform {
    pub fn new(left: Vec<Subset>, right: Vec<Subset>) -> Result<Self> {
        if !is_trading_transform(&left, &right)? {
            return Err(Error::Precondition(
                "atom multiplicities differ between the two sides".into(),
            ));
        }
        Ok(TradingTransform { left, right })
    }

    pub fn left(&self) -> &[Subset] {
        &self.left
    }

    pub fn right(&self) -> &[Subset] {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn n(&self) -> Option<usize> {
        self.left.first().map(Subset::n)
    }

    /// The pairs `(A_i, B_i)`.
    pub fn pairs(&self) -> impl Iterator<Item = (Subset, Subset)> + '_ {
        self.left.iter().copied().zip(self.right.iter().copied())
    }
}

fn common_n(sets: &[Subset]) -> Result<Option<usize>> {
    let mut iter = sets.iter();
    let Some(first) = iter.next() else { return Ok(None) };
    for s in iter {
        same_n(first, s)?;
    }
    Ok(Some(first.n()))
}

/// True iff every atom lies in as many left sets as right sets.
pub fn is_trading_transform(left: &[Subset], right: &[Subset]) -> Result<bool> {
    if left.len() != right.len() {
        return Err(Error::Shape(format!(
            "left side has {} sets, right side has {}",
            left.len(),
            right.len()
        )));
    }
    let ln = common_n(left)?;
    let rn = common_n(right)?;
    if let (Some(a), Some(b)) = (ln, rn) {
        if a != b {
            return Err(Error::DimensionMismatch { left: a, right: b });
        }
    }
    let Some(n) = ln else { return Ok(true) };
    let mut balance = vec![0i64; n];
    for (a, b) in left.iter().zip(right) {
        let x = characteristic_vector(a, b)?;
        for (i, slot) in balance.iter_mut().enumerate() {
            *slot += i64::from(x.get(i + 1));
        }
    }
    Ok(balance.iter().all(|&c| c == 0))
}

/// `Σ_j χ(A_j, B_j)` as an integer vector.
pub fn column_balance(left: &[Subset], right: &[Subset]) -> Vec<i64> {
    let n = left.first().map(Subset::n).unwrap_or(0);
    let mut balance = vec![0i64; n];
    for (a, b) in left.iter().zip(right) {
        let x: TernaryVector = characteristic_vector(a, b).expect("same n");
        for (i, slot) in balance.iter_mut().enumerate() {
            *slot += i64::from(x.get(i + 1));
        }
    }
    balance
}

/// Pairs `(A_1, B_1)` and `(A_2, B_2)` are compatible when
/// `A_1 ∩ A_2 ⊆ B_1 ∪ B_2` and `B_1 ∩ B_2 ⊆ A_1 ∪ A_2`.
pub fn is_compatible(pair1: (Subset, Subset), pair2: (Subset, Subset)) -> Result<bool> {
    let (a1, b1) = pair1;
    let (a2, b2) = pair2;
    same_n(&a1, &b1)?;
    same_n(&a1, &a2)?;
    same_n(&a1, &b2)?;
    Ok(a1.intersection(&a2).is_subset_of(&b1.union(&b2))
        && b1.intersection(&b2).is_subset_of(&a1.union(&a2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(n: usize, atoms: &[u64]) -> Subset {
        Subset::from_atoms(n, atoms.iter().copied()).unwrap()
    }

    #[test]
    fn trading_transform_examples() {
        let left = [s(7, &[1, 5, 7]), s(7, &[2, 3, 4, 6])];
        let right = [s(7, &[3, 4, 7]), s(7, &[1, 2, 5, 6])];
        assert!(is_trading_transform(&left, &right).unwrap());
        assert!(is_trading_transform(&[s(2, &[])], &[s(2, &[])]).unwrap());
        assert!(!is_trading_transform(&[s(2, &[1])], &[s(2, &[2])]).unwrap());
        assert!(is_trading_transform(&left, &right[..1]).is_err());
        assert!(TradingTransform::new(vec![s(2, &[1])], vec![s(2, &[2])]).is_err());
    }

    #[test]
    fn compatibility_examples() {
        let p = (s(3, &[1]), s(3, &[2]));
        let q = (s(3, &[1]), s(3, &[3]));
        assert!(!is_compatible(p, q).unwrap());
        let e = (s(3, &[]), s(3, &[]));
        assert!(is_compatible(e, e).unwrap());
    }

    proptest! {
        #[test]
        fn compatibility_is_symmetric(raw in proptest::collection::vec(0u64..64, 4)) {
            let v: Vec<Subset> = raw.iter().map(|&b| Subset::new(6, b).unwrap()).collect();
            prop_assert_eq!(
                is_compatible((v[0], v[1]), (v[2], v[3])).unwrap(),
                is_compatible((v[2], v[3]), (v[0], v[1])).unwrap()
            );
        }

        #[test]
        fn transform_iff_zero_balance(raw in proptest::collection::vec((0u64..32, 0u64..32), 1..5)) {
            let left: Vec<Subset> = raw.iter().map(|p| Subset::new(5, p.0).unwrap()).collect();
            let right: Vec<Subset> = raw.iter().map(|p| Subset::new(5, p.1).unwrap()).collect();
            let zero = column_balance(&left, &right).iter().all(|&c| c == 0);
            prop_assert_eq!(is_trading_transform(&left, &right).unwrap(), zero);
        }
    }
}
