//! Vectors in `T^n = {−1, 0, 1}^n`.

use std::fmt;

use num_bigint::BigInt;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::{check_atoms, full_mask, same_n, Subset};

/// A ternary vector stored as the masks of its `+1` and `−1` entries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryVector {
    n: u8,
    pos: u64,
    neg: u64,
}

impl TernaryVector {
    pub fn zero(n: usize) -> Result<Self> {
        check_atoms(n)?;
        Ok(TernaryVector { n: n as u8, pos: 0, neg: 0 })
    }

    pub fn from_masks(n: usize, pos: u64, neg: u64) -> Result<Self> {
        check_atoms(n)?;
        if pos & neg != 0 || (pos | neg) & !full_mask(n) != 0 {
            return Err(Error::Shape(format!(
                "masks {pos:#x}/{neg:#x} do not describe a ternary vector of length {n}"
            )));
        }
        Ok(TernaryVector { n: n as u8, pos, neg })
    }

    pub(crate) fn from_masks_unchecked(n: usize, pos: u64, neg: u64) -> Self {
        debug_assert!(pos & neg == 0);
        TernaryVector { n: n as u8, pos, neg }
    }

    pub fn from_entries(entries: &[i8]) -> Result<Self> {
        check_atoms(entries.len())?;
        let (mut pos, mut neg) = (0u64, 0u64);
        for (i, &e) in entries.iter().enumerate() {
            match e {
                1 => pos |= 1 << i,
                -1 => neg |= 1 << i,
                0 => {}
                _ => return Err(Error::Shape(format!("entry {e} at position {} is not ternary", i + 1))),
            }
        }
        Ok(TernaryVector { n: entries.len() as u8, pos, neg })
    }

    /// The unit vector `e_i`, 1-based.
    pub fn unit(n: usize, i: usize) -> Result<Self> {
        check_atoms(n)?;
        if i == 0 || i > n {
            return Err(Error::AtomOutOfRange { atom: i as u64, n });
        }
        Ok(TernaryVector { n: n as u8, pos: 1 << (i - 1), neg: 0 })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn pos_mask(&self) -> u64 {
        self.pos
    }

    pub fn neg_mask(&self) -> u64 {
        self.neg
    }

    /// Atoms with entry `+1`.
    pub fn positive_part(&self) -> Subset {
        Subset::from_bits_unchecked(self.n(), self.pos)
    }

    /// Atoms with entry `−1`.
    pub fn negative_part(&self) -> Subset {
        Subset::from_bits_unchecked(self.n(), self.neg)
    }

    /// Entry at 1-based position `i`.
    pub fn get(&self, i: usize) -> i8 {
        let bit = 1u64 << (i - 1);
        if self.pos & bit != 0 {
            1
        } else if self.neg & bit != 0 {
            -1
        } else {
            0
        }
    }

    pub fn entries(&self) -> Vec<i8> {
        (1..=self.n()).map(|i| self.get(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.pos == 0 && self.neg == 0
    }

    pub fn neg(&self) -> TernaryVector {
        TernaryVector { n: self.n, pos: self.neg, neg: self.pos }
    }

    /// `u ⊕ v`: the coordinatewise sum, or `None` when an entry leaves `{−1, 0, 1}`.
    pub fn restricted_sum(&self, other: &TernaryVector) -> Option<TernaryVector> {
        debug_assert_eq!(self.n, other.n);
        if self.pos & other.pos != 0 || self.neg & other.neg != 0 {
            return None;
        }
        Some(TernaryVector {
            n: self.n,
            pos: (self.pos & !other.neg) | (other.pos & !self.neg),
            neg: (self.neg & !other.pos) | (other.neg & !self.pos),
        })
    }

    pub fn dot(&self, weights: &[Rational]) -> Rational {
        debug_assert_eq!(weights.len(), self.n());
        let mut acc = Rational::from_integer(BigInt::from(0));
        for (i, w) in weights.iter().enumerate() {
            let bit = 1u64 << i;
            if self.pos & bit != 0 {
                acc += w;
            } else if self.neg & bit != 0 {
                acc -= w;
            }
        }
        acc
    }

    pub fn dot_int(&self, weights: &[BigInt]) -> BigInt {
        let mut acc = BigInt::from(0);
        for (i, w) in weights.iter().enumerate() {
            let bit = 1u64 << i;
            if self.pos & bit != 0 {
                acc += w;
            } else if self.neg & bit != 0 {
                acc -= w;
            }
        }
        acc
    }
}

/// `χ(A, B) = χ(A) − χ(B)`.
pub fn characteristic_vector(a: &Subset, b: &Subset) -> Result<TernaryVector> {
    same_n(a, b)?;
    Ok(TernaryVector {
        n: a.n() as u8,
        pos: a.bits() & !b.bits(),
        neg: b.bits() & !a.bits(),
    })
}

/// `u ⊕ v`, checking lengths.
pub fn restricted_sum(u: &TernaryVector, v: &TernaryVector) -> Result<Option<TernaryVector>> {
    if u.n != v.n {
        return Err(Error::DimensionMismatch { left: u.n(), right: v.n() });
    }
    Ok(u.restricted_sum(v))
}

impl fmt::Debug for TernaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TernaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for i in 1..=self.n() {
            if i > 1 {
                f.write_str(",")?;
            }
            write!(f, "{}", self.get(i))?;
        }
        f.write_str(")")
    }
}

impl Serialize for TernaryVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.n()))?;
        for i in 1..=self.n() {
            seq.serialize_element(&self.get(i))?;
        }
        seq.end()
    }
}

/// Dense base-3 indexing of `T^n` for small `n`: entry `x_i` contributes
/// `(x_i + 1)·3^(i−1)`, so the zero vector sits at `(3^n − 1)/2` and
/// negation maps index `k` to `3^n − 1 − k`.
#[derive(Clone, Debug)]
pub(crate) struct TernaryIndex {
    pub n: usize,
    pub size: usize,
    pub zero: usize,
    /// `pow3_mask[m] = Σ_{i ∈ m} 3^i`, for every mask `m` of `n` bits.
    pub pow3_mask: Vec<u32>,
}

impl TernaryIndex {
    pub fn new(n: usize) -> Self {
        assert!(n <= 16);
        let size = 3usize.pow(n as u32);
        let mut pow3_mask = vec![0u32; 1 << n];
        for m in 1usize..(1 << n) {
            let low = m.trailing_zeros();
            pow3_mask[m] = pow3_mask[m & (m - 1)] + 3u32.pow(low);
        }
        TernaryIndex { n, size, zero: (size - 1) / 2, pow3_mask }
    }

    pub fn index_of_masks(&self, pos: u64, neg: u64) -> usize {
        self.zero + self.pow3_mask[pos as usize] as usize - self.pow3_mask[neg as usize] as usize
    }

    pub fn index(&self, x: &TernaryVector) -> usize {
        self.index_of_masks(x.pos, x.neg)
    }

    pub fn vector(&self, mut idx: usize) -> TernaryVector {
        let (mut pos, mut neg) = (0u64, 0u64);
        for i in 0..self.n {
            match idx % 3 {
                0 => neg |= 1 << i,
                2 => pos |= 1 << i,
                _ => {}
            }
            idx /= 3;
        }
        TernaryVector::from_masks_unchecked(self.n, pos, neg)
    }

    pub fn negate(&self, idx: usize) -> usize {
        self.size - 1 - idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(n: usize, atoms: &[u64]) -> Subset {
        Subset::from_atoms(n, atoms.iter().copied()).unwrap()
    }

    #[test]
    fn characteristic_vector_examples() {
        let x = characteristic_vector(&s(3, &[1, 2]), &s(3, &[2, 3])).unwrap();
        assert_eq!(x.entries(), vec![1, 0, -1]);
        assert!(characteristic_vector(&s(3, &[1]), &s(3, &[1])).unwrap().is_zero());
        let y = characteristic_vector(&s(7, &[1, 5, 7]), &s(7, &[3, 4, 7])).unwrap();
        assert_eq!(y.entries(), vec![1, 0, -1, -1, 1, 0, 0]);
        assert!(characteristic_vector(&s(3, &[1]), &s(4, &[1])).is_err());
    }

    #[test]
    fn restricted_sum_examples() {
        let a = TernaryVector::from_entries(&[1, 0]).unwrap();
        let b = TernaryVector::from_entries(&[0, -1]).unwrap();
        assert_eq!(a.restricted_sum(&b).unwrap().entries(), vec![1, -1]);
        assert_eq!(a.restricted_sum(&a), None);
        assert_eq!(a.restricted_sum(&a.neg()).unwrap(), TernaryVector::zero(2).unwrap());
    }

    #[test]
    fn index_round_trip() {
        let idx = TernaryIndex::new(4);
        for k in 0..idx.size {
            let v = idx.vector(k);
            assert_eq!(idx.index(&v), k);
            assert_eq!(idx.index(&v.neg()), idx.negate(k));
        }
        assert!(idx.vector(idx.zero).is_zero());
    }

    fn ternary(n: usize) -> impl Strategy<Value = TernaryVector> {
        proptest::collection::vec(-1i8..=1, n).prop_map(|e| TernaryVector::from_entries(&e).unwrap())
    }

    proptest! {
        #[test]
        fn chi_is_antisymmetric(a in any::<u16>(), b in any::<u16>()) {
            let (a, b) = (Subset::new(16, a as u64).unwrap(), Subset::new(16, b as u64).unwrap());
            prop_assert_eq!(characteristic_vector(&a, &b).unwrap(), characteristic_vector(&b, &a).unwrap().neg());
        }

        #[test]
        fn restricted_sum_matches_coordinatewise((u, v) in (ternary(9), ternary(9))) {
            let sum: Vec<i8> = u.entries().iter().zip(v.entries()).map(|(a, b)| a + b).collect();
            let fits = sum.iter().all(|e| e.abs() <= 1);
            match u.restricted_sum(&v) {
                Some(w) => { prop_assert!(fits); prop_assert_eq!(w.entries(), sum); }
                None => prop_assert!(!fits),
            }
            prop_assert_eq!(u.restricted_sum(&v), v.restricted_sum(&u));
            prop_assert_eq!(u.neg().neg(), u);
        }
    }
}
