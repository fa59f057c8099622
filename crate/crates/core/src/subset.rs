//! Subsets of `[n]` as machine-word bitsets.

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported atom count.
pub const MAX_ATOMS: usize = 64;

/// A subset of `[n] = {1, …, n}`; bit `i − 1` is set iff atom `i` is a member.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    bits: u64,
    n: u8,
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn check_atoms(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ATOMS {
        Err(Error::InvalidAtomCount(n))
    } else {
        Ok(())
    }
}

impl Subset {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        check_atoms(n)?;
        let stray = bits & !full_mask(n);
        if stray != 0 {
            return Err(Error::AtomOutOfRange {
                atom: u64::from(stray.trailing_zeros()) + 1,
                n,
            });
        }
        Ok(Subset { bits, n: n as u8 })
    }

    /// Caller guarantees `bits` fits in `n` atoms.
    pub(crate) fn from_bits_unchecked(n: usize, bits: u64) -> Self {
        debug_assert!(bits & !full_mask(n) == 0);
        Subset { bits, n: n as u8 }
    }

    pub fn from_atoms<I>(n: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<u64>,
    {
        check_atoms(n)?;
        let mut bits = 0u64;
        for atom in atoms {
            let atom = atom.into();
            if atom == 0 || atom > n as u64 {
                return Err(Error::AtomOutOfRange { atom, n });
            }
            bits |= 1 << (atom - 1);
        }
        Ok(Subset { bits, n: n as u8 })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Subset::new(n, 0)
    }

    pub fn full(n: usize) -> Result<Self> {
        Subset::new(n, full_mask(n))
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, atom: usize) -> bool {
        atom >= 1 && atom <= self.n() && self.bits & (1 << (atom - 1)) != 0
    }

    /// Members in increasing order, 1-based.
    pub fn atoms(&self) -> impl Iterator<Item = usize> {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i + 1)
            }
        })
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.bits & other.bits == 0
    }

    pub fn union(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset { bits: self.bits | other.bits, n: self.n }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset { bits: self.bits & other.bits, n: self.n }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset { bits: self.bits & !other.bits, n: self.n }
    }

    pub fn complement(&self) -> Subset {
        Subset { bits: !self.bits & full_mask(self.n()), n: self.n }
    }

    pub fn with(&self, atom: usize) -> Subset {
        debug_assert!(atom >= 1 && atom <= self.n());
        Subset { bits: self.bits | (1 << (atom - 1)), n: self.n }
    }

    pub fn without(&self, atom: usize) -> Subset {
        debug_assert!(atom >= 1 && atom <= self.n());
        Subset { bits: self.bits & !(1 << (atom - 1)), n: self.n }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.atoms().collect()
    }
}

pub(crate) fn same_n(a: &Subset, b: &Subset) -> Result<()> {
    if a.n == b.n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a.n(), right: b.n() })
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, a) in self.atoms().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for a in self.atoms() {
            seq.serialize_element(&a)?;
        }
        seq.end()
    }
}
