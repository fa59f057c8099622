//! Discrete cones in `T^n`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::subset::check_atoms;
use crate::ternary::{TernaryIndex, TernaryVector};

/// Largest `n` for which cones are materialised over all `3^n` vectors.
pub const MAX_CONE_ATOMS: usize = 12;

pub(crate) fn check_cone_atoms(n: usize) -> Result<()> {
    check_atoms(n)?;
    if n > MAX_CONE_ATOMS {
        return Err(Error::TooLarge { n, limit: MAX_CONE_ATOMS, what: "discrete cones" });
    }
    Ok(())
}

/// A set of ternary vectors, stored densely by base-3 index.
#[derive(Clone)]
pub struct DiscreteCone {
    index: TernaryIndex,
    members: Vec<u64>,
}

impl PartialEq for DiscreteCone {
    fn eq(&self, other: &Self) -> bool {
        self.index.n == other.index.n && self.members == other.members
    }
}

impl Eq for DiscreteCone {}

impl std::fmt::Debug for DiscreteCone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiscreteCone").field("n", &self.n()).field("len", &self.len()).finish()
    }
}

impl DiscreteCone {
    pub fn empty(n: usize) -> Result<Self> {
        check_cone_atoms(n)?;
        let index = TernaryIndex::new(n);
        let words = index.size.div_ceil(64);
        Ok(DiscreteCone { index, members: vec![0; words] })
    }

    pub fn from_vectors<'a>(n: usize, vectors: impl IntoIterator<Item = &'a TernaryVector>) -> Result<Self> {
        let mut c = DiscreteCone::empty(n)?;
        for v in vectors {
            c.insert(v)?;
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.index.n
    }

    pub(crate) fn index(&self) -> &TernaryIndex {
        &self.index
    }

    pub(crate) fn get_idx(&self, idx: usize) -> bool {
        self.members[idx >> 6] >> (idx & 63) & 1 == 1
    }

    pub(crate) fn set_idx(&mut self, idx: usize, on: bool) {
        if on {
            self.members[idx >> 6] |= 1 << (idx & 63);
        } else {
            self.members[idx >> 6] &= !(1 << (idx & 63));
        }
    }

    fn check(&self, x: &TernaryVector) -> Result<()> {
        if x.n() != self.n() {
            return Err(Error::DimensionMismatch { left: self.n(), right: x.n() });
        }
        Ok(())
    }

    pub fn contains(&self, x: &TernaryVector) -> bool {
        x.n() == self.n() && self.get_idx(self.index.index(x))
    }

    pub fn insert(&mut self, x: &TernaryVector) -> Result<()> {
        self.check(x)?;
        let idx = self.index.index(x);
        self.set_idx(idx, true);
        Ok(())
    }

    pub fn remove(&mut self, x: &TernaryVector) -> Result<()> {
        self.check(x)?;
        let idx = self.index.index(x);
        self.set_idx(idx, false);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn member_indices(&self) -> Vec<usize> {
        (0..self.index.size).filter(|&i| self.get_idx(i)).collect()
    }

    /// Members in increasing base-3 index order.
    pub fn vectors(&self) -> Vec<TernaryVector> {
        self.member_indices().into_iter().map(|i| self.index.vector(i)).collect()
    }

    pub fn verify_axioms(&self) -> ConeAxiomReport {
        verify_cone_axioms(self)
    }
}

/// A failure of closure under restricted sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumWitness {
    pub x: TernaryVector,
    pub y: TernaryVector,
    pub sum: TernaryVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeAxiomReport {
    pub d1: bool,
    pub d2: bool,
    pub d3: bool,
    /// A unit vector that is missing, or a negated unit vector that is present.
    pub d1_witness: Option<TernaryVector>,
    /// A vector with neither itself nor its negation present.
    pub d2_witness: Option<TernaryVector>,
    pub d3_witness: Option<SumWitness>,
}

impl ConeAxiomReport {
    pub fn holds(&self) -> bool {
        self.d1 && self.d2 && self.d3
    }
}

/// Checks D1 (units in, negated units out), D2 (`x` or `−x` for every `x`)
/// and D3 (closure under restricted sum), each exhaustively.
pub fn verify_cone_axioms(cone: &DiscreteCone) -> ConeAxiomReport {
    let n = cone.n();
    let ix = cone.index();
    let mut d1_witness = None;
    for i in 1..=n {
        let e = TernaryVector::unit(n, i).expect("in range");
        if !cone.contains(&e) {
            d1_witness = Some(e);
            break;
        }
        if cone.contains(&e.neg()) {
            d1_witness = Some(e.neg());
            break;
        }
    }
    let d2_witness = (0..=ix.zero)
        .find(|&k| !cone.get_idx(k) && !cone.get_idx(ix.negate(k)))
        .map(|k| ix.vector(k));

    let members = cone.member_indices();
    let vectors: Vec<TernaryVector> = members.iter().map(|&k| ix.vector(k)).collect();
    // Pair (a, b) with a ≤ b by position; the first failing a in index order
    // wins, so the witness does not depend on scheduling.
    let d3_witness = (0..vectors.len()).into_par_iter().find_map_first(|a| {
        let x = vectors[a];
        for b in a..vectors.len() {
            let y = vectors[b];
            if x.pos_mask() & y.pos_mask() != 0 || x.neg_mask() & y.neg_mask() != 0 {
                continue;
            }
            let sum_idx = members[a] + members[b] - ix.zero;
            if !cone.get_idx(sum_idx) {
                return Some(SumWitness { x, y, sum: ix.vector(sum_idx) });
            }
        }
        None
    });
    ConeAxiomReport {
        d1: d1_witness.is_none(),
        d2: d2_witness.is_none(),
        d3: d3_witness.is_none(),
        d1_witness,
        d2_witness,
        d3_witness,
    }
}
