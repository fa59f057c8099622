//! Simplicial complexes, their dual simple games, Isbell desirability and
//! shiftedness.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::subset::{check_atoms, full_mask, Subset};
use crate::transform::TradingTransform;

/// Largest `n` for which faces are stored explicitly.
pub const MAX_EXPLICIT_ATOMS: usize = 20;

/// Anything that can answer face membership for subsets of `[n]`.
pub trait FaceOracle: Sync {
    fn atoms(&self) -> usize;
    fn is_face(&self, s: &Subset) -> bool;
}

pub(crate) fn check_explicit(n: usize) -> Result<()> {
    check_atoms(n)?;
    if n > MAX_EXPLICIT_ATOMS {
        return Err(Error::TooLarge { n, limit: MAX_EXPLICIT_ATOMS, what: "explicit face storage" });
    }
    Ok(())
}

/// A dense membership table over all `2^n` subsets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct SubsetTable {
    words: Vec<u64>,
}

impl SubsetTable {
    pub fn new(n: usize) -> Self {
        SubsetTable { words: vec![0; (1usize << n).div_ceil(64)] }
    }

    pub fn get(&self, bits: u64) -> bool {
        self.words[(bits >> 6) as usize] >> (bits & 63) & 1 == 1
    }

    pub fn set(&mut self, bits: u64) {
        self.words[(bits >> 6) as usize] |= 1 << (bits & 63);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// A downward-closed family of subsets of `[n]`, stored explicitly.
///
/// The empty family is a valid value, distinct from `{∅}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    n: usize,
    table: SubsetTable,
}

impl std::fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("n", &self.n)
            .field("maximal_faces", &self.maximal_faces())
            .finish()
    }
}

impl FaceOracle for SimplicialComplex {
    fn atoms(&self) -> usize {
        self.n
    }

    fn is_face(&self, s: &Subset) -> bool {
        self.contains(s)
    }
}

impl SimplicialComplex {
    /// The empty family on `[n]`.
    pub fn empty(n: usize) -> Result<Self> {
        check_explicit(n)?;
        Ok(SimplicialComplex { n, table: SubsetTable::new(n) })
    }

    /// All of `2^[n]`.
    pub fn full(n: usize) -> Result<Self> {
        let mut c = SimplicialComplex::empty(n)?;
        for bits in 0..(1u64 << n) {
            c.table.set(bits);
        }
        Ok(c)
    }

    /// The smallest complex containing every generator.
    pub fn from_generators(n: usize, generators: &[Subset]) -> Result<Self> {
        check_explicit(n)?;
        let mut c = SimplicialComplex::empty(n)?;
        for g in generators {
            if g.n() != n {
                return Err(Error::DimensionMismatch { left: n, right: g.n() });
            }
            c.table.set(g.bits());
        }
        c.close_downward();
        Ok(c)
    }

    /// Faces are the subsets satisfying `pred`; fails unless that family is
    /// downward closed.
    pub fn from_predicate(n: usize, mut pred: impl FnMut(Subset) -> bool) -> Result<Self> {
        check_explicit(n)?;
        let mut c = SimplicialComplex::empty(n)?;
        for bits in 0..(1u64 << n) {
            if pred(Subset::from_bits_unchecked(n, bits)) {
                c.table.set(bits);
            }
        }
        if let Some((face, sub)) = c.downward_closure_violation() {
            return Err(Error::Precondition(format!(
                "family is not downward closed: {face} is a member but {sub} is not"
            )));
        }
        Ok(c)
    }

    fn close_downward(&mut self) {
        // Descending sweep: every member passes membership to its
        // one-smaller subsets, which are visited later.
        for bits in (0..(1u64 << self.n)).rev() {
            if self.table.get(bits) {
                let mut rest = bits;
                while rest != 0 {
                    let low = rest & rest.wrapping_neg();
                    self.table.set(bits & !low);
                    rest &= rest - 1;
                }
            }
        }
    }

    /// A member together with a one-smaller subset that is missing.
    pub(crate) fn downward_closure_violation(&self) -> Option<(Subset, Subset)> {
        for bits in 0..(1u64 << self.n) {
            if !self.table.get(bits) {
                continue;
            }
            let mut rest = bits;
            while rest != 0 {
                let low = rest & rest.wrapping_neg();
                if !self.table.get(bits & !low) {
                    return Some((self.subset(bits), self.subset(bits & !low)));
                }
                rest &= rest - 1;
            }
        }
        None
    }

    pub fn is_downward_closed(&self) -> bool {
        self.downward_closure_violation().is_none()
    }

    fn subset(&self, bits: u64) -> Subset {
        Subset::from_bits_unchecked(self.n, bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, s: &Subset) -> bool {
        s.n() == self.n && self.table.get(s.bits())
    }

    pub fn face_count(&self) -> usize {
        self.table.count()
    }

    pub fn is_empty_family(&self) -> bool {
        self.face_count() == 0
    }

    /// Faces in increasing bitset order.
    pub fn faces(&self) -> impl Iterator<Item = Subset> + '_ {
        (0..(1u64 << self.n)).filter(|&b| self.table.get(b)).map(|b| self.subset(b))
    }

    /// Non-faces in increasing bitset order.
    pub fn nonfaces(&self) -> impl Iterator<Item = Subset> + '_ {
        (0..(1u64 << self.n)).filter(|&b| !self.table.get(b)).map(|b| self.subset(b))
    }

    pub fn maximal_faces(&self) -> Vec<Subset> {
        let all = full_mask(self.n);
        self.faces()
            .filter(|f| {
                let mut rest = all & !f.bits();
                while rest != 0 {
                    let low = rest & rest.wrapping_neg();
                    if self.table.get(f.bits() | low) {
                        return false;
                    }
                    rest &= rest - 1;
                }
                true
            })
            .collect()
    }

    pub fn minimal_nonfaces(&self) -> Vec<Subset> {
        self.nonfaces()
            .filter(|s| {
                let mut rest = s.bits();
                while rest != 0 {
                    let low = rest & rest.wrapping_neg();
                    if !self.table.get(s.bits() & !low) {
                        return false;
                    }
                    rest &= rest - 1;
                }
                true
            })
            .collect()
    }

    /// The simple game whose losing coalitions are the faces.
    pub fn dual_game(&self) -> SimpleGame {
        SimpleGame { losing: self.clone() }
    }
}

/// A simple game on `[n]`: an upward-closed family of winning coalitions,
/// stored as the complex of losing ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGame {
    losing: SimplicialComplex,
}

impl SimpleGame {
    pub fn from_losing(losing: SimplicialComplex) -> Self {
        SimpleGame { losing }
    }

    /// Fails unless `winning` is upward closed.
    pub fn from_winning(n: usize, winning: &[Subset]) -> Result<Self> {
        check_explicit(n)?;
        let mut table = SubsetTable::new(n);
        for w in winning {
            if w.n() != n {
                return Err(Error::DimensionMismatch { left: n, right: w.n() });
            }
            table.set(w.bits());
        }
        let losing = SimplicialComplex::from_predicate(n, |s| !table.get(s.bits()))
            .map_err(|_| Error::Precondition("winning family is not upward closed".into()))?;
        Ok(SimpleGame { losing })
    }

    pub fn n(&self) -> usize {
        self.losing.n
    }

    pub fn is_winning(&self, s: &Subset) -> bool {
        !self.losing.contains(s)
    }

    pub fn losing(&self) -> &SimplicialComplex {
        &self.losing
    }

    pub fn winning(&self) -> impl Iterator<Item = Subset> + '_ {
        self.losing.nonfaces()
    }

    pub fn minimal_winning(&self) -> Vec<Subset> {
        self.losing.minimal_nonfaces()
    }
}

/// The smallest complex containing the generators that is closed under
/// replacing a vertex of a face by one appearing earlier in `vertex_order`.
pub fn shift_closure(n: usize, generators: &[Subset], vertex_order: &[usize]) -> Result<SimplicialComplex> {
    let position = order_positions(n, vertex_order)?;
    let mut c = SimplicialComplex::from_generators(n, generators)?;
    // Shifting and taking subsets both move to sets that are "smaller";
    // iterate until nothing changes.
    loop {
        let mut changed = false;
        let faces: Vec<Subset> = c.faces().collect();
        for f in faces {
            for x in f.atoms() {
                for y in 1..=n {
                    if position[y] < position[x] && !f.contains(y) {
                        let g = f.without(x).with(y);
                        if !c.table.get(g.bits()) {
                            c.table.set(g.bits());
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
        c.close_downward();
    }
    Ok(c)
}

/// `position[atom]` for a permutation of `[n]`; index 0 unused.
fn order_positions(n: usize, vertex_order: &[usize]) -> Result<Vec<usize>> {
    check_atoms(n)?;
    if vertex_order.len() != n {
        return Err(Error::Shape(format!("vertex order has {} entries for n = {n}", vertex_order.len())));
    }
    let mut position = vec![usize::MAX; n + 1];
    for (p, &v) in vertex_order.iter().enumerate() {
        if v == 0 || v > n || position[v] != usize::MAX {
            return Err(Error::Shape(format!("vertex order {vertex_order:?} is not a permutation of 1..={n}")));
        }
        position[v] = p;
    }
    Ok(position)
}

/// `j ≤_I i`: whenever `X ∪ {j}` wins, so does `X ∪ {i}`, for every
/// `X ⊆ [n] ∖ {i, j}`.
pub fn isbell_leq(game: &SimpleGame, j: usize, i: usize) -> bool {
    if i == j {
        return true;
    }
    let n = game.n();
    let (bi, bj) = (1u64 << (i - 1), 1u64 << (j - 1));
    let rest = full_mask(n) & !bi & !bj;
    let mut x = 0u64;
    loop {
        let with_j = Subset::from_bits_unchecked(n, x | bj);
        let with_i = Subset::from_bits_unchecked(n, x | bi);
        if game.is_winning(&with_j) && !game.is_winning(&with_i) {
            return false;
        }
        if x == rest {
            return true;
        }
        x = (x.wrapping_sub(rest)) & rest;
    }
}

/// If `Δ` is shifted, a vertex order (earliest first) it is shifted with
/// respect to; ties are broken by smaller atom first.
pub fn is_shifted(complex: &SimplicialComplex) -> Option<Vec<usize>> {
    let n = complex.n();
    let game = complex.dual_game();
    // earlier[i][j]: i may replace j in any face, i.e. i ≤_I j in the game.
    let mut earlier = vec![vec![true; n + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                earlier[i][j] = isbell_leq(&game, i, j);
            }
        }
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            if !earlier[i][j] && !earlier[j][i] {
                return None;
            }
        }
    }
    let mut order: Vec<usize> = (1..=n).collect();
    let score = |v: usize| (1..=n).filter(|&u| u != v && earlier[v][u]).count();
    order.sort_by(|&a, &b| score(b).cmp(&score(a)).then(a.cmp(&b)));
    debug_assert!(has_shift_obstruction(complex, &order).expect("permutation").is_none());
    Some(order)
}

/// Why a complex fails to be shifted with respect to a vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShiftObstruction {
    /// `A∪{i}, B∪{j}` are faces while `B∪{i}, A∪{j}` are not; `i` precedes `j`.
    /// No vertex order at all makes the complex shifted.
    Incomparable { i: usize, j: usize, a: Subset, b: Subset },
    /// `B∪{j}` is a face but `B∪{i}` is not although `i` precedes `j`.
    Misordered { i: usize, j: usize, b: Subset },
}

impl ShiftObstruction {
    /// For an incomparable pair, the length-2 trading transform
    /// `(A∪{i}, B∪{j}; B∪{i}, A∪{j})`.
    pub fn trading_transform(&self) -> Option<TradingTransform> {
        match *self {
            ShiftObstruction::Incomparable { i, j, a, b } => Some(
                TradingTransform::new(vec![a.with(i), b.with(j)], vec![b.with(i), a.with(j)])
                    .expect("balanced by construction"),
            ),
            ShiftObstruction::Misordered { .. } => None,
        }
    }
}

/// `None` iff `Δ` is shifted with respect to `vertex_order`.
pub fn has_shift_obstruction(
    complex: &SimplicialComplex,
    vertex_order: &[usize],
) -> Result<Option<ShiftObstruction>> {
    let n = complex.n();
    let position = order_positions(n, vertex_order)?;
    let face = |bits: u64| complex.table.get(bits);
    let subsets_avoiding = |i: usize, j: usize| {
        let rest = full_mask(n) & !(1u64 << (i - 1)) & !(1u64 << (j - 1));
        let mut out = Vec::with_capacity(1 << (n.saturating_sub(2)));
        let mut x = 0u64;
        loop {
            out.push(x);
            if x == rest {
                break;
            }
            x = x.wrapping_sub(rest) & rest;
        }
        out
    };
    let mut pairs = Vec::new();
    for &i in vertex_order {
        for &j in vertex_order {
            if position[i] < position[j] {
                pairs.push((i, j));
            }
        }
    }
    for &(i, j) in &pairs {
        let (bi, bj) = (1u64 << (i - 1), 1u64 << (j - 1));
        let xs = subsets_avoiding(i, j);
        // i can replace j somewhere it fails, and j can replace i elsewhere.
        let a = xs.iter().find(|&&x| face(x | bi) && !face(x | bj));
        let b = xs.iter().find(|&&x| face(x | bj) && !face(x | bi));
        if let (Some(&a), Some(&b)) = (a, b) {
            return Ok(Some(ShiftObstruction::Incomparable {
                i,
                j,
                a: Subset::from_bits_unchecked(n, a),
                b: Subset::from_bits_unchecked(n, b),
            }));
        }
    }
    for &(i, j) in &pairs {
        let (bi, bj) = (1u64 << (i - 1), 1u64 << (j - 1));
        if let Some(&b) = subsets_avoiding(i, j).iter().find(|&&x| face(x | bj) && !face(x | bi)) {
            return Ok(Some(ShiftObstruction::Misordered { i, j, b: Subset::from_bits_unchecked(n, b) }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, atoms: &[u64]) -> Subset {
        Subset::from_atoms(n, atoms.iter().copied()).unwrap()
    }

    #[test]
    fn generators_close_downward() {
        let c = SimplicialComplex::from_generators(3, &[s(3, &[1, 2])]).unwrap();
        let faces: Vec<Vec<usize>> = c.faces().map(|f| f.to_vec()).collect();
        assert_eq!(faces, vec![vec![], vec![1], vec![2], vec![1, 2]]);
        assert!(c.is_downward_closed());
        assert_eq!(c.maximal_faces(), vec![s(3, &[1, 2])]);
        assert_eq!(c.minimal_nonfaces(), vec![s(3, &[3])]);
        let empty = SimplicialComplex::from_generators(1, &[]).unwrap();
        assert!(empty.is_empty_family());
        let point = SimplicialComplex::from_generators(1, &[s(1, &[])]).unwrap();
        assert_eq!(point.face_count(), 1);
        assert_eq!(point.minimal_nonfaces(), vec![s(1, &[1])]);
    }

    #[test]
    fn predicate_must_be_downward_closed() {
        assert!(SimplicialComplex::from_predicate(2, |x| x.bits() == 3).is_err());
        assert!(SimplicialComplex::from_predicate(2, |x| x.len() <= 1).is_ok());
    }

    #[test]
    fn shifting_small_cases() {
        let c = shift_closure(2, &[s(2, &[1])], &[1, 2]).unwrap();
        assert_eq!(c.face_count(), 2);
        let c = shift_closure(2, &[s(2, &[2])], &[1, 2]).unwrap();
        assert_eq!(c.faces().collect::<Vec<_>>(), vec![s(2, &[]), s(2, &[1]), s(2, &[2])]);
        assert!(shift_closure(2, &[], &[1, 1]).is_err());
    }

    #[test]
    fn isbell_dictator_and_symmetric() {
        let dictator = SimpleGame::from_losing(SimplicialComplex::from_generators(2, &[s(2, &[2])]).unwrap());
        assert!(isbell_leq(&dictator, 2, 1));
        assert!(!isbell_leq(&dictator, 1, 2));
        let majority = SimpleGame::from_losing(
            SimplicialComplex::from_predicate(3, |x| x.len() < 2).unwrap(),
        );
        for i in 1..=3 {
            for j in 1..=3 {
                assert!(isbell_leq(&majority, i, j));
            }
        }
    }

    #[test]
    fn obstruction_on_two_disjoint_edges() {
        let c = SimplicialComplex::from_generators(4, &[s(4, &[1, 4]), s(4, &[2, 3])]).unwrap();
        assert_eq!(is_shifted(&c), None);
        let ob = has_shift_obstruction(&c, &[1, 2, 3, 4]).unwrap().unwrap();
        assert_eq!(ob, ShiftObstruction::Incomparable { i: 1, j: 2, a: s(4, &[4]), b: s(4, &[3]) });
        let t = ob.trading_transform().unwrap();
        assert_eq!(t.left(), &[s(4, &[1, 4]), s(4, &[2, 3])]);
        assert_eq!(t.right(), &[s(4, &[1, 3]), s(4, &[2, 4])]);
    }

    #[test]
    fn full_and_trivial_complexes_are_shifted() {
        let full = SimplicialComplex::full(4).unwrap();
        assert_eq!(is_shifted(&full), Some(vec![1, 2, 3, 4]));
        let point = SimplicialComplex::from_generators(3, &[s(3, &[])]).unwrap();
        assert_eq!(has_shift_obstruction(&point, &[3, 1, 2]).unwrap(), None);
    }

    #[test]
    fn misordered_when_order_is_reversed() {
        let c = SimplicialComplex::from_generators(2, &[s(2, &[1])]).unwrap();
        assert_eq!(is_shifted(&c), Some(vec![1, 2]));
        assert_eq!(
            has_shift_obstruction(&c, &[2, 1]).unwrap(),
            Some(ShiftObstruction::Misordered { i: 2, j: 1, b: s(2, &[]) })
        );
    }

    #[test]
    fn dual_round_trip() {
        let c = SimplicialComplex::from_generators(4, &[s(4, &[1, 2]), s(4, &[3])]).unwrap();
        let game = c.dual_game();
        let winning: Vec<Subset> = game.winning().collect();
        let back = SimpleGame::from_winning(4, &winning).unwrap();
        assert_eq!(back.losing(), &c);
        assert!(SimpleGame::from_winning(2, &[s(2, &[1])]).is_err());
    }
}
