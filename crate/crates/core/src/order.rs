//! Qualitative probability orders stored as rankings of tie-classes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::complex::{check_explicit, SimpleGame, SimplicialComplex};
use crate::cone::{check_cone_atoms, ConeAxiomReport, DiscreteCone};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::Subset;
use crate::ternary::{characteristic_vector, TernaryIndex, TernaryVector};

/// A total preorder on `2^[n]`: tie-classes listed from lightest to heaviest.
#[derive(Clone, PartialEq, Eq)]
pub struct QPOrder {
    n: usize,
    classes: Vec<Vec<Subset>>,
    rank: Vec<u32>,
}

impl std::fmt::Debug for QPOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QPOrder")
            .field("n", &self.n)
            .field("classes", &self.classes.len())
            .finish()
    }
}

impl QPOrder {
    /// Builds an order from classes listed lightest first. Every subset of
    /// `[n]` must appear exactly once; members are re-sorted by bitset.
    pub fn from_classes(n: usize, classes: Vec<Vec<Subset>>) -> Result<Self> {
        check_explicit(n)?;
        let mut rank = vec![u32::MAX; 1 << n];
        let mut sorted = Vec::with_capacity(classes.len());
        for (r, mut class) in classes.into_iter().enumerate() {
            if class.is_empty() {
                return Err(Error::InvalidOrder(format!("class {} is empty", r + 1)));
            }
            for s in &class {
                if s.n() != n {
                    return Err(Error::DimensionMismatch { left: n, right: s.n() });
                }
                let slot = &mut rank[s.bits() as usize];
                if *slot != u32::MAX {
                    return Err(Error::InvalidOrder(format!("{s} appears more than once")));
                }
                *slot = r as u32;
            }
            class.sort();
            sorted.push(class);
        }
        if let Some(missing) = rank.iter().position(|&r| r == u32::MAX) {
            return Err(Error::InvalidOrder(format!(
                "{} is not ranked",
                Subset::from_bits_unchecked(n, missing as u64)
            )));
        }
        Ok(QPOrder { n, classes: sorted, rank })
    }

    /// The order `A ⪯ B ⟺ w(A) ≤ w(B)`.
    pub fn from_weights(weights: &[Rational]) -> Result<Self> {
        order_from_weights(weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> &[Vec<Subset>] {
        &self.classes
    }

    /// 0-based position of the class containing `s`.
    pub fn rank_of(&self, s: &Subset) -> usize {
        self.rank[s.bits() as usize] as usize
    }

    pub(crate) fn rank_of_bits(&self, bits: u64) -> u32 {
        self.rank[bits as usize]
    }

    pub fn class_of(&self, s: &Subset) -> &[Subset] {
        &self.classes[self.rank_of(s)]
    }

    pub fn leq(&self, a: &Subset, b: &Subset) -> bool {
        self.rank_of(a) <= self.rank_of(b)
    }

    pub fn lt(&self, a: &Subset, b: &Subset) -> bool {
        self.rank_of(a) < self.rank_of(b)
    }

    pub fn equiv(&self, a: &Subset, b: &Subset) -> bool {
        self.rank_of(a) == self.rank_of(b)
    }

    pub fn is_linear(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// Exchanges the positions of two subsets.
    pub fn swap(&self, a: &Subset, b: &Subset) -> Result<QPOrder> {
        if a.n() != self.n || b.n() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: a.n().max(b.n()) });
        }
        let (ra, rb) = (self.rank_of(a), self.rank_of(b));
        let mut classes = self.classes.clone();
        for s in classes[ra].iter_mut() {
            if s == a {
                *s = *b;
            }
        }
        if ra != rb {
            for s in classes[rb].iter_mut() {
                if s == b {
                    *s = *a;
                }
            }
        }
        QPOrder::from_classes(self.n, classes)
    }

    pub fn cone(&self) -> Result<DiscreteCone> {
        cone_of(self)
    }

    pub fn axiom_report(&self) -> Result<QpAxiomReport> {
        qp_axiom_report(self)
    }
}

/// Positive weights scaled to integers with the same ratios.
pub(crate) fn integer_weights(weights: &[Rational]) -> Result<Vec<BigInt>> {
    for (i, w) in weights.iter().enumerate() {
        if !w.is_positive() {
            return Err(Error::NonpositiveWeight(i + 1));
        }
    }
    let lcm = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    Ok(weights.iter().map(|w| w.numer() * (&lcm / w.denom())).collect())
}

/// Total weight of every subset of `[n]`, indexed by bitset.
pub(crate) fn subset_sums(weights: &[BigInt]) -> Vec<BigInt> {
    let n = weights.len();
    let mut sums = vec![BigInt::zero(); 1 << n];
    for m in 1usize..(1 << n) {
        let low = m.trailing_zeros() as usize;
        sums[m] = &sums[m & (m - 1)] + &weights[low];
    }
    sums
}

/// Classes sorted by exact total weight, ties grouped.
pub fn order_from_weights(weights: &[Rational]) -> Result<QPOrder> {
    let n = weights.len();
    check_explicit(n)?;
    let sums = subset_sums(&integer_weights(weights)?);
    let mut ids: Vec<u64> = (0..(1u64 << n)).collect();
    ids.sort_by(|&a, &b| sums[a as usize].cmp(&sums[b as usize]).then(a.cmp(&b)));
    let mut classes: Vec<Vec<Subset>> = Vec::new();
    let mut last: Option<&BigInt> = None;
    for &id in &ids {
        let s = Subset::from_bits_unchecked(n, id);
        if last == Some(&sums[id as usize]) {
            classes.last_mut().expect("nonempty").push(s);
        } else {
            classes.push(vec![s]);
        }
        last = Some(&sums[id as usize]);
    }
    QPOrder::from_classes(n, classes)
}

/// `C(⪯) = {χ(A, B) : B ⪯ A}`, over all pairs.
pub fn cone_of(order: &QPOrder) -> Result<DiscreteCone> {
    Ok(cone_scan(order)?.cone)
}

struct ConeScan {
    cone: DiscreteCone,
    /// Two pairs with the same characteristic vector that the order compares
    /// differently: `b ⪯ a` but `d ≻ c`.
    inconsistency: Option<DeFinettiWitness>,
}

/// Pairs `(A, B)` and `(C, D)` with `χ(A, B) = χ(C, D)`, `B ⪯ A` and `C ≺ D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeFinettiWitness {
    pub a: Subset,
    pub b: Subset,
    pub c: Subset,
    pub d: Subset,
}

fn cone_scan(order: &QPOrder) -> Result<ConeScan> {
    let n = order.n;
    check_cone_atoms(n)?;
    let mut cone = DiscreteCone::empty(n)?;
    let ix: TernaryIndex = cone.index().clone();
    // first pair seen with each verdict, per vector
    let mut first_true: Vec<u32> = vec![u32::MAX; ix.size];
    let mut first_false: Vec<u32> = vec![u32::MAX; ix.size];
    let full = 1u64 << n;
    let mut inconsistency = None;
    for a in 0..full {
        for b in 0..full {
            let idx = ix.index_of_masks(a & !b, b & !a);
            let pair = ((a << n) | b) as u32;
            if order.rank[b as usize] <= order.rank[a as usize] {
                cone.set_idx(idx, true);
                if first_true[idx] == u32::MAX {
                    first_true[idx] = pair;
                }
            } else if first_false[idx] == u32::MAX {
                first_false[idx] = pair;
            }
        }
    }
    for idx in 0..ix.size {
        if first_true[idx] != u32::MAX && first_false[idx] != u32::MAX {
            let mask = (1u64 << n) - 1;
            let (t, f) = (u64::from(first_true[idx]), u64::from(first_false[idx]));
            let sub = |bits: u64| Subset::from_bits_unchecked(n, bits);
            inconsistency = Some(DeFinettiWitness {
                a: sub(t >> n),
                b: sub(t & mask),
                c: sub(f >> n),
                d: sub(f & mask),
            });
            break;
        }
    }
    Ok(ConeScan { cone, inconsistency })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QpAxiomReport {
    /// `∅ ⪯ A` for every `A`.
    pub nontrivial: bool,
    /// A subset strictly below `∅`.
    pub nontrivial_witness: Option<Subset>,
    /// The order compares `(A, B)` and `(A ∪ C, B ∪ C)` alike for every
    /// `C` disjoint from both.
    pub consistent: bool,
    pub consistency_witness: Option<DeFinettiWitness>,
    pub cone: ConeAxiomReport,
}

impl QpAxiomReport {
    pub fn holds(&self) -> bool {
        self.nontrivial && self.consistent && self.cone.holds()
    }
}

pub fn qp_axiom_report(order: &QPOrder) -> Result<QpAxiomReport> {
    let scan = cone_scan(order)?;
    let nontrivial_witness = if order.rank[0] == 0 {
        None
    } else {
        Some(order.classes[0][0])
    };
    Ok(QpAxiomReport {
        nontrivial: nontrivial_witness.is_none(),
        nontrivial_witness,
        consistent: scan.inconsistency.is_none(),
        consistency_witness: scan.inconsistency,
        cone: scan.cone.verify_axioms(),
    })
}

/// True iff `∅` is minimal, the order compares characteristic vectors
/// consistently, and its cone satisfies D1–D3.
pub fn verify_qp_axioms(order: &QPOrder) -> Result<bool> {
    Ok(qp_axiom_report(order)?.holds())
}

/// `{X : X ≺ T}`.
pub fn initial_segment(order: &QPOrder, t: &Subset) -> Result<SimplicialComplex> {
    if t.n() != order.n {
        return Err(Error::DimensionMismatch { left: order.n, right: t.n() });
    }
    let rt = order.rank_of(t);
    SimplicialComplex::from_predicate(order.n, |x| order.rank_of(&x) < rt)
}

/// The game whose winning coalitions are `{X : T ⪯ X}`.
pub fn terminal_segment(order: &QPOrder, t: &Subset) -> Result<SimpleGame> {
    Ok(SimpleGame::from_losing(initial_segment(order, t)?))
}

/// Rejections from [`untie`], each with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UntieError {
    #[error("weights do not induce the order: they compare {a} and {b} differently")]
    WeightsDisagree { a: Subset, b: Subset },
    #[error("{x} is not a tie vector of the order")]
    NotInHyperplane { x: TernaryVector },
    #[error("{x} ⊕ {y} = {sum} is a tie vector missing from the kept set")]
    NotClosed { x: TernaryVector, y: TernaryVector, sum: TernaryVector },
    #[error("neither {s} nor its negation is kept")]
    MissingPair { s: TernaryVector },
    #[error("the untied order fails the cone axioms")]
    NotACone { report: Box<QpAxiomReport> },
}

/// The nonzero tie vectors `S(⪯) = {χ(A, B) : A ∼ B, A ≠ B}`, sorted.
pub fn hyperplane_vectors(order: &QPOrder) -> Vec<TernaryVector> {
    let mut set = FxHashSet::default();
    for class in &order.classes {
        for a in class {
            for b in class {
                if a != b {
                    set.insert(characteristic_vector(a, b).expect("same n"));
                }
            }
        }
    }
    let mut out: Vec<TernaryVector> = set.into_iter().collect();
    out.sort();
    out
}

/// Checks that `weights` induce exactly `order`.
fn check_weights(order: &QPOrder, weights: &[Rational]) -> Result<Option<(Subset, Subset)>> {
    if weights.len() != order.n {
        return Err(Error::DimensionMismatch { left: order.n, right: weights.len() });
    }
    let sums = subset_sums(&integer_weights(weights)?);
    let n = order.n;
    let mut ids: Vec<u64> = (0..(1u64 << n)).collect();
    ids.sort_by(|&a, &b| sums[a as usize].cmp(&sums[b as usize]).then(a.cmp(&b)));
    for pair in ids.windows(2) {
        let (x, y) = (pair[0], pair[1]);
        let by_weight = sums[x as usize].cmp(&sums[y as usize]);
        let by_order = order.rank[x as usize].cmp(&order.rank[y as usize]);
        if by_weight != by_order {
            return Ok(Some((Subset::from_bits_unchecked(n, x), Subset::from_bits_unchecked(n, y))));
        }
    }
    Ok(None)
}

/// Breaks ties of the order induced by `weights`: among tied subsets,
/// `A` stays below-or-equal to `B` iff `χ(B, A)` is kept in `keep`.
///
/// `keep` must consist of tie vectors, contain `s` or `−s` for every tie
/// vector `s`, and be closed under restricted sum. Closure is checked over
/// pairs in the caller's order, so the first offending pair is reported.
pub fn untie(order: &QPOrder, weights: &[Rational], keep: &[TernaryVector]) -> Result<QPOrder> {
    if let Some((a, b)) = check_weights(order, weights)? {
        return Err(UntieError::WeightsDisagree { a, b }.into());
    }
    let s = hyperplane_vectors(order);
    let s_set: FxHashSet<TernaryVector> = s.iter().copied().collect();
    let mut kept: Vec<TernaryVector> = Vec::with_capacity(keep.len());
    let mut kept_set = FxHashSet::default();
    for x in keep {
        if x.n() != order.n {
            return Err(Error::DimensionMismatch { left: order.n, right: x.n() });
        }
        if !s_set.contains(x) {
            return Err(UntieError::NotInHyperplane { x: *x }.into());
        }
        if kept_set.insert(*x) {
            kept.push(*x);
        }
    }
    for (i, x) in kept.iter().enumerate() {
        for y in &kept[i + 1..] {
            if let Some(sum) = x.restricted_sum(y) {
                if !sum.is_zero() && !kept_set.contains(&sum) {
                    return Err(UntieError::NotClosed { x: *x, y: *y, sum }.into());
                }
            }
        }
    }
    if let Some(missing) = s.iter().find(|v| !kept_set.contains(v) && !kept_set.contains(&v.neg())) {
        return Err(UntieError::MissingPair { s: *missing }.into());
    }

    let mut classes = Vec::with_capacity(order.classes.len());
    for class in &order.classes {
        if class.len() == 1 {
            classes.push(class.clone());
            continue;
        }
        let below = |a: &Subset, b: &Subset| {
            a == b || kept_set.contains(&characteristic_vector(b, a).expect("same n"))
        };
        let score: FxHashMap<Subset, usize> = class
            .iter()
            .map(|a| (*a, class.iter().filter(|b| below(b, a)).count()))
            .collect();
        let mut members = class.clone();
        members.sort_by_key(|a| (score[a], *a));
        let mut group: Vec<Subset> = Vec::new();
        for a in members {
            if let Some(last) = group.last() {
                if score[last] != score[&a] {
                    classes.push(std::mem::take(&mut group));
                }
            }
            group.push(a);
        }
        classes.push(group);
    }
    let result = QPOrder::from_classes(order.n, classes)?;
    if order.n <= crate::cone::MAX_CONE_ATOMS {
        let report = qp_axiom_report(&result)?;
        if !report.holds() {
            return Err(UntieError::NotACone { report: Box::new(report) }.into());
        }
    }
    Ok(result)
}

/// Searches for a valid `keep` set for [`untie`] that contains `required`.
///
/// Tie vectors are taken in pairs `{s, −s}`; the search picks one member of
/// each pair, preferring the member listed in `required`, otherwise the
/// member with the larger base-3 index first, backtracking on closure
/// failures. Returns `None` when no choice works.
pub fn find_untie_set(
    order: &QPOrder,
    weights: &[Rational],
    required: &[TernaryVector],
) -> Result<Option<Vec<TernaryVector>>> {
    const MAX_FREE_PAIRS: usize = 40;
    if let Some((a, b)) = check_weights(order, weights)? {
        return Err(UntieError::WeightsDisagree { a, b }.into());
    }
    let s = hyperplane_vectors(order);
    let s_set: FxHashSet<TernaryVector> = s.iter().copied().collect();
    for x in required {
        if !s_set.contains(x) {
            return Err(UntieError::NotInHyperplane { x: *x }.into());
        }
    }
    let required_set: FxHashSet<TernaryVector> = required.iter().copied().collect();
    if required.iter().any(|x| required_set.contains(&x.neg())) {
        return Ok(None);
    }
    // One representative per pair: the member with the larger index.
    let ix = TernaryIndex::new(order.n.min(16));
    let mut pairs: Vec<TernaryVector> = s
        .iter()
        .copied()
        .filter(|v| ix.index(v) > ix.index(&v.neg()))
        .filter(|v| !required_set.contains(v) && !required_set.contains(&v.neg()))
        .collect();
    pairs.sort_by_key(|v| std::cmp::Reverse(ix.index(v)));
    if pairs.len() > MAX_FREE_PAIRS {
        return Err(Error::TooLarge { n: pairs.len(), limit: MAX_FREE_PAIRS, what: "free tie pairs in untie search" });
    }

    let mut chosen: Vec<TernaryVector> = required.to_vec();
    let mut chosen_set: FxHashSet<TernaryVector> = required_set.clone();
    // The required vectors must already be consistent among themselves.
    if !consistent_with(&chosen, &chosen_set, &s_set, chosen.len()) {
        return Ok(None);
    }
    if extend(&pairs, 0, &mut chosen, &mut chosen_set, &s_set) {
        Ok(Some(chosen))
    } else {
        Ok(None)
    }
}

/// Checks every pair involving the members from `from` onwards: a defined
/// nonzero sum that is a tie vector must not have been rejected.
fn consistent_with(
    chosen: &[TernaryVector],
    chosen_set: &FxHashSet<TernaryVector>,
    s_set: &FxHashSet<TernaryVector>,
    from: usize,
) -> bool {
    let start = if from == chosen.len() { 0 } else { from };
    for j in start..chosen.len() {
        for i in 0..chosen.len() {
            if i == j {
                continue;
            }
            if let Some(sum) = chosen[i].restricted_sum(&chosen[j]) {
                if sum.is_zero() || chosen_set.contains(&sum) {
                    continue;
                }
                // sum is always a tie vector here; reject once its negation
                // has been chosen instead.
                debug_assert!(s_set.contains(&sum));
                if chosen_set.contains(&sum.neg()) {
                    return false;
                }
            }
        }
    }
    true
}

fn closed(chosen: &[TernaryVector], chosen_set: &FxHashSet<TernaryVector>) -> bool {
    chosen.iter().enumerate().all(|(i, x)| {
        chosen[i + 1..].iter().all(|y| match x.restricted_sum(y) {
            Some(sum) => sum.is_zero() || chosen_set.contains(&sum),
            None => true,
        })
    })
}

fn extend(
    pairs: &[TernaryVector],
    at: usize,
    chosen: &mut Vec<TernaryVector>,
    chosen_set: &mut FxHashSet<TernaryVector>,
    s_set: &FxHashSet<TernaryVector>,
) -> bool {
    if at == pairs.len() {
        return closed(chosen, chosen_set);
    }
    for candidate in [pairs[at], pairs[at].neg()] {
        chosen.push(candidate);
        chosen_set.insert(candidate);
        if consistent_with(chosen, chosen_set, s_set, chosen.len() - 1)
            && extend(pairs, at + 1, chosen, chosen_set, s_set)
        {
            return true;
        }
        chosen_set.remove(&candidate);
        chosen.pop();
    }
    false
}
