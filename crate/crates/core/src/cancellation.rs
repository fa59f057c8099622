//! Searches for violations of the cancellation conditions `CC_k` (orders)
//! and `CC_k*` (complexes), and transform shortening via compatible pairs.

use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::complex::{FaceOracle, SimplicialComplex};
use crate::cone::DiscreteCone;
use crate::error::{Error, Result};
use crate::order::{cone_of, QPOrder};
use crate::packed::{dominated, high_bits, nibble, spread, Packed, FLAG, MAX_PACKED_ATOMS};
use crate::subset::{full_mask, Subset};
use crate::ternary::TernaryVector;
use crate::transform::{is_compatible, TradingTransform};

/// Largest `k` the packed column sums support.
pub const MAX_K: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchLimits {
    /// Largest transform length accepted.
    pub max_k: usize,
    /// Sets larger than this are left out of the search; a search that
    /// dropped sets and found nothing is inconclusive.
    pub max_set_size: usize,
    /// Work units (states visited) before giving up as inconclusive.
    pub node_budget: u64,
    /// Seed for sampled searches.
    pub deterministic_seed: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_k: MAX_K, max_set_size: 64, node_budget: 200_000_000, deterministic_seed: 0 }
    }
}

impl SearchLimits {
    pub fn validate(&self) -> Result<()> {
        if self.max_k == 0 || self.max_set_size == 0 || self.node_budget == 0 {
            return Err(Error::Precondition("search limits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Violation { witness: TradingTransform },
    None,
    Inconclusive { reason: String },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&TradingTransform> {
        match self {
            SearchOutcome::Violation { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, SearchOutcome::Violation { .. })
    }

    pub fn is_none(&self) -> bool {
        matches!(self, SearchOutcome::None)
    }
}

struct Budget {
    left: u64,
}

struct Exhausted;

impl Budget {
    fn spend(&mut self, units: u64) -> std::result::Result<(), Exhausted> {
        if self.left < units {
            self.left = 0;
            Err(Exhausted)
        } else {
            self.left -= units;
            Ok(())
        }
    }
}

fn check_k(k: usize, limits: &SearchLimits) -> Result<()> {
    limits.validate()?;
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k}, need k ≥ 2")));
    }
    if k > limits.max_k || k > MAX_K {
        return Err(Error::Precondition(format!(
            "k = {k} exceeds the limit {}",
            limits.max_k.min(MAX_K)
        )));
    }
    Ok(())
}

/// Distinct column sums of `j`-multisets from `items`, for `j = 0..=k`.
fn sum_layers(items: &[Packed], k: usize, budget: &mut Budget) -> std::result::Result<Vec<Vec<Packed>>, Exhausted> {
    let mut layers: Vec<Vec<Packed>> = vec![vec![0]];
    for _ in 0..k {
        let prev = layers.last().expect("nonempty");
        budget.spend((prev.len() * items.len()) as u64)?;
        let mut next = FxHashSet::default();
        for &p in prev {
            for &e in items {
                next.insert(p + e);
            }
        }
        let mut next: Vec<Packed> = next.into_iter().collect();
        next.sort_unstable();
        layers.push(next);
    }
    Ok(layers)
}

/// The elements of `set` not dominating another element.
fn minimal_elements(set: &[Packed], high: Packed) -> Vec<Packed> {
    let mut sorted = set.to_vec();
    // Anything strictly below p has a smaller coordinate total.
    sorted.sort_by_key(|&p| (coordinate_total(p), p));
    let mut out: Vec<Packed> = Vec::new();
    for p in sorted {
        if !out.iter().any(|&m| dominated(m, p, high)) {
            out.push(p);
        }
    }
    out
}

fn coordinate_total(p: Packed) -> u32 {
    (0..32).map(|i| nibble(p, i)).sum()
}

/// Answers "is `c` above some element of `floor`?" for many `c`.
enum UpSet {
    /// Dense table over all vectors with coordinates `0..=k`.
    Dense { n: usize, radix: usize, table: Vec<u64> },
    List { floor: Vec<Packed>, high: Packed },
}

impl UpSet {
    /// `floor` holds vectors with coordinates at most `k`.
    fn build(n: usize, k: usize, floor: &[Packed], high: Packed, budget: &mut Budget) -> std::result::Result<Self, Exhausted> {
        const DENSE_LIMIT: usize = 1 << 22;
        let radix = k + 1;
        let size = radix.checked_pow(n as u32).filter(|&s| s <= DENSE_LIMIT);
        match size {
            Some(size) => {
                budget.spend((size * n + floor.len()) as u64)?;
                let mut table = vec![0u64; size.div_ceil(64)];
                let encode = |p: Packed| {
                    (0..n).rev().fold(0usize, |acc, i| acc * radix + nibble(p, i) as usize)
                };
                let get = |t: &Vec<u64>, i: usize| t[i >> 6] >> (i & 63) & 1 == 1;
                for &m in floor {
                    let i = encode(m);
                    table[i >> 6] |= 1 << (i & 63);
                }
                let mut strides = vec![1usize; n];
                for i in 1..n {
                    strides[i] = strides[i - 1] * radix;
                }
                for idx in 0..size {
                    if get(&table, idx) {
                        continue;
                    }
                    let up = (0..n).any(|i| (idx / strides[i]) % radix > 0 && get(&table, idx - strides[i]));
                    if up {
                        table[idx >> 6] |= 1 << (idx & 63);
                    }
                }
                Ok(UpSet::Dense { n, radix, table })
            }
            None => {
                // Quadratic in the worst case; charge for it up front.
                budget.spend((floor.len() as u64).saturating_mul(floor.len() as u64))?;
                Ok(UpSet::List { floor: minimal_elements(floor, high), high })
            }
        }
    }

    fn contains(&self, c: Packed) -> bool {
        match self {
            UpSet::Dense { n, radix, table } => {
                let idx = (0..*n).rev().fold(0usize, |acc, i| acc * radix + nibble(c, i) as usize);
                table[idx >> 6] >> (idx & 63) & 1 == 1
            }
            UpSet::List { floor, high } => floor.iter().any(|&d| dominated(d, c, *high)),
        }
    }
}

/// Searches for `(A_1..A_k; B_1..B_k)`, a trading transform with every
/// `A_i` a face and every `B_i` a non-face.
///
/// A violation exists iff one exists with every `A_i` a maximal face and
/// every `B_i` containing a minimal non-face; the search therefore combines
/// `k`-sums of maximal faces with `k`-sums of minimal non-faces, then builds
/// the witness: the lexicographically first multiset of maximal faces that
/// admits a completion, paired with the lexicographically first multiset
/// of non-faces completing it.
pub fn find_cck_star_violation(complex: &SimplicialComplex, k: usize, limits: &SearchLimits) -> Result<SearchOutcome> {
    check_k(k, limits)?;
    let n = complex.n();
    if n > MAX_PACKED_ATOMS {
        return Err(Error::TooLarge { n, limit: MAX_PACKED_ATOMS, what: "cancellation search" });
    }
    let mut truncated = false;
    let mut keep = |s: &Subset| {
        let ok = s.len() <= limits.max_set_size;
        truncated |= !ok;
        ok
    };
    let maximal: Vec<Subset> = complex.maximal_faces().into_iter().filter(&mut keep).collect();
    let minimal: Vec<Subset> = complex.minimal_nonfaces().into_iter().filter(&mut keep).collect();
    let nonfaces: Vec<Subset> = if maximal.is_empty() || minimal.is_empty() {
        Vec::new()
    } else {
        complex.nonfaces().filter(|s| s.len() <= limits.max_set_size).collect()
    };
    let mut budget = Budget { left: limits.node_budget };
    let outcome = star_search(n, k, &maximal, &minimal, &nonfaces, &mut budget);
    Ok(finish(outcome, truncated, |t| {
        t.left().iter().all(|a| complex.contains(a)) && t.right().iter().all(|b| !complex.contains(b))
    }))
}

fn finish(
    outcome: std::result::Result<Option<TradingTransform>, Exhausted>,
    truncated: bool,
    valid: impl Fn(&TradingTransform) -> bool,
) -> SearchOutcome {
    match outcome {
        Err(Exhausted) => SearchOutcome::Inconclusive { reason: "node budget exhausted".into() },
        Ok(Some(witness)) => {
            assert!(valid(&witness), "search produced an invalid witness");
            SearchOutcome::Violation { witness }
        }
        Ok(None) if truncated => SearchOutcome::Inconclusive {
            reason: "sets above the size limit were excluded".into(),
        },
        Ok(None) => SearchOutcome::None,
    }
}

fn star_search(
    n: usize,
    k: usize,
    maximal: &[Subset],
    minimal: &[Subset],
    nonfaces: &[Subset],
    budget: &mut Budget,
) -> std::result::Result<Option<TradingTransform>, Exhausted> {
    if maximal.is_empty() || minimal.is_empty() {
        return Ok(None);
    }
    let high = high_bits(n);
    let minimal_enc: Vec<Packed> = minimal.iter().map(|s| spread(s.bits())).collect();
    let floors = sum_layers(&minimal_enc, k, budget)?;
    let up = UpSet::build(n, k, &floors[k], high, budget)?;

    // Left side: k-multisets of maximal faces in lexicographic order,
    // deduplicated by column sum.
    let mut items: Vec<Subset> = maximal.to_vec();
    items.sort();
    let enc: Vec<Packed> = items.iter().map(|s| spread(s.bits())).collect();
    let mut seen = vec![FxHashSet::default(); k + 1];
    let mut stack = Vec::with_capacity(k);
    let Some(target) = first_left(&enc, k, 0, 0, &mut stack, &mut seen, &up, budget)? else {
        return Ok(None);
    };
    let left: Vec<Subset> = stack.iter().map(|&i| items[i]).collect();

    // Right side: lexicographically first k-multiset of non-faces summing
    // to the target, pruned by whether the remainder can still be covered.
    let coverable_sets =
        floors.iter().enumerate().map(|(j, f)| UpSet::build(n, j, f, high, budget)).collect::<std::result::Result<Vec<_>, _>>()?;
    let mut right_items: Vec<Subset> = nonfaces.to_vec();
    right_items.sort();
    let right_enc: Vec<Packed> = right_items.iter().map(|s| spread(s.bits())).collect();
    let mut right = Vec::with_capacity(k);
    let found = first_right(&right_enc, &coverable_sets, k, target, 0, &mut right, high, n, budget)?;
    assert!(found, "a completion exists by construction");
    let right: Vec<Subset> = right.iter().map(|&i| right_items[i]).collect();
    Ok(Some(TradingTransform::new(left, right).expect("column sums match")))
}

#[allow(clippy::too_many_arguments)]
fn first_left(
    enc: &[Packed],
    k: usize,
    start: usize,
    sum: Packed,
    stack: &mut Vec<usize>,
    seen: &mut [FxHashSet<(Packed, usize)>],
    up: &UpSet,
    budget: &mut Budget,
) -> std::result::Result<Option<Packed>, Exhausted> {
    let depth = stack.len();
    if depth == k {
        return Ok(up.contains(sum).then_some(sum));
    }
    // Different prefixes with equal sums lead to identical subtrees.
    if !seen[depth].insert((sum, start)) {
        return Ok(None);
    }
    for i in start..enc.len() {
        budget.spend(1)?;
        stack.push(i);
        if let Some(t) = first_left(enc, k, i, sum + enc[i], stack, seen, up, budget)? {
            return Ok(Some(t));
        }
        stack.pop();
    }
    Ok(None)
}

/// Can `rest` be written as the column sum of `j` non-faces? True iff
/// every coordinate is at most `j` and `rest` dominates a sum of `j`
/// minimal non-faces.
fn coverable(rest: Packed, j: usize, floors: &[UpSet], n: usize) -> bool {
    (0..n).all(|i| nibble(rest, i) as usize <= j) && floors[j].contains(rest)
}

#[allow(clippy::too_many_arguments)]
fn first_right(
    enc: &[Packed],
    floors: &[UpSet],
    k: usize,
    rest: Packed,
    start: usize,
    chosen: &mut Vec<usize>,
    high: Packed,
    n: usize,
    budget: &mut Budget,
) -> std::result::Result<bool, Exhausted> {
    let remaining = k - chosen.len();
    if remaining == 0 {
        return Ok(rest == 0);
    }
    for i in start..enc.len() {
        budget.spend(1)?;
        let e = enc[i];
        if !dominated(e, rest, high) {
            continue;
        }
        let next = rest - e;
        if !coverable(next, remaining - 1, floors, n) {
            continue;
        }
        chosen.push(i);
        if first_right(enc, floors, k, next, i, chosen, high, n, budget)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// `CC_k*` search for a complex known only through a membership oracle,
/// restricted to the caller's candidate sets: left sets are the candidate
/// faces, right sets the candidate non-faces. Finding nothing is always
/// inconclusive, since other sets were not examined.
pub fn find_cck_star_violation_among(
    oracle: &dyn FaceOracle,
    candidates: &[Subset],
    k: usize,
    limits: &SearchLimits,
) -> Result<SearchOutcome> {
    check_k(k, limits)?;
    let n = oracle.atoms();
    if n > MAX_PACKED_ATOMS {
        return Err(Error::TooLarge { n, limit: MAX_PACKED_ATOMS, what: "cancellation search" });
    }
    let mut faces = Vec::new();
    let mut nonfaces = Vec::new();
    for c in candidates {
        if c.n() != n {
            return Err(Error::DimensionMismatch { left: n, right: c.n() });
        }
        if c.len() > limits.max_set_size {
            continue;
        }
        if oracle.is_face(c) {
            faces.push(*c);
        } else {
            nonfaces.push(*c);
        }
    }
    faces.sort();
    faces.dedup();
    nonfaces.sort();
    nonfaces.dedup();
    let mut budget = Budget { left: limits.node_budget };
    let face_enc: Vec<Packed> = faces.iter().map(|s| spread(s.bits())).collect();
    let non_enc: Vec<Packed> = nonfaces.iter().map(|s| spread(s.bits())).collect();
    let outcome = (|| {
        let layers = exact_layers(&non_enc, k, &mut budget)?;
        let targets: FxHashSet<Packed> = layers[k].iter().copied().collect();
        let mut stack = Vec::new();
        let mut seen = vec![FxHashSet::default(); k + 1];
        let Some(target) = first_exact(&face_enc, k, 0, 0, &mut stack, &mut seen, &targets, &mut budget)? else {
            return Ok(None);
        };
        let left: Vec<Subset> = stack.iter().map(|&i| faces[i]).collect();
        let mut right = Vec::new();
        let found = first_exact_right(&non_enc, &layers, k, target, 0, &mut right, high_bits(n), &mut budget)?;
        assert!(found);
        let right = right.iter().map(|&i| nonfaces[i]).collect();
        Ok(Some(TradingTransform::new(left, right).expect("column sums match")))
    })();
    Ok(match finish(outcome, false, |t| {
        t.left().iter().all(|a| oracle.is_face(a)) && t.right().iter().all(|b| !oracle.is_face(b))
    }) {
        SearchOutcome::None => SearchOutcome::Inconclusive {
            reason: "only the supplied candidate sets were searched".into(),
        },
        other => other,
    })
}

fn exact_layers(items: &[Packed], k: usize, budget: &mut Budget) -> std::result::Result<Vec<FxHashSet<Packed>>, Exhausted> {
    Ok(sum_layers(items, k, budget)?.into_iter().map(|l| l.into_iter().collect()).collect())
}

#[allow(clippy::too_many_arguments)]
fn first_exact(
    enc: &[Packed],
    k: usize,
    start: usize,
    sum: Packed,
    stack: &mut Vec<usize>,
    seen: &mut [FxHashSet<(Packed, usize)>],
    targets: &FxHashSet<Packed>,
    budget: &mut Budget,
) -> std::result::Result<Option<Packed>, Exhausted> {
    let depth = stack.len();
    if depth == k {
        return Ok(targets.contains(&sum).then_some(sum));
    }
    if !seen[depth].insert((sum, start)) {
        return Ok(None);
    }
    for i in start..enc.len() {
        budget.spend(1)?;
        stack.push(i);
        if let Some(t) = first_exact(enc, k, i, sum + enc[i], stack, seen, targets, budget)? {
            return Ok(Some(t));
        }
        stack.pop();
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn first_exact_right(
    enc: &[Packed],
    layers: &[FxHashSet<Packed>],
    k: usize,
    rest: Packed,
    start: usize,
    chosen: &mut Vec<usize>,
    high: Packed,
    budget: &mut Budget,
) -> std::result::Result<bool, Exhausted> {
    let remaining = k - chosen.len();
    if remaining == 0 {
        return Ok(rest == 0);
    }
    for i in start..enc.len() {
        budget.spend(1)?;
        let e = enc[i];
        if !dominated(e, rest, high) {
            continue;
        }
        let next = rest - e;
        if !layers[remaining - 1].contains(&next) {
            continue;
        }
        chosen.push(i);
        if first_exact_right(enc, layers, k, next, i, chosen, high, budget)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// Searches for a `CC_k` violation of an order: pairs `A_i ⪯ B_i`, at least
/// one strict, forming a trading transform.
///
/// Equivalently, `k` cone vectors `x_i = χ(B_i, A_i)` (zero allowed) summing
/// to zero with some `−x_i` outside the cone. The witness is built from the
/// lexicographically first such multiset in base-3 index order, with
/// `A_i` and `B_i` the negative and positive parts of `x_i`.
pub fn find_cck_violation(order: &QPOrder, k: usize, limits: &SearchLimits) -> Result<SearchOutcome> {
    check_k(k, limits)?;
    let cone = cone_of(order)?;
    let mut budget = Budget { left: limits.node_budget };
    let outcome = cone_zero_sum(&cone, k, &mut budget);
    Ok(finish(outcome, false, |t| {
        t.pairs().all(|(a, b)| order.leq(&a, &b)) && t.pairs().any(|(a, b)| order.lt(&a, &b))
    }))
}

fn cone_zero_sum(cone: &DiscreteCone, k: usize, budget: &mut Budget) -> std::result::Result<Option<TradingTransform>, Exhausted> {
    let n = cone.n();
    let ones = spread(full_mask(n));
    let vectors = cone.vectors();
    let encode = |x: &TernaryVector| -> Packed {
        let e = ones + spread(x.pos_mask()) - spread(x.neg_mask());
        if cone.contains(&x.neg()) {
            e
        } else {
            e | FLAG
        }
    };
    let enc: Vec<Packed> = vectors.iter().map(encode).collect();
    let add = |p: Packed, e: Packed| ((p & !FLAG) + (e & !FLAG)) | ((p | e) & FLAG);

    // Forward layers of reachable (sum, flag) states.
    let mut layers: Vec<FxHashSet<Packed>> = vec![std::iter::once(0).collect()];
    for _ in 0..k {
        let prev = layers.last().expect("nonempty");
        budget.spend((prev.len() * enc.len()) as u64)?;
        let mut next = FxHashSet::default();
        for &p in prev {
            for &e in &enc {
                next.insert(add(p, e));
            }
        }
        layers.push(next);
    }
    let target = (ones * k as Packed) | FLAG;
    if !layers[k].contains(&target) {
        return Ok(None);
    }
    // good[j]: layer-j states that can still reach the target.
    let mut good: Vec<FxHashSet<Packed>> = vec![FxHashSet::default(); k + 1];
    good[k].insert(target);
    for j in (0..k).rev() {
        budget.spend((layers[j].len() * enc.len()) as u64)?;
        let next = &good[j + 1];
        good[j] = layers[j]
            .iter()
            .copied()
            .filter(|&p| enc.iter().any(|&e| next.contains(&add(p, e))))
            .collect();
    }
    let mut picks = Vec::with_capacity(k);
    let mut state: Packed = 0;
    let mut start = 0;
    for j in 0..k {
        let i = (start..enc.len())
            .find(|&i| good[j + 1].contains(&add(state, enc[i])))
            .expect("good states extend");
        // An index below the previous pick cannot extend: it would have
        // been picked earlier.
        picks.push(i);
        state = add(state, enc[i]);
        start = i;
    }
    debug_assert_eq!(state, target);
    let (left, right): (Vec<Subset>, Vec<Subset>) = picks
        .iter()
        .map(|&i| (vectors[i].negative_part(), vectors[i].positive_part()))
        .unzip();
    Ok(Some(TradingTransform::new(left, right).expect("vectors sum to zero")))
}

/// Shortens a transform with `A_i ≺ B_j` for all `i, j` using the first
/// compatible pair `(A_i, B_k), (A_j, B_l)`: those two pairs are replaced by
/// `(Ā_i ∪ Ā_j, B̄_k ∪ B̄_l)` where `Ā_i = A_i ∖ B_k`, `B̄_k = B_k ∖ A_i`,
/// and likewise for `j, l`; the other pairs keep their relative order.
pub fn reduce_transform(t: &TradingTransform, order: &QPOrder) -> Result<Option<TradingTransform>> {
    let s = t.len();
    if s < 2 {
        return Err(Error::Precondition("transform needs at least two pairs".into()));
    }
    if t.n() != Some(order.n()) {
        return Err(Error::DimensionMismatch { left: order.n(), right: t.n().unwrap_or(0) });
    }
    let top_left = t.left().iter().map(|a| order.rank_of(a)).max().expect("nonempty");
    let bottom_right = t.right().iter().map(|b| order.rank_of(b)).min().expect("nonempty");
    if top_left >= bottom_right {
        return Err(Error::Precondition("some left set is not strictly below every right set".into()));
    }
    let (a, b) = (t.left(), t.right());
    for i in 0..s {
        for j in (i + 1)..s {
            for kk in 0..s {
                for l in 0..s {
                    if kk == l || !is_compatible((a[i], b[kk]), (a[j], b[l]))? {
                        continue;
                    }
                    let ai = a[i].difference(&b[kk]);
                    let bk = b[kk].difference(&a[i]);
                    let aj = a[j].difference(&b[l]);
                    let bl = b[l].difference(&a[j]);
                    debug_assert!(ai.is_disjoint(&aj) && bk.is_disjoint(&bl));
                    let mut left = vec![ai.union(&aj)];
                    let mut right = vec![bk.union(&bl)];
                    left.extend((0..s).filter(|&m| m != i && m != j).map(|m| a[m]));
                    right.extend((0..s).filter(|&r| r != kk && r != l).map(|r| b[r]));
                    return Ok(Some(TradingTransform::new(left, right).expect("balanced by construction")));
                }
            }
        }
    }
    Ok(None)
}
