//! A linear qualitative probability order on 26 atoms with a non-threshold
//! initial segment.
//!
//! Eight sets `A′_1..A′_4, B′_1..B′_4` forming a trading transform are
//! given equal weight `N` under a representable order on 26 atoms. Untying
//! them in the chain `A′_1 ⊏ … ⊏ A′_4 ⊏ B′_1 ⊏ … ⊏ B′_4` yields a linear
//! order whose initial segment below `B′_1` violates `CC_4*`. The 26-atom
//! complex is never materialized; membership is answered by weight
//! comparison plus a lookup for the tied sets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::cancellation::{find_cck_star_violation_among, SearchLimits};
use crate::complex::FaceOracle;
use crate::error::{Error, Result};
use crate::linalg::{eliminate, rank};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use crate::rational::{format_rational, integer, serde_rational, serde_rational_vec, Rational};
use crate::subset::Subset;
use crate::ternary::{characteristic_vector, TernaryVector};
use crate::transform::{is_compatible, is_trading_transform};

pub const BASE_ATOMS: usize = 18;
pub const ATOMS: usize = 26;
const ROWS: usize = 8;
/// Coefficients of the weight solution: `N`, `K`, then `w_1..w_18`.
const BASIS: usize = 2 + BASE_ATOMS;
const RADIX: i64 = 201;
/// Fact enumerations run over `[−BOX, BOX]` per free coefficient.
const BOX: i32 = 5;

/// A zero-one column of height 8.
pub type Column = [u8; ROWS];

/// The 36 zero-one columns with two ones among the first four entries and
/// two among the last four, split into 18 complementary pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct USet {
    pairs: Vec<(Column, Column)>,
}

impl USet {
    /// Pairs `(x, x̄)` with `x` lexicographically smaller, sorted by `x`.
    pub fn pairs(&self) -> &[(Column, Column)] {
        &self.pairs
    }

    pub fn vectors(&self) -> Vec<Column> {
        let mut all: Vec<Column> = self.pairs.iter().flat_map(|&(x, y)| [x, y]).collect();
        all.sort();
        all
    }

    pub fn len(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, c: &Column) -> bool {
        self.pairs.iter().any(|(x, y)| x == c || y == c)
    }

    fn pair_of(&self, c: &Column) -> Option<usize> {
        self.pairs.iter().position(|(x, y)| x == c || y == c)
    }
}

pub fn complement(c: &Column) -> Column {
    c.map(|v| 1 - v)
}

pub fn build_u_set() -> USet {
    let mut pairs = Vec::new();
    for bits in 0u16..256 {
        let c: Column = std::array::from_fn(|i| ((bits >> (ROWS - 1 - i)) & 1) as u8);
        let top: u8 = c[..4].iter().sum();
        let bottom: u8 = c[4..].iter().sum();
        if top == 2 && bottom == 2 && c < complement(&c) {
            pairs.push((c, complement(&c)));
        }
    }
    USet { pairs }
}

/// The 18 columns of `M`: bit `i` of `selector` picks the larger member of
/// pair `i` instead of the smaller one.
pub fn choose_m(selector: u32) -> Result<Vec<Column>> {
    if selector >> BASE_ATOMS != 0 {
        return Err(Error::Precondition(format!("selector {selector:#x} has more than 18 bits")));
    }
    Ok(build_u_set()
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| if selector >> i & 1 == 0 { x } else { y })
        .collect())
}

/// `w_i = 201^{i−1} / 201^{17}`: every integer combination with
/// coefficients of absolute value at most 100 vanishes only when trivial.
pub fn default_base_weights() -> Vec<Rational> {
    let denom = BigInt::from(RADIX).pow(BASE_ATOMS as u32 - 1);
    (0..BASE_ATOMS)
        .map(|i| Rational::new(BigInt::from(RADIX).pow(i as u32), denom.clone()))
        .collect()
}

/// The `J` block: row `r` has its one in column `r − 1 (mod 4)`.
fn j_block(r: usize, c: usize) -> u8 {
    u8::from(c == (r + 3) % 4)
}

/// Coefficient matrix of the equal-weight system for `w_19..w_26`.
pub fn system_matrix() -> Vec<Vec<Rational>> {
    (0..ROWS)
        .map(|r| {
            (0..ROWS)
                .map(|c| {
                    let v = if c < 4 {
                        if r < 4 { u8::from(r == c) } else { j_block(r - 4, c) }
                    } else {
                        u8::from(r % 4 == c - 4)
                    };
                    integer(v.into())
                })
                .collect()
        })
        .collect()
}

/// Expresses `w_19..w_26` over `(N, K, w_1..w_18)` by solving the
/// equal-weight system together with `w_26 = K`.
pub fn weight_coefficients(m: &[Vec<u8>]) -> Result<Vec<Vec<Rational>>> {
    let p = system_matrix();
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(ROWS + 1);
    for (r, prow) in p.iter().enumerate() {
        let mut row = prow.clone();
        row.push(Rational::one());
        row.push(Rational::zero());
        row.extend(m[r].iter().map(|&v| integer(-i64::from(v))));
        rows.push(row);
    }
    let mut pin = vec![Rational::zero(); ROWS + BASIS];
    pin[ROWS - 1] = Rational::one();
    pin[ROWS + 1] = Rational::one();
    rows.push(pin);
    if eliminate(&mut rows, ROWS) != ROWS {
        return Err(Error::Precondition("equal-weight system with w_26 = K is singular".into()));
    }
    if rows[ROWS].iter().any(|v| !v.is_zero()) {
        return Err(Error::Precondition("equal-weight system is inconsistent".into()));
    }
    Ok(rows[..ROWS].iter().map(|r| r[ROWS..].to_vec()).collect())
}

/// Sets with exactly the atoms where `row` is 1.
fn row_set(row: &[u8]) -> Subset {
    let bits = row.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | (u64::from(v & 1) << i));
    Subset::new(row.len(), bits).expect("row length is at most 26")
}

fn weight_of(w: &[Rational], s: &Subset) -> Rational {
    s.atoms().fold(Rational::zero(), |acc, a| acc + &w[a - 1])
}

/// A solved construction: the matrices, all 26 weights, `N`, `K` and the
/// 28 vectors `X′` that the untied order adds on top of the weight order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub selector: u32,
    /// Rows are `χ(A_1)..χ(A_4), χ(B_1)..χ(B_4)` over `[18]`.
    pub m: Vec<Vec<u8>>,
    /// Rows are `χ(A′_1)..χ(A′_4), χ(B′_1)..χ(B′_4)` over `[26]`.
    pub m_prime: Vec<Vec<u8>>,
    #[serde(with = "serde_rational_vec")]
    pub weights: Vec<Rational>,
    #[serde(rename = "N", with = "serde_rational")]
    pub n_weight: Rational,
    #[serde(rename = "K", with = "serde_rational")]
    pub k_weight: Rational,
    /// `χ(C, D)` for extended sets `C` later than `D` in the chain.
    pub xprime: Vec<TernaryVector>,
}

impl Construction {
    pub fn build(selector: u32) -> Result<Construction> {
        let columns = choose_m(selector)?;
        let m: Vec<Vec<u8>> = (0..ROWS).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
        let m_prime = extend_rows(&m);
        let base = default_base_weights();
        let k_weight = base.iter().sum::<Rational>() * integer(1000);
        let n_weight = &k_weight * integer(1000);
        let coefficients = weight_coefficients(&m)?;
        let mut weights = base.clone();
        for row in &coefficients {
            weights.push(evaluate(row, &n_weight, &k_weight, &base));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::Precondition(format!("w_{} = {} is not positive", i + 1, format_rational(&weights[i]))));
        }
        let sets: Vec<Subset> = m_prime.iter().map(|r| row_set(r)).collect();
        for (i, s) in sets.iter().enumerate() {
            let w = weight_of(&weights, s);
            if w != n_weight {
                return Err(Error::Precondition(format!("extended set {} {s} weighs {} instead of N", i + 1, format_rational(&w))));
            }
        }
        let xprime = chain_vectors(&sets);
        Ok(Construction { selector, m, m_prime, weights, n_weight, k_weight, xprime })
    }

    /// `A_1..A_4, B_1..B_4` over `[18]`.
    pub fn base_sets(&self) -> Vec<Subset> {
        self.m.iter().map(|r| row_set(r)).collect()
    }

    /// `A′_1..A′_4, B′_1..B′_4` over `[26]`, in chain order.
    pub fn sets(&self) -> Vec<Subset> {
        self.m_prime.iter().map(|r| row_set(r)).collect()
    }

    pub fn weight(&self, s: &Subset) -> Rational {
        weight_of(&self.weights, s)
    }

    pub fn initial_segment(&self) -> InitialSegment {
        InitialSegment::new(self)
    }

    fn check_shape(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Shape(format!("construction: {what}")));
        if self.m.len() != ROWS || self.m.iter().any(|r| r.len() != BASE_ATOMS || r.iter().any(|&v| v > 1)) {
            return bad("M must be an 8×18 zero-one matrix");
        }
        if self.m_prime.len() != ROWS || self.m_prime.iter().any(|r| r.len() != ATOMS || r.iter().any(|&v| v > 1)) {
            return bad("M′ must be an 8×26 zero-one matrix");
        }
        if self.weights.len() != ATOMS {
            return bad("there must be 26 weights");
        }
        if self.xprime.iter().any(|x| x.n() != ATOMS) {
            return bad("X′ vectors must have 26 coordinates");
        }
        Ok(())
    }
}

fn extend_rows(m: &[Vec<u8>]) -> Vec<Vec<u8>> {
    (0..ROWS)
        .map(|r| {
            let mut row = m[r].clone();
            row.extend((0..4).map(|c| if r < 4 { u8::from(r == c) } else { j_block(r - 4, c) }));
            row.extend((0..4).map(|c| u8::from(r % 4 == c)));
            row
        })
        .collect()
}

fn evaluate(coefficients: &[Rational], n_weight: &Rational, k_weight: &Rational, base: &[Rational]) -> Rational {
    let mut total = &coefficients[0] * n_weight + &coefficients[1] * k_weight;
    for (c, w) in coefficients[2..].iter().zip(base) {
        total += c * w;
    }
    total
}

/// `χ(C, D)` for every `C` later than `D` in `sets`.
pub fn chain_vectors(sets: &[Subset]) -> Vec<TernaryVector> {
    let mut out = Vec::new();
    for later in 1..sets.len() {
        for earlier in 0..later {
            out.push(characteristic_vector(&sets[later], &sets[earlier]).expect("same ground set"));
        }
    }
    out
}

/// The initial segment `Δ(⊑, B′_1)` of the untied order, answered by
/// scaled integer weights.
#[derive(Clone, Debug)]
pub struct InitialSegment {
    weights: Vec<BigInt>,
    threshold: BigInt,
    boundary: Subset,
    tied_after: FxHashSet<TernaryVector>,
}

impl InitialSegment {
    fn new(c: &Construction) -> InitialSegment {
        let scale = c.weights.iter().chain([&c.n_weight]).fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let scaled = |w: &Rational| (w * Rational::from_integer(scale.clone())).to_integer();
        InitialSegment {
            weights: c.weights.iter().map(scaled).collect(),
            threshold: scaled(&c.n_weight),
            boundary: row_set(&c.m_prime[4]),
            tied_after: c.xprime.iter().copied().collect(),
        }
    }

    /// `X ∈ Δ` iff `w(X) < N`, or `w(X) = N` and `B′_1` comes after `X`.
    pub fn contains(&self, x: &Subset) -> bool {
        let w: BigInt = x.atoms().map(|a| &self.weights[a - 1]).sum();
        match w.cmp(&self.threshold) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => characteristic_vector(&self.boundary, x)
                .map(|v| self.tied_after.contains(&v))
                .unwrap_or(false),
        }
    }
}

impl FaceOracle for InitialSegment {
    fn atoms(&self) -> usize {
        ATOMS
    }

    fn is_face(&self, s: &Subset) -> bool {
        s.n() == ATOMS && self.contains(s)
    }
}

/// Membership in `Δ(⊑, B′_1)`. Builds the scaled weights on every call;
/// use [`Construction::initial_segment`] for repeated queries.
pub fn delta_membership(c: &Construction, x: &Subset) -> bool {
    c.initial_segment().contains(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub title: String,
    pub passed: bool,
    /// Summary when passed, a witness when not.
    pub detail: String,
}

impl Check {
    fn new(id: &str, title: &str, outcome: std::result::Result<String, String>) -> Check {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        Check { id: id.into(), title: title.into(), passed, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub conclusion: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type Outcome = std::result::Result<String, String>;

/// Runs the whole verification suite. Errors only on malformed shapes;
/// failed checks are reported with a witness.
pub fn verify_construction(c: &Construction) -> Result<VerificationReport> {
    c.check_shape()?;
    let base = BaseVectors::new(&c.base_sets());
    let ((weights, a), (b, cc)) = rayon::join(
        || (check_weights(c), check_transforms(c)),
        || (check_xprime(c), check_base_closure(&base)),
    );
    let ((d, e), (f, g)) = rayon::join(
        || (check_six_vectors(&base), check_weight_basis(c, &base)),
        || (check_facts(&base), check_general_form(&base)),
    );
    let h = check_witness(c);
    let checks = vec![
        Check::new("weights", "equal-weight system, positivity and genericity", weights),
        Check::new("a", "trading transforms and non-compatible cross pairs", a),
        Check::new("b", "X′ covers the ties, realizes the chain and is closed under restricted sum", b),
        Check::new("c", "restricted sums within X are chain compositions", cc),
        Check::new("d", "six difference vectors are independent", d),
        Check::new("e", "w_19..w_26 are independent over (N, K, w_1..w_18)", e),
        Check::new("f", "three-coefficient combinations in T^18", f),
        Check::new("g", "general five-coefficient combinations land in X ∪ −X", g),
        Check::new("h", "CC_4* witness on the initial segment below B′_1", h),
    ];
    let conclusion = if checks.iter().all(|ch| ch.passed) {
        "not threshold: the initial segment below B′_1 violates CC_4*".to_string()
    } else {
        "verification failed".to_string()
    };
    Ok(VerificationReport { checks, conclusion })
}

fn check_weights(c: &Construction) -> Outcome {
    let p_rank = rank(&system_matrix());
    if p_rank != 7 {
        return Err(format!("system matrix has rank {p_rank}, expected 7"));
    }
    let coefficients = weight_coefficients(&c.m).map_err(|e| e.to_string())?;
    let base = &c.weights[..BASE_ATOMS];
    for (r, row) in coefficients.iter().enumerate() {
        let expected = evaluate(row, &c.n_weight, &c.k_weight, base);
        if c.weights[BASE_ATOMS + r] != expected {
            return Err(format!(
                "w_{} = {} but the equal-weight system gives {}",
                BASE_ATOMS + r + 1,
                format_rational(&c.weights[BASE_ATOMS + r]),
                format_rational(&expected)
            ));
        }
    }
    if let Some(i) = c.weights.iter().position(|w| !w.is_positive()) {
        return Err(format!("w_{} = {} is not positive", i + 1, format_rational(&c.weights[i])));
    }
    if !(integer(126) < c.k_weight && c.k_weight < c.n_weight) {
        return Err(format!("need 126 < K < N, got K = {}, N = {}", format_rational(&c.k_weight), format_rational(&c.n_weight)));
    }
    for (i, s) in c.sets().iter().enumerate() {
        let w = c.weight(s);
        if w != c.n_weight {
            return Err(format!("extended set {} {s} weighs {}, not N", i + 1, format_rational(&w)));
        }
    }
    // Integer combinations with coefficients up to 100 stay nonzero when each
    // weight exceeds 100 times the sum of all smaller ones.
    let mut sorted = base.to_vec();
    sorted.sort();
    let mut prefix = Rational::zero();
    for w in &sorted {
        if *w <= &prefix * integer(100) {
            return Err(format!("base weight {} does not dominate 100 × {}", format_rational(w), format_rational(&prefix)));
        }
        prefix += w;
    }
    Ok(format!("rank 7 system, w_19..w_26 positive, eight sets weigh N = {}", format_rational(&c.n_weight)))
}

fn check_transforms(c: &Construction) -> Outcome {
    let u = build_u_set();
    let mut pairs_used = vec![false; u.pairs().len()];
    for col in 0..BASE_ATOMS {
        let column: Column = std::array::from_fn(|r| c.m[r][col]);
        match u.pair_of(&column) {
            None => return Err(format!("column {} of M is not in U", col + 1)),
            Some(p) if pairs_used[p] => return Err(format!("column {} of M repeats a complementary pair", col + 1)),
            Some(p) => pairs_used[p] = true,
        }
    }
    if c.m_prime != extend_rows(&c.m) {
        return Err("M′ does not have the identity/J block structure over M".into());
    }
    for (label, sets) in [("base", c.base_sets()), ("extended", c.sets())] {
        let (left, right) = sets.split_at(4);
        if !is_trading_transform(left, right).map_err(|e| e.to_string())? {
            return Err(format!("{label} sets do not form a trading transform"));
        }
        let extended = label == "extended";
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for m in 0..4 {
                        let distinct = if extended { i != k || j != m } else { i != k && j != m };
                        if distinct && is_compatible((left[i], right[j]), (left[k], right[m])).map_err(|e| e.to_string())? {
                            return Err(format!(
                                "{label} pairs ({}, {}) and ({}, {}) are compatible",
                                left[i], right[j], left[k], right[m]
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok("M takes one column from each of the 18 pairs of U; both transforms trade with no compatible cross pairs".into())
}

fn check_xprime(c: &Construction) -> Outcome {
    let sets = c.sets();
    let members: FxHashSet<TernaryVector> = c.xprime.iter().copied().collect();
    if members.len() != c.xprime.len() {
        return Err("X′ contains a repeated vector".into());
    }
    for later in 0..ROWS {
        for earlier in 0..later {
            let v = characteristic_vector(&sets[later], &sets[earlier]).expect("same ground set");
            match (members.contains(&v), members.contains(&v.neg())) {
                (false, false) => {
                    return Err(format!("tie {} ~ {} is covered by neither {v:?} nor its negation", sets[later], sets[earlier]));
                }
                (_, true) => {
                    return Err(format!("X′ contains χ({}, {}), putting set {} before set {}", sets[earlier], sets[later], later + 1, earlier + 1));
                }
                (true, false) => {}
            }
        }
    }
    if let Some(v) = c.xprime.iter().find(|v| !v.dot(&c.weights).is_zero()) {
        return Err(format!("{v:?} in X′ is off the weight hyperplane"));
    }
    if c.xprime.len() != ROWS * (ROWS - 1) / 2 {
        return Err(format!("X′ has {} vectors, expected 28", c.xprime.len()));
    }
    for u in &c.xprime {
        for v in &c.xprime {
            if let Some(s) = u.restricted_sum(v) {
                if !members.contains(&s) {
                    return Err(format!("{u:?} ⊕ {v:?} = {s:?} is not in X′"));
                }
            }
        }
    }
    Ok("28 vectors on the weight hyperplane, one per tied pair, ordered by the chain, closed under ⊕ (784 pairs)".into())
}

type V18 = [i32; BASE_ATOMS];

fn add(u: &V18, v: &V18) -> V18 {
    std::array::from_fn(|i| u[i] + v[i])
}

fn scale(a: i32, v: &V18) -> V18 {
    v.map(|x| a * x)
}

fn in_t(v: &V18) -> bool {
    v.iter().all(|x| x.abs() <= 1)
}

/// Characteristic vectors of the base sets and the set `X` of differences
/// `χ(C, D)` with `C` later than `D` in the chain.
struct BaseVectors {
    chi: Vec<V18>,
    x: FxHashMap<V18, (usize, usize)>,
}

impl BaseVectors {
    fn new(sets: &[Subset]) -> BaseVectors {
        let chi: Vec<V18> = sets
            .iter()
            .map(|s| std::array::from_fn(|i| i32::from(s.contains(i + 1))))
            .collect();
        let mut x = FxHashMap::default();
        for later in 1..chi.len() {
            for earlier in 0..later {
                x.entry(diff(&chi[later], &chi[earlier])).or_insert((later, earlier));
            }
        }
        BaseVectors { chi, x }
    }

    fn a(&self, i: usize) -> &V18 {
        &self.chi[i]
    }

    fn b(&self, j: usize) -> &V18 {
        &self.chi[4 + j]
    }

    /// `χ(B_j, A_i)`.
    fn ba(&self, j: usize, i: usize) -> V18 {
        diff(self.b(j), self.a(i))
    }

    /// `χ(A_i, A_p)`.
    fn aa(&self, i: usize, p: usize) -> V18 {
        diff(self.a(i), self.a(p))
    }

    fn in_x_or_neg(&self, v: &V18) -> bool {
        self.x.contains_key(v) || self.x.contains_key(&v.map(|e| -e))
    }
}

fn diff(u: &V18, v: &V18) -> V18 {
    std::array::from_fn(|i| u[i] - v[i])
}

fn check_base_closure(base: &BaseVectors) -> Outcome {
    let mut defined = 0;
    for (u, &(ui, uj)) in &base.x {
        for (v, &(vi, vj)) in &base.x {
            let s = add(u, v);
            if !in_t(&s) {
                continue;
            }
            defined += 1;
            let chained = uj == vi || vj == ui;
            if !chained || !base.x.contains_key(&s) {
                return Err(format!("χ({}, {}) + χ({}, {}) is defined but not a chain composition in X", ui + 1, uj + 1, vi + 1, vj + 1));
            }
        }
    }
    Ok(format!("{defined} of {} ordered pairs have a defined sum, each a chain composition in X", base.x.len() * base.x.len()))
}

fn six_vectors(base: &BaseVectors) -> [V18; 6] {
    [base.ba(0, 3), base.ba(1, 0), base.ba(2, 1), base.aa(1, 0), base.aa(2, 0), base.aa(3, 0)]
}

fn to_rational_rows(rows: &[V18]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&v| integer(v.into())).collect()).collect()
}

fn check_six_vectors(base: &BaseVectors) -> Outcome {
    let r = rank(&to_rational_rows(&six_vectors(base)));
    if r == 6 {
        Ok("χ(B_1,A_4), χ(B_2,A_1), χ(B_3,A_2), χ(A_2,A_1), χ(A_3,A_1), χ(A_4,A_1) have rank 6".into())
    } else {
        Err(format!("rank {r}, expected 6"))
    }
}

/// Closed forms of `w_19..w_26` over `(N, K, w_1..w_18)`, written in terms
/// of the chain differences.
fn closed_form_coefficients(base: &BaseVectors) -> Vec<Vec<Rational>> {
    let d1 = base.ba(0, 3);
    let d2 = add(&d1, &base.ba(1, 0));
    let d3 = add(&d2, &base.ba(2, 1));
    let heavy = |minus: &V18, a: &V18| (1, -1, add(&scale(-1, minus), a));
    let specs: [(i32, i32, V18); 8] = [
        heavy(&d1, base.a(0)),
        heavy(&d2, base.a(1)),
        heavy(&d3, base.a(2)),
        (1, -1, *base.a(3)),
        (0, 1, d1),
        (0, 1, d2),
        (0, 1, d3),
        (0, 1, [0; BASE_ATOMS]),
    ];
    specs
        .iter()
        .map(|(n, k, v)| {
            let mut row = vec![integer((*n).into()), integer((*k).into())];
            row.extend(v.iter().map(|&x| integer((-x).into())));
            row
        })
        .collect()
}

fn check_weight_basis(c: &Construction, base: &BaseVectors) -> Outcome {
    let coefficients = weight_coefficients(&c.m).map_err(|e| e.to_string())?;
    let r = rank(&coefficients);
    if r != 8 {
        return Err(format!("coefficient matrix has rank {r}, expected 8"));
    }
    if coefficients != closed_form_coefficients(base) {
        return Err("solved coefficients disagree with the closed forms over the chain differences".into());
    }
    Ok("8×20 coefficient matrix has rank 8 and matches the closed forms".into())
}

/// All orderings of `0..4`.
fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// A family `a_1 v_1 + a_2 v_2 + a_3 v_3 + extra` over all index choices
/// `(i, k, t, p)` and `(j, m, s)`.
struct Family {
    name: &'static str,
    expected: Vec<[i32; 3]>,
    extra: fn(&BaseVectors, [usize; 4]) -> V18,
}

fn families() -> Vec<Family> {
    let mut units = vec![[0, 0, 0]];
    for i in 0..3 {
        for s in [1, -1] {
            let mut a = [0; 3];
            a[i] = s;
            units.push(a);
        }
    }
    let mut one = units;
    one.extend([[1, 1, 1], [-1, -1, -1]]);
    vec![
        Family { name: "fact 1", expected: one, extra: |_, _| [0; BASE_ATOMS] },
        Family {
            name: "fact 2",
            expected: vec![[0, 0, 0], [0, 1, 0], [0, 0, -1], [0, 1, -1]],
            extra: |b, [_, k, t, _]| b.aa(k, t),
        },
        Family {
            name: "fact 3",
            expected: vec![[0, 0, 0], [1, 0, 0], [1, 1, 1], [2, 1, 1]],
            extra: |b, [i, _, _, p]| b.aa(i, p),
        },
        Family {
            name: "fact 4",
            expected: vec![],
            extra: |b, [i, k, t, p]| add(&b.aa(i, p), &b.aa(k, t)),
        },
    ]
}

fn check_facts(base: &BaseVectors) -> Outcome {
    let perms = permutations();
    let mut bound_cache: FxHashMap<Vec<([i32; 3], i32)>, bool> = FxHashMap::default();
    let mut summary = Vec::new();
    for family in families() {
        let mut expected = family.expected.clone();
        expected.sort();
        for a_idx in &perms {
            for b_idx in &perms {
                let [i, k, t, _] = *a_idx;
                let [j, m, s, _] = *b_idx;
                let columns = [base.ba(j, i), base.ba(m, k), base.ba(s, t)];
                let constant = (family.extra)(base, *a_idx);
                let mut found = Vec::new();
                for a1 in -BOX..=BOX {
                    for a2 in -BOX..=BOX {
                        for a3 in -BOX..=BOX {
                            let v = add(
                                &add(&add(&scale(a1, &columns[0]), &scale(a2, &columns[1])), &scale(a3, &columns[2])),
                                &constant,
                            );
                            if in_t(&v) {
                                found.push([a1, a2, a3]);
                            }
                        }
                    }
                }
                if found != expected {
                    return Err(format!(
                        "{} with (i,k,t,p) = {:?}, (j,m,s) = {:?}: solutions {found:?}, expected {expected:?}",
                        family.name,
                        a_idx.map(|x| x + 1),
                        [j + 1, m + 1, s + 1]
                    ));
                }
                let mut rows: Vec<([i32; 3], i32)> =
                    (0..BASE_ATOMS).map(|q| ([columns[0][q], columns[1][q], columns[2][q]], constant[q])).collect();
                rows.sort();
                rows.dedup();
                let bounded = *bound_cache.entry(rows).or_insert_with_key(|rows| real_solutions_within(rows, BOX));
                if !bounded {
                    return Err(format!(
                        "{}: real solutions escape the box for (i,k,t,p) = {:?}, (j,m,s) = {:?}",
                        family.name,
                        a_idx.map(|x| x + 1),
                        [j + 1, m + 1, s + 1]
                    ));
                }
            }
        }
        summary.push(format!("{}: {} solutions", family.name, expected.len()));
    }
    Ok(format!(
        "{} over 576 index choices each, [−{BOX},{BOX}]^3 enumerated; {} distinct coordinate systems confine real solutions to the box",
        summary.join(", "),
        bound_cache.len()
    ))
}

/// Whether every real `a` with `|r·a + d| ≤ 1` for all rows has
/// `|a_i| < limit + 1`, so no integer solution lies outside the box.
fn real_solutions_within(rows: &[([i32; 3], i32)], limit: i32) -> bool {
    let one = Rational::one();
    for coord in 0..3 {
        for sign in [1i64, -1] {
            let mut objective = vec![Rational::zero(); 6];
            objective[coord] = integer(sign);
            objective[coord + 3] = integer(-sign);
            let mut lp = LinearProgram::new(6, objective);
            for (r, d) in rows {
                let mut row: Vec<Rational> = r.iter().map(|&v| integer(v.into())).collect();
                row.extend(r.iter().map(|&v| integer((-v).into())));
                let d = integer((*d).into());
                lp.add(row.clone(), Relation::Le, &one - &d);
                lp.add(row, Relation::Ge, -&one - &d);
            }
            match lp_solve(&lp) {
                LpOutcome::Infeasible => return true,
                LpOutcome::Unbounded => return false,
                LpOutcome::Optimal { value, .. } => {
                    if value >= integer((limit + 1).into()) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The coefficient vectors `(a_1, …, a_5)` for which the general
/// combination stays ternary. The negation of `(1, 1, 1, 0, 0)` belongs
/// here too, as the first fact shows.
fn general_form_solutions() -> Vec<[i32; 5]> {
    let mut q = vec![
        [0, 0, 0, 0, 0],
        [1, 1, 1, 0, 0],
        [-1, -1, -1, 0, 0],
    ];
    for s in [1, -1] {
        q.extend([
            [s, 0, 0, 0, 0],
            [0, s, 0, 0, 0],
            [0, 0, s, 0, 0],
            [0, 0, 0, s, 0],
            [s, 0, 0, s, 0],
            [s, s, s, s, 0],
            [2 * s, s, s, s, 0],
            [0, 0, 0, 0, s],
            [0, s, 0, 0, s],
            [0, 0, -s, 0, s],
            [0, s, -s, 0, s],
        ]);
    }
    q.sort();
    q
}

fn check_general_form(base: &BaseVectors) -> Outcome {
    let perms = permutations();
    for p in &perms {
        for q in &perms {
            let total = (0..4).fold([0; BASE_ATOMS], |acc, r| add(&acc, &base.ba(p[r], q[r])));
            if total != [0; BASE_ATOMS] {
                return Err(format!("Σ χ(B_{{i_r}}, A_{{j_r}}) ≠ 0 for i = {:?}, j = {:?}", p.map(|x| x + 1), q.map(|x| x + 1)));
            }
        }
    }
    let expected = general_form_solutions();
    let mut landed = 0usize;
    for a_idx in &perms {
        for b_idx in &perms {
            let [i, k, t, p] = *a_idx;
            let [j, m, s, _] = *b_idx;
            let columns = [base.ba(j, i), base.ba(m, k), base.ba(s, t), base.aa(i, p), base.aa(k, t)];
            let mut found = Vec::new();
            for a1 in -BOX..=BOX {
                for a2 in -BOX..=BOX {
                    for a3 in -BOX..=BOX {
                        for a4 in -1..=1 {
                            for a5 in -1..=1 {
                                let a = [a1, a2, a3, a4, a5];
                                let v = (0..5).fold([0; BASE_ATOMS], |acc, r| add(&acc, &scale(a[r], &columns[r])));
                                if !in_t(&v) {
                                    continue;
                                }
                                if v != [0; BASE_ATOMS] && !base.in_x_or_neg(&v) {
                                    return Err(format!(
                                        "a = {a:?} with (i,k,t,p) = {:?}, (j,m,s) = {:?} gives a ternary vector outside X ∪ −X",
                                        a_idx.map(|x| x + 1),
                                        [j + 1, m + 1, s + 1]
                                    ));
                                }
                                found.push(a);
                            }
                        }
                    }
                }
            }
            if found != expected {
                return Err(format!(
                    "(i,k,t,p) = {:?}, (j,m,s) = {:?}: solutions {found:?} differ from the expected {} vectors",
                    a_idx.map(|x| x + 1),
                    [j + 1, m + 1, s + 1],
                    expected.len()
                ));
            }
            landed += found.len();
        }
    }
    Ok(format!(
        "trading identity holds for all 576 index pairings; {} solution vectors per index choice, {landed} combinations in X ∪ −X",
        expected.len()
    ))
}

fn check_witness(c: &Construction) -> Outcome {
    let sets = c.sets();
    let segment = c.initial_segment();
    let (left, right) = sets.split_at(4);
    if let Some(a) = left.iter().find(|s| !segment.contains(s)) {
        return Err(format!("{a} should be a face"));
    }
    if let Some(b) = right.iter().find(|s| segment.contains(s)) {
        return Err(format!("{b} should not be a face"));
    }
    if !is_trading_transform(left, right).map_err(|e| e.to_string())? {
        return Err("the eight sets do not trade".into());
    }
    let found = find_cck_star_violation_among(&segment, &sets, 4, &SearchLimits::default()).map_err(|e| e.to_string())?;
    match found.witness() {
        Some(w) => Ok(format!(
            "A′_1..A′_4 are faces, B′_1..B′_4 are not; search over the eight sets finds ({}; {})",
            join(w.left()),
            join(w.right())
        )),
        None => Err("search over the eight sets found no violation".into()),
    }
}

fn join(sets: &[Subset]) -> String {
    sets.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_set_has_36_vectors_in_18_pairs() {
        let u = build_u_set();
        assert_eq!(u.len(), 36);
        assert_eq!(u.pairs().len(), 18);
        let x = [1, 1, 0, 0, 0, 0, 1, 1];
        assert!(u.pairs().iter().any(|&(a, b)| (a, b) == (complement(&x), x) || (a, b) == (x, complement(&x))));
        assert_eq!(complement(&x), [0, 0, 1, 1, 1, 1, 0, 0]);
        for v in u.vectors() {
            assert_eq!(v[..4].iter().sum::<u8>(), 2);
            assert_eq!(v[4..].iter().sum::<u8>(), 2);
        }
    }

    #[test]
    fn default_row_sizes() {
        let c = Construction::build(0).unwrap();
        let sizes: Vec<usize> = c.base_sets().iter().map(Subset::len).collect();
        // Every smaller member of a complementary pair starts with 0.
        assert_eq!(sizes, vec![0, 12, 12, 12, 9, 9, 9, 9]);
    }

    #[test]
    fn selector_out_of_range() {
        assert!(choose_m(1 << 18).is_err());
    }

    #[test]
    fn system_matrix_has_rank_seven() {
        assert_eq!(rank(&system_matrix()), 7);
    }

    #[test]
    fn membership_of_special_sets() {
        let c = Construction::build(0).unwrap();
        let sets = c.sets();
        let seg = c.initial_segment();
        assert!(seg.contains(&sets[0]));
        assert!(!seg.contains(&sets[4]));
        assert!(!seg.contains(&sets[7]));
        assert!(seg.contains(&Subset::empty(ATOMS).unwrap()));
        assert!(!seg.contains(&Subset::full(ATOMS).unwrap()));
        assert!(delta_membership(&c, &sets[3]));
    }

    #[test]
    fn general_form_list_has_25_vectors() {
        assert_eq!(general_form_solutions().len(), 25);
    }
}
