//! Threshold, representability and almost-representability via exact LPs.
//!
//! Strict inequalities are handled by maximising a common slack `t`, capped
//! at 1 so the programs stay bounded: a strict system is feasible iff the
//! optimum is positive. The slack program has few variables and many rows,
//! so it is solved through its dual and the point read off the dual
//! multipliers. If that point fails the exact check, a lazy row-generation
//! solve of the primal is used instead.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::lp::{dot, lp_solve, LinearProgram, LpOutcome, Relation};
use crate::order::{cone_of, QPOrder};
use crate::rational::{serde_rational, serde_rational_vec, Rational};
use crate::subset::Subset;
use crate::ternary::{characteristic_vector, TernaryVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Faces are exactly the subsets of weight below `threshold`.
    WeightsAndThreshold {
        #[serde(with = "serde_rational_vec")]
        weights: Vec<Rational>,
        #[serde(with = "serde_rational")]
        threshold: Rational,
        /// The separation achieved, `min non-face weight − max face weight`.
        #[serde(with = "serde_rational")]
        margin: Rational,
    },
    RepresentingMeasure {
        #[serde(with = "serde_rational_vec")]
        measure: Vec<Rational>,
        #[serde(with = "serde_rational")]
        margin: Rational,
    },
    AlmostRepresentingMeasure {
        #[serde(with = "serde_rational_vec")]
        measure: Vec<Rational>,
    },
    Infeasible {
        /// Best slack the relaxed system reaches (never positive), or `None`
        /// when even the relaxed system has no solution.
        #[serde(with = "option_rational")]
        best_margin: Option<Rational>,
    },
}

mod option_rational {
    use serde::Serializer;

    use crate::rational::{format_rational, Rational};

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&format_rational(v)),
            None => s.serialize_none(),
        }
    }
}

impl Certificate {
    pub fn is_positive(&self) -> bool {
        !matches!(self, Certificate::Infeasible { .. })
    }
}

enum SlackOutcome {
    /// Optimal slack and point (measure coordinates only).
    Optimal(Rational, Vec<Rational>),
    Infeasible,
}

/// Maximises `0 ≤ t ≤ 1` subject to `x ≥ 0`, `Σx = 1`, `e·x = 0` for every
/// `e` in `equalities` and `v·x ≥ t` for every `v` in `strict`. Without
/// slack, `t` is pinned to 0.
fn maximize_slack(n: usize, equalities: &[TernaryVector], strict: &[TernaryVector], with_slack: bool) -> SlackOutcome {
    let mut seen = rustc_hash::FxHashSet::default();
    let strict: Vec<TernaryVector> = strict.iter().filter(|v| seen.insert(**v)).copied().collect();
    if let Some(outcome) = maximize_slack_dual(n, equalities, &strict, with_slack) {
        return outcome;
    }
    maximize_slack_rows(n, equalities, &strict, with_slack)
}

/// Solves the dual of the slack program:
///
/// minimise `y + cap·c` over `y, z` free and `c, u ≥ 0` subject to
/// `y + Σ z_e e_i − Σ u_v v_i ≥ 0` for every atom `i` and `c + Σ u_v ≥ 1`.
///
/// The multipliers of the atom rows are `−x` and that of the last row is
/// `−t`. Returns `None` when the recovered point does not check out.
fn maximize_slack_dual(n: usize, equalities: &[TernaryVector], strict: &[TernaryVector], with_slack: bool) -> Option<SlackOutcome> {
    let one = Rational::one();
    let columns = 3 + 2 * equalities.len() + strict.len();
    let mut objective = vec![Rational::zero(); columns];
    objective[0] = -one.clone();
    objective[1] = one.clone();
    if with_slack {
        objective[2] = -one.clone();
    }
    let mut lp = LinearProgram::new(columns, objective);
    for i in 1..=n {
        let mut row = vec![Rational::zero(); columns];
        row[0] = one.clone();
        row[1] = -one.clone();
        for (k, e) in equalities.iter().enumerate() {
            let c = Rational::from_integer(e.get(i).into());
            row[3 + 2 * k] = c.clone();
            row[4 + 2 * k] = -c;
        }
        let base = 3 + 2 * equalities.len();
        for (k, v) in strict.iter().enumerate() {
            row[base + k] = Rational::from_integer((-v.get(i)).into());
        }
        lp.add(row, Relation::Ge, Rational::zero());
    }
    let mut last = vec![Rational::zero(); columns];
    last[2] = one.clone();
    for entry in last.iter_mut().skip(3 + 2 * equalities.len()) {
        *entry = one.clone();
    }
    lp.add(last, Relation::Ge, one.clone());
    let duals = match lp_solve(&lp) {
        LpOutcome::Optimal { duals, .. } => duals,
        // The primal is infeasible exactly when the dual is unbounded.
        LpOutcome::Unbounded => return Some(SlackOutcome::Infeasible),
        LpOutcome::Infeasible => return None,
    };
    let x: Vec<Rational> = duals[..n].iter().map(|d| -d.clone()).collect();
    let t = -duals[n].clone();
    let feasible = !t.is_negative()
        && t <= one
        && (with_slack || t.is_zero())
        && x.iter().all(|v| !v.is_negative())
        && x.iter().sum::<Rational>() == one
        && equalities.iter().all(|e| e.dot(&x).is_zero())
        && strict.iter().all(|v| v.dot(&x) >= t);
    feasible.then_some(SlackOutcome::Optimal(t, x))
}

/// Row-generation solve of the primal slack program.
fn maximize_slack_rows(n: usize, equalities: &[TernaryVector], strict: &[TernaryVector], with_slack: bool) -> SlackOutcome {
    const BATCH: usize = 64;
    let one = Rational::one();
    let row = |v: &TernaryVector, slack: i64| -> Vec<Rational> {
        let mut r: Vec<Rational> = (1..=n).map(|i| Rational::from_integer(v.get(i).into())).collect();
        r.push(Rational::from_integer(slack.into()));
        r
    };
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = one.clone();
    let mut lp = LinearProgram::new(n + 1, objective);
    let mut sum_row = vec![one.clone(); n];
    sum_row.push(Rational::zero());
    lp.add(sum_row, Relation::Eq, one.clone());
    let mut cap = vec![Rational::zero(); n + 1];
    cap[n] = one.clone();
    if with_slack {
        lp.add(cap, Relation::Le, one.clone());
    } else {
        lp.add(cap, Relation::Eq, Rational::zero());
    }
    for e in equalities {
        lp.add(row(e, 0), Relation::Eq, Rational::zero());
    }
    let mut active = vec![false; strict.len()];
    for (k, v) in strict.iter().enumerate().take(BATCH) {
        lp.add(row(v, -1), Relation::Ge, Rational::zero());
        active[k] = true;
    }
    loop {
        let (t, x) = match lp_solve(&lp) {
            LpOutcome::Optimal { point, .. } => {
                let t = point[n].clone();
                let mut x = point;
                x.truncate(n);
                (t, x)
            }
            LpOutcome::Infeasible => return SlackOutcome::Infeasible,
            LpOutcome::Unbounded => unreachable!("slack is capped"),
        };
        let mut added = 0;
        for (k, v) in strict.iter().enumerate() {
            if active[k] {
                continue;
            }
            if v.dot(&x) < t {
                lp.add(row(v, -1), Relation::Ge, Rational::zero());
                active[k] = true;
                added += 1;
                if added == BATCH {
                    break;
                }
            }
        }
        if added == 0 {
            return SlackOutcome::Optimal(t, x);
        }
    }
}

fn weight(w: &[Rational], s: &Subset) -> Rational {
    s.atoms().fold(Rational::zero(), |acc, a| acc + &w[a - 1])
}

/// Decides whether the faces of `Δ` are exactly the subsets of weight
/// below some threshold, for nonnegative weights.
///
/// The empty family is reported threshold with weights `1/n` and
/// threshold 0.
pub fn is_threshold(complex: &SimplicialComplex) -> Certificate {
    let n = complex.n();
    let maximal = complex.maximal_faces();
    let minimal = complex.minimal_nonfaces();
    let uniform = vec![Rational::new(1.into(), (n as i64).into()); n];
    if maximal.is_empty() {
        return Certificate::WeightsAndThreshold { weights: uniform, threshold: Rational::zero(), margin: Rational::zero() };
    }
    if minimal.is_empty() {
        let top = weight(&uniform, &Subset::full(n).expect("n checked"));
        return Certificate::WeightsAndThreshold {
            threshold: top + Rational::one(),
            weights: uniform,
            margin: Rational::one(),
        };
    }
    let mut rows = Vec::with_capacity(maximal.len() * minimal.len());
    for b in &minimal {
        for a in &maximal {
            rows.push(characteristic_vector(b, a).expect("same n"));
        }
    }
    match maximize_slack(n, &[], &rows, true) {
        SlackOutcome::Optimal(t, w) if t.is_positive() => {
            let max_face = maximal.iter().map(|a| weight(&w, a)).max().expect("nonempty");
            let min_nonface = minimal.iter().map(|b| weight(&w, b)).min().expect("nonempty");
            let threshold = (&max_face + &min_nonface) / Rational::from_integer(2.into());
            let cert = Certificate::WeightsAndThreshold { weights: w, threshold, margin: min_nonface - max_face };
            debug_assert!(verify_threshold_certificate(complex, &cert));
            cert
        }
        SlackOutcome::Optimal(t, _) => Certificate::Infeasible { best_margin: Some(t) },
        SlackOutcome::Infeasible => Certificate::Infeasible { best_margin: None },
    }
}

/// Re-checks a threshold certificate against every subset of `[n]`.
pub fn verify_threshold_certificate(complex: &SimplicialComplex, cert: &Certificate) -> bool {
    let Certificate::WeightsAndThreshold { weights, threshold, .. } = cert else {
        return false;
    };
    let n = complex.n();
    if weights.len() != n || weights.iter().any(Signed::is_negative) {
        return false;
    }
    (0..(1u64 << n)).all(|bits| {
        let s = Subset::from_bits_unchecked(n, bits);
        complex.contains(&s) == (weight(weights, &s) < *threshold)
    })
}

fn check_order(order: &QPOrder) -> Result<()> {
    if order.rank_of_bits(0) != 0 {
        return Err(Error::InvalidOrder("the empty set is not in the lowest class".into()));
    }
    Ok(())
}

/// Equalities tying each class together and strict rows separating
/// consecutive classes.
fn chain_rows(order: &QPOrder) -> (Vec<TernaryVector>, Vec<TernaryVector>) {
    let mut equalities = Vec::new();
    let mut strict = Vec::new();
    let classes = order.classes();
    for class in classes {
        for pair in class.windows(2) {
            let x = characteristic_vector(&pair[1], &pair[0]).expect("same n");
            if !x.is_zero() {
                equalities.push(x);
            }
        }
    }
    for pair in classes.windows(2) {
        strict.push(characteristic_vector(&pair[1][0], &pair[0][0]).expect("same n"));
    }
    (equalities, strict)
}

/// Decides whether some probability measure induces exactly `order`.
pub fn is_representable(order: &QPOrder) -> Result<Certificate> {
    check_order(order)?;
    let (equalities, strict) = chain_rows(order);
    Ok(match maximize_slack(order.n(), &equalities, &strict, true) {
        SlackOutcome::Optimal(t, p) if t.is_positive() => {
            let cert = Certificate::RepresentingMeasure { measure: p, margin: t };
            debug_assert!(verify_order_certificate(order, &cert));
            cert
        }
        SlackOutcome::Optimal(t, _) => Certificate::Infeasible { best_margin: Some(t) },
        SlackOutcome::Infeasible => Certificate::Infeasible { best_margin: None },
    })
}

/// Decides whether some probability measure `p` satisfies
/// `A ⪯ B ⟹ p(A) ≤ p(B)`.
///
/// Tied sets must get equal measure; by transitivity it then suffices to
/// require `p` nondecreasing along the chain of classes. The certificate is
/// re-checked against every comparison.
pub fn is_almost_representable(order: &QPOrder) -> Result<Certificate> {
    check_order(order)?;
    let (equalities, strict) = chain_rows(order);
    Ok(match maximize_slack(order.n(), &equalities, &strict, false) {
        SlackOutcome::Optimal(_, p) => {
            let cert = Certificate::AlmostRepresentingMeasure { measure: p };
            debug_assert!(verify_order_certificate(order, &cert));
            cert
        }
        SlackOutcome::Infeasible => Certificate::Infeasible { best_margin: None },
    })
}

/// Re-checks a measure certificate by comparing `p(A)` and `p(B)` for every
/// pair of consecutive subsets in the order.
///
/// For almost-representing measures with `n ≤ 12` the cone condition
/// `p·x ≥ 0` for all `x ∈ C(⪯)` is also checked directly.
pub fn verify_order_certificate(order: &QPOrder, cert: &Certificate) -> bool {
    let n = order.n();
    let (measure, strict) = match cert {
        Certificate::RepresentingMeasure { measure, .. } => (measure, true),
        Certificate::AlmostRepresentingMeasure { measure } => (measure, false),
        _ => return false,
    };
    if measure.len() != n
        || measure.iter().any(Signed::is_negative)
        || measure.iter().fold(Rational::zero(), |a, b| a + b) != Rational::one()
    {
        return false;
    }
    let mut sequence: Vec<(u32, Rational)> = Vec::with_capacity(1 << n);
    for class in order.classes() {
        for s in class {
            sequence.push((order.rank_of_bits(s.bits()), weight(measure, s)));
        }
    }
    let chain_ok = sequence.windows(2).all(|p| {
        let (ra, wa) = &p[0];
        let (rb, wb) = &p[1];
        if ra == rb {
            wa == wb
        } else if strict {
            wa < wb
        } else {
            wa <= wb
        }
    });
    if !chain_ok {
        return false;
    }
    if !strict && n <= crate::cone::MAX_CONE_ATOMS {
        if let Ok(cone) = cone_of(order) {
            return cone.vectors().iter().all(|x| !x.dot(measure).is_negative());
        }
    }
    true
}

/// `p·x` for a measure and a ternary vector.
pub fn evaluate(measure: &[Rational], x: &TernaryVector) -> Rational {
    let row: Vec<Rational> = (1..=x.n()).map(|i| Rational::from_integer(x.get(i).into())).collect();
    dot(&row, measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{integer, rational};

    fn s(n: usize, atoms: &[u64]) -> Subset {
        Subset::from_atoms(n, atoms.iter().copied()).unwrap()
    }

    fn slack_value(outcome: &SlackOutcome) -> Option<Rational> {
        match outcome {
            SlackOutcome::Optimal(t, _) => Some(t.clone()),
            SlackOutcome::Infeasible => None,
        }
    }

    #[test]
    fn dual_and_row_generation_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..=5);
            let random_vector = |rng: &mut rand_chacha::ChaCha8Rng| {
                let entries: Vec<i8> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
                TernaryVector::from_entries(&entries).unwrap()
            };
            let equalities: Vec<_> = (0..rng.gen_range(0..2)).map(|_| random_vector(&mut rng)).collect();
            let strict: Vec<_> = (0..rng.gen_range(1..8)).map(|_| random_vector(&mut rng)).collect();
            for with_slack in [true, false] {
                let rows = maximize_slack_rows(n, &equalities, &strict, with_slack);
                match maximize_slack_dual(n, &equalities, &strict, with_slack) {
                    Some(dual) => assert_eq!(slack_value(&dual), slack_value(&rows)),
                    None => panic!("dual recovery failed for {equalities:?} {strict:?}"),
                }
            }
        }
    }

    #[test]
    fn skeleton_is_threshold() {
        let c = SimplicialComplex::from_predicate(3, |x| x.len() <= 1).unwrap();
        let cert = is_threshold(&c);
        assert!(verify_threshold_certificate(&c, &cert));
    }

    #[test]
    fn edge_plus_point_is_threshold() {
        let c = SimplicialComplex::from_generators(3, &[s(3, &[1, 2]), s(3, &[3])]).unwrap();
        let cert = is_threshold(&c);
        assert!(cert.is_positive());
        assert!(verify_threshold_certificate(&c, &cert));
        let hand = Certificate::WeightsAndThreshold {
            weights: vec![rational(1, 4), rational(1, 4), rational(1, 2)],
            threshold: rational(5, 8),
            margin: rational(1, 4),
        };
        assert!(verify_threshold_certificate(&c, &hand));
    }

    #[test]
    fn two_disjoint_edges_are_not_threshold() {
        let c = SimplicialComplex::from_generators(4, &[s(4, &[1, 2]), s(4, &[3, 4])]).unwrap();
        assert!(!is_threshold(&c).is_positive());
    }

    #[test]
    fn degenerate_complexes() {
        let empty = SimplicialComplex::empty(2).unwrap();
        assert!(verify_threshold_certificate(&empty, &is_threshold(&empty)));
        let full = SimplicialComplex::full(2).unwrap();
        assert!(verify_threshold_certificate(&full, &is_threshold(&full)));
        let point = SimplicialComplex::from_generators(2, &[s(2, &[])]).unwrap();
        assert!(verify_threshold_certificate(&point, &is_threshold(&point)));
    }

    #[test]
    fn one_atom_order_is_representable() {
        let o = QPOrder::from_weights(&[integer(5)]).unwrap();
        match is_representable(&o).unwrap() {
            Certificate::RepresentingMeasure { measure, .. } => assert_eq!(measure, vec![integer(1)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weighted_orders_are_representable() {
        let o = QPOrder::from_weights(&[integer(3), integer(2), integer(2), integer(1)]).unwrap();
        let rep = is_representable(&o).unwrap();
        assert!(verify_order_certificate(&o, &rep));
        let almost = is_almost_representable(&o).unwrap();
        assert!(verify_order_certificate(&o, &almost));
    }

    #[test]
    fn invalid_order_is_rejected() {
        let o = QPOrder::from_classes(1, vec![vec![s(1, &[1])], vec![s(1, &[])]]).unwrap();
        assert!(is_representable(&o).is_err());
        assert!(is_almost_representable(&o).is_err());
    }
}
