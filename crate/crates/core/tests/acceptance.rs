//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use qpcone::catalog;
use qpcone::example26::{verify_construction, Construction};
use qpcone::feasibility::verify_order_certificate;
use qpcone::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use qpcone::winder::{is_strongly_acyclic, winder_prec, Acyclicity};
use qpcone::{
    find_cck_star_violation, find_cck_violation, initial_segment, is_almost_representable, is_representable,
    is_shifted, is_threshold, order_from_weights, verify_qp_axioms, Certificate, QPOrder, Rational, SearchLimits,
    Subset,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn e(err: qpcone::Error) -> String {
    err.to_string()
}

fn measure_of(cert: &Certificate) -> Option<&[Rational]> {
    match cert {
        Certificate::RepresentingMeasure { measure, .. } | Certificate::AlmostRepresentingMeasure { measure } => {
            Some(measure)
        }
        _ => None,
    }
}

/// `A ⪯ B ⟺ p(A) ≤ p(B)` over all pairs.
fn represents(order: &QPOrder, p: &[Rational]) -> bool {
    let n = order.n();
    let all: Vec<Subset> = (0..1u64 << n).map(|b| Subset::new(n, b).unwrap()).collect();
    all.iter().all(|a| {
        all.iter().all(|b| order.leq(a, b) == (weight_of(p, a.bits()) <= weight_of(p, b.bits())))
    })
}

/// `A ≺ B ⟹ p(A) ≤ p(B)` and `A ∼ B ⟹ p(A) = p(B)`.
fn almost_represents(order: &QPOrder, p: &[Rational]) -> bool {
    let n = order.n();
    let all: Vec<Subset> = (0..1u64 << n).map(|b| Subset::new(n, b).unwrap()).collect();
    all.iter().all(|a| {
        all.iter().all(|b| {
            let (pa, pb) = (weight_of(p, a.bits()), weight_of(p, b.bits()));
            (!order.leq(a, b) || pa <= pb) && (!order.equiv(a, b) || pa == pb)
        })
    })
}

fn tied_order() -> Outcome {
    let order = order_from_weights(&catalog::tied_five_atom_weights()).map_err(e)?;
    for (a, b) in catalog::tied_five_atom_pairs() {
        check(order.equiv(&a, &b), || format!("{a} and {b} are not tied"))?;
    }
    let cert = is_representable(&order).map_err(e)?;
    let p = measure_of(&cert).ok_or("no representing measure")?;
    check(represents(&order, p), || "measure does not represent the order".into())?;
    let extra = order.equiv(&set(5, &[3]), &set(5, &[4, 5]));
    check(extra, || "3 and 45 are not tied".into())?;
    Ok("four listed ties present, measure verified; flag: exact arithmetic also ties 3 ~ 45 (not in the listed ties)".into())
}

fn swapped_order() -> Outcome {
    let order = catalog::swapped_five_atom_order().map_err(e)?;
    check(verify_qp_axioms(&order).map_err(e)?, || "order axioms fail".into())?;
    check(!is_representable(&order).map_err(e)?.is_positive(), || "reported representable".into())?;
    let almost = is_almost_representable(&order).map_err(e)?;
    let p = measure_of(&almost).ok_or("not almost representable")?;
    check(almost_represents(&order, p), || "almost-representing measure fails re-check".into())?;
    for k in 2..=4 {
        let outcome = find_cck_violation(&order, k, &SearchLimits::default()).map_err(e)?;
        if let Some(t) = outcome.witness() {
            let pairs: Vec<(Subset, Subset)> = t.pairs().collect();
            let balanced = (0..5).all(|i| {
                pairs.iter().filter(|(a, _)| a.contains(i + 1)).count()
                    == pairs.iter().filter(|(_, b)| b.contains(i + 1)).count()
            });
            let weak = pairs.iter().all(|(a, b)| order.leq(a, b));
            let strict = pairs.iter().any(|(a, b)| order.lt(a, b));
            check(balanced && weak && strict, || format!("CC_{k} witness fails re-check: {t:?}"))?;
            return Ok(format!("valid, not representable, almost representable; CC_{k} violated"));
        }
    }
    Err("no CC_k violation for k ≤ 4".into())
}

fn magic_untie() -> Outcome {
    let w = catalog::magic_square_weights();
    let order = order_from_weights(&w).map_err(e)?;
    let x = catalog::magic_square_vectors();
    let mut keep = x[..3].to_vec();
    for s in qpcone::order::hyperplane_vectors(&order) {
        if !keep.contains(&s) && !keep.contains(&s.neg()) {
            keep.push(s);
        }
    }
    check(x[..3].iter().all(|v| !keep.contains(&v.neg())), || "kept set contains some −x_i".into())?;
    match qpcone::untie(&order, &w, &keep) {
        Err(qpcone::Error::Untie(err)) => match *err {
            qpcone::order::UntieError::NotClosed { x: a, y: b, sum } => {
                check(a == x[0] && b == x[1] && sum == x[2].neg(), || format!("witness {a} ⊕ {b} = {sum}"))?;
                let direct = x[0].restricted_sum(&x[1]).ok_or("x_1 ⊕ x_2 undefined")?;
                check(direct == x[2].neg(), || "x_1 ⊕ x_2 ≠ −x_3 on recomputation".into())?;
                Ok("rejected with x_1 ⊕ x_2 = −x_3".into())
            }
            other => Err(format!("rejected with unexpected witness {other}")),
        },
        Err(other) => Err(other.to_string()),
        Ok(_) => Err("untie accepted".into()),
    }
}

fn shifted_complex() -> Outcome {
    let complex = catalog::shift_example_complex().map_err(e)?;
    let order = is_shifted(&complex).ok_or("not shifted")?;
    check(order.len() == 7, || format!("vertex order {order:?}"))?;
    for g in catalog::shift_example_generators() {
        check(complex.contains(&g), || format!("{g} missing"))?;
    }
    for s in [set(7, &[3, 4, 7]), set(7, &[1, 2, 5, 6])] {
        check(!complex.contains(&s), || format!("{s} present"))?;
    }
    let listed = catalog::shift_example_transform();
    check(is_star_violation(&complex, listed.left(), listed.right()), || "listed transform is not a violation".into())?;
    let outcome = find_cck_star_violation(&complex, 2, &SearchLimits::default()).map_err(e)?;
    let t = outcome.witness().ok_or("no CC_2* violation found")?;
    check(is_star_violation(&complex, t.left(), t.right()), || format!("witness {t:?} fails re-check"))?;
    check(!is_threshold(&complex).is_positive(), || "reported threshold".into())?;
    Ok(format!("shifted (order {order:?}), not threshold; CC_2* witness {t:?}; listed transform also verified"))
}

fn construction() -> Outcome {
    let c = Construction::build(0).map_err(e)?;
    let report = verify_construction(&c).map_err(e)?;
    let failures: Vec<String> = report.failures().map(|f| format!("({}) {}", f.id, f.detail)).collect();
    check(failures.is_empty(), || failures.join("; "))?;
    for id in ["weights", "a", "b", "c", "d", "e", "f", "g", "h"] {
        check(report.check(id).is_some_and(|c| c.passed), || format!("check {id} missing"))?;
    }
    let sets = c.sets();
    check(sets.iter().all(|s| c.weight(s) == c.n_weight), || "a set does not weigh N".into())?;
    check(c.xprime.len() == 28, || format!("{} vectors in X′", c.xprime.len()))?;
    for a in &c.xprime {
        for b in &c.xprime {
            if let Some(s) = a.restricted_sum(b) {
                check(s.is_zero() || c.xprime.contains(&s), || format!("{a} ⊕ {b} = {s} outside X′"))?;
            }
        }
    }
    let delta = c.initial_segment();
    check(sets[..4].iter().all(|s| delta.contains(s)), || "some A′_i is not a face".into())?;
    check(sets[4..].iter().all(|s| !delta.contains(s)), || "some B′_i is a face".into())?;
    let counts = |xs: &[Subset]| (1..=26).map(|i| xs.iter().filter(|s| s.contains(i)).count()).collect::<Vec<_>>();
    check(counts(&sets[..4]) == counts(&sets[4..]), || "A′/B′ is not a trading transform".into())?;
    check(report.conclusion.starts_with("not threshold"), || report.conclusion.clone())?;
    Ok(format!("all checks pass; {}", report.conclusion))
}

fn threshold_consistency() -> Outcome {
    let mut count = 0;
    for n in 1..=4 {
        for members in all_downsets(n) {
            let complex = complex_from_members(n, &members);
            let cert = is_threshold(&complex);
            let violation = (2..=4).find_map(|k| brute_cck_star(&complex, k).map(|w| (k, w)));
            if let Certificate::WeightsAndThreshold { weights, threshold, .. } = &cert {
                check(threshold_weights_work(&complex, weights, threshold), || format!("bad certificate on {members:?}"))?;
            }
            check(cert.is_positive() == violation.is_none(), || {
                format!("n={n} {members:?}: is_threshold {} but exhaustive search {violation:?}", cert.is_positive())
            })?;
            for k in 2..=4 {
                let lib = find_cck_star_violation(&complex, k, &SearchLimits::default()).map_err(e)?;
                check(lib.is_violation() == brute_cck_star(&complex, k).is_some(), || {
                    format!("n={n} {members:?}: library CC_{k}* search disagrees with exhaustive search")
                })?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} complexes on n ≤ 4 agree"))
}

fn initial_segments_cancellation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let limits = SearchLimits::default();
    for trial in 0..500 {
        let n = rng.gen_range(2..=8);
        let w = random_weights(&mut rng, n, 30);
        let order = order_from_weights(&w).map_err(e)?;
        let t = Subset::new(n, rng.gen_range(0..1u64 << n)).unwrap();
        let seg = initial_segment(&order, &t).map_err(e)?;
        for k in 2..=4 {
            let outcome = find_cck_star_violation(&seg, k, &limits).map_err(e)?;
            check(outcome.is_none(), || format!("trial {trial}: weights {w:?}, T = {t}, CC_{k}*: {outcome:?}"))?;
        }
    }
    Ok("500 random initial segments (n ≤ 8) satisfy CC_2*, CC_3*, CC_4*".into())
}

fn winder_suite() -> Outcome {
    for n in 1..=4 {
        for members in all_downsets(n) {
            let complex = complex_from_members(n, &members);
            let size = 1u64 << n;
            for a in 0..size {
                for b in 0..size {
                    if members[a as usize] && !members[b as usize] {
                        let (sa, sb) = (Subset::new(n, a).unwrap(), Subset::new(n, b).unwrap());
                        check(winder_prec(&complex, &sa, &sb).map_err(e)?, || format!("{members:?}: {sa} ⊀_W {sb}"))?;
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=6);
        let complex = random_complex(&mut rng, n);
        let a = rng.gen_range(0..1u64 << n);
        let b = rng.gen_range(0..1u64 << n);
        let d = rng.gen_range(0..1u64 << n) & !(a | b);
        let s = |x: u64| Subset::new(n, x).unwrap();
        let lhs = winder_prec(&complex, &s(a), &s(b)).map_err(e)?;
        let rhs = winder_prec(&complex, &s(a | d), &s(b | d)).map_err(e)?;
        check(lhs == rhs, || format!("translation by {} changes ≺_W between {} and {}", s(d), s(a), s(b)))?;
        check(lhs == brute_winder_prec(&complex, a, b), || "winder_prec disagrees with the definition".into())?;
    }
    for trial in 0..200 {
        let n = rng.gen_range(2..=6);
        let order = order_from_weights(&random_weights(&mut rng, n, 20)).map_err(e)?;
        let t = Subset::new(n, rng.gen_range(0..1u64 << n)).unwrap();
        let seg = initial_segment(&order, &t).map_err(e)?;
        let verdict = is_strongly_acyclic(&seg).map_err(e)?;
        check(verdict == Acyclicity::Acyclic, || format!("trial {trial}: {verdict:?}"))?;
        check(!brute_winder_has_cycle(&seg), || format!("trial {trial}: oracle finds a cycle"))?;
    }
    Ok("faces ≺_W non-faces on all complexes n ≤ 4; 10^4 translation triples; 200 initial segments acyclic".into())
}

fn to_library_lp(lp: &SmallLp) -> LinearProgram {
    let mut out = LinearProgram::new(lp.c.len(), lp.c.clone());
    for (a, rel, rhs) in &lp.rows {
        let rel = match rel {
            -1 => Relation::Le,
            0 => Relation::Eq,
            _ => Relation::Ge,
        };
        out.add(a.clone(), rel, rhs.clone());
    }
    out
}

fn lp_self_verification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut certificates = 0;
    for _ in 0..300 {
        let n = rng.gen_range(2..=6);
        let complex = random_complex(&mut rng, n);
        if let Certificate::WeightsAndThreshold { weights, threshold, .. } = is_threshold(&complex) {
            check(threshold_weights_work(&complex, &weights, &threshold), || "threshold certificate fails".into())?;
            certificates += 1;
        }
        let order = order_from_weights(&random_weights(&mut rng, n, 10)).map_err(e)?;
        let cert = is_representable(&order).map_err(e)?;
        let p = measure_of(&cert).ok_or("random weights not representable")?;
        check(represents(&order, p) && verify_order_certificate(&order, &cert), || "measure fails".into())?;
        certificates += 1;
    }
    let mut feasible = 0;
    for i in 0..1000 {
        let lp = random_lp(&mut rng);
        let oracle = lp.vertex_optimum();
        match (lp_solve(&to_library_lp(&lp)), &oracle) {
            (LpOutcome::Optimal { value, point, .. }, Some(best)) => {
                check(value == *best && lp.feasible(&point), || format!("LP {i}: {value} vs oracle {best}"))?;
                feasible += 1;
            }
            (LpOutcome::Infeasible, None) => {}
            (got, _) => return Err(format!("LP {i} {lp:?}: simplex {got:?}, oracle {oracle:?}")),
        }
    }
    check(feasible > 100, || format!("only {feasible} feasible LPs sampled"))?;
    Ok(format!("{certificates} certificates re-substituted; 1000 LPs agree with vertex enumeration ({feasible} feasible)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("1 tied five-atom order", tied_order, 1),
        ("2 swapped five-atom order", swapped_order, 30),
        ("3 magic-square untie rejection", magic_untie, 1),
        ("4 shifted non-threshold complex", shifted_complex, 10),
        ("5 26-atom construction", construction, 60),
        ("6 threshold / CC* consistency, n ≤ 4", threshold_consistency, 300),
        ("7 initial segments satisfy CC_2..4*", initial_segments_cancellation, 600),
        ("8 Winder relation properties", winder_suite, 600),
        ("9 LP self-verification", lp_self_verification, 300),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(limit) => Err(format!("took {elapsed:.1?}, limit {limit} s; {msg}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS  {name} ({elapsed:.2?}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name} ({elapsed:.2?}): {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
