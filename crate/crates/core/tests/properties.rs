mod common;

use common::*;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use qpcone::catalog;
use qpcone::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use qpcone::order::hyperplane_vectors;
use qpcone::winder::{is_strongly_acyclic, winder_prec, Acyclicity};
use qpcone::{
    cone_of, find_cck_star_violation, find_cck_violation, has_shift_obstruction, initial_segment,
    is_almost_representable, is_representable, is_shifted, is_threshold, order_from_weights, untie, QPOrder,
    SearchLimits, Subset, TernaryVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn weights_strategy(max_n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1i64..=20, 2..=max_n)
}

fn order_of(w: &[i64]) -> (QPOrder, Vec<qpcone::Rational>) {
    let w: Vec<_> = w.iter().map(|&v| int(v)).collect();
    (order_from_weights(&w).unwrap(), w)
}

fn union_lemma_holds(order: &QPOrder, a: u64, b: u64, c: u64, d: u64) -> bool {
    let n = order.n();
    let s = |m: u64| Subset::new(n, m).unwrap();
    let (a, b, c, d) = (s(a), s(b), s(c), s(d));
    if !(order.leq(&a, &b) && order.leq(&c, &d)) || !b.is_disjoint(&d) {
        return true;
    }
    let (ac, bd) = (a.union(&c), b.union(&d));
    order.leq(&ac, &bd) && (!(order.lt(&a, &b) || order.lt(&c, &d)) || order.lt(&ac, &bd))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn union_lemma_on_weighted_orders(w in weights_strategy(6), masks in prop::array::uniform4(0u64..64)) {
        let (order, _) = order_of(&w);
        let full = (1u64 << w.len()) - 1;
        let [a, b, c, d] = masks.map(|m| m & full);
        prop_assert!(union_lemma_holds(&order, a, b, c, d & !b));
    }

    #[test]
    fn cone_is_the_nonnegative_side_of_the_weights(w in weights_strategy(5)) {
        let (order, weights) = order_of(&w);
        let cone = cone_of(&order).unwrap();
        let n = w.len();
        for pos in 0..1u64 << n {
            let mut neg = 0;
            loop {
                let x = TernaryVector::from_masks(n, pos, neg).unwrap();
                prop_assert_eq!(cone.contains(&x), !x.dot(&weights).is_negative(), "x = {}", x);
                let free = ((1u64 << n) - 1) & !pos;
                if neg == free { break; }
                neg = neg.wrapping_sub(free) & free;
            }
        }
    }

    #[test]
    fn initial_segments_are_complexes(w in weights_strategy(7), t in 0u64..128) {
        let (order, _) = order_of(&w);
        let t = Subset::new(w.len(), t & ((1 << w.len()) - 1)).unwrap();
        let seg = initial_segment(&order, &t).unwrap();
        prop_assert!(seg.is_downward_closed());
        prop_assert!(seg.faces().all(|f| order.lt(&f, &t)));
        prop_assert!(seg.nonfaces().all(|f| !order.lt(&f, &t)));
    }

    #[test]
    fn untying_keeps_every_strict_comparison(w in weights_strategy(5)) {
        let (order, weights) = order_of(&w);
        let keep = qpcone::order::find_untie_set(&order, &weights, &[]).unwrap().expect("an untie set exists");
        let untied = untie(&order, &weights, &keep).unwrap();
        prop_assert!(untied.is_linear());
        let cone = cone_of(&untied).unwrap();
        for x in cone_of(&order).unwrap().vectors() {
            if x.dot(&weights).is_positive() {
                prop_assert!(cone.contains(&x), "{} lost", x);
            }
        }
        for s in hyperplane_vectors(&order) {
            prop_assert!(s.dot(&weights).is_zero());
            prop_assert!(cone.contains(&s) != cone.contains(&s.neg()));
        }
    }

    #[test]
    fn weighted_orders_satisfy_cc2_and_cc3(w in weights_strategy(6)) {
        let (order, _) = order_of(&w);
        for k in [2, 3] {
            prop_assert!(find_cck_violation(&order, k, &SearchLimits::default()).unwrap().is_none());
        }
    }

    #[test]
    fn representable_implies_almost(w in weights_strategy(6)) {
        let (order, _) = order_of(&w);
        prop_assert!(is_representable(&order).unwrap().is_positive());
        prop_assert!(is_almost_representable(&order).unwrap().is_positive());
    }

    #[test]
    fn star_search_matches_exhaustive_search(seed in any::<u64>(), n in 2usize..=5, k in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let complex = random_complex(&mut rng, n);
        let outcome = find_cck_star_violation(&complex, k, &SearchLimits::default()).unwrap();
        let oracle = brute_cck_star(&complex, k);
        prop_assert_eq!(outcome.is_violation(), oracle.is_some());
        prop_assert!(outcome.is_violation() || outcome.is_none());
        if let Some(t) = outcome.witness() {
            prop_assert!(is_star_violation(&complex, t.left(), t.right()));
            prop_assert!(!is_threshold(&complex).is_positive());
        }
    }

    #[test]
    fn threshold_complexes_are_shifted_and_cancel(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let complex = random_complex(&mut rng, n);
        let cert = is_threshold(&complex);
        if let qpcone::Certificate::WeightsAndThreshold { weights, threshold, .. } = &cert {
            prop_assert!(threshold_weights_work(&complex, weights, threshold));
            prop_assert!(is_shifted(&complex).is_some());
            for k in 2..=3 {
                prop_assert!(find_cck_star_violation(&complex, k, &SearchLimits::default()).unwrap().is_none());
            }
        }
        if let Some(order) = is_shifted(&complex) {
            prop_assert!(has_shift_obstruction(&complex, &order).unwrap().is_none());
        }
    }

    #[test]
    fn faces_precede_nonfaces_in_the_winder_relation(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let complex = random_complex(&mut rng, n);
        for a in complex.faces() {
            for b in complex.nonfaces() {
                prop_assert!(winder_prec(&complex, &a, &b).unwrap());
            }
        }
    }

    #[test]
    fn winder_acyclicity_matches_oracle(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let complex = random_complex(&mut rng, n);
        let verdict = is_strongly_acyclic(&complex).unwrap();
        prop_assert_eq!(matches!(verdict, Acyclicity::Cycle { .. }), brute_winder_has_cycle(&complex));
        if let Acyclicity::Cycle { cycle } = verdict {
            for (i, a) in cycle.iter().enumerate() {
                let b = &cycle[(i + 1) % cycle.len()];
                prop_assert!(brute_winder_prec(&complex, a.bits(), b.bits()));
            }
        }
    }

    #[test]
    fn simplex_matches_vertex_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lp = random_lp(&mut rng);
        let mut program = LinearProgram::new(lp.c.len(), lp.c.clone());
        for (a, rel, rhs) in &lp.rows {
            let rel = match rel { -1 => Relation::Le, 0 => Relation::Eq, _ => Relation::Ge };
            program.add(a.clone(), rel, rhs.clone());
        }
        match (lp_solve(&program), lp.vertex_optimum()) {
            (LpOutcome::Optimal { value, point, duals }, Some(best)) => {
                prop_assert_eq!(&value, &best);
                prop_assert!(lp.feasible(&point));
                // Dual feasibility and strong duality, checked by hand.
                let by = lp.rows.iter().zip(&duals).fold(int(0), |s, ((_, _, b), y)| s + b * y);
                prop_assert_eq!(by, value);
                for (j, c) in lp.c.iter().enumerate() {
                    let col = lp.rows.iter().zip(&duals).fold(int(0), |s, ((a, _, _), y)| s + &a[j] * y);
                    prop_assert!(col >= *c);
                }
                for ((_, rel, _), y) in lp.rows.iter().zip(&duals) {
                    let sign_ok = match rel { -1 => !y.is_negative(), 1 => !y.is_positive(), _ => true };
                    prop_assert!(sign_ok);
                }
            }
            (LpOutcome::Infeasible, None) => {}
            (got, want) => prop_assert!(false, "simplex {:?}, oracle {:?}", got, want),
        }
    }
}

#[test]
fn union_lemma_on_the_swapped_order() {
    let order = catalog::swapped_five_atom_order().unwrap();
    for a in 0..32 {
        for b in 0..32 {
            for c in 0..32 {
                for d in 0..32 {
                    assert!(union_lemma_holds(&order, a, b, c, d), "A={a:b} B={b:b} C={c:b} D={d:b}");
                }
            }
        }
    }
}

#[test]
fn swapped_order_satisfies_cc2_and_cc3() {
    let order = catalog::swapped_five_atom_order().unwrap();
    for k in [2, 3] {
        assert!(find_cck_violation(&order, k, &SearchLimits::default()).unwrap().is_none());
    }
}

#[test]
fn magic_square_complex_is_cyclic_by_definition_too() {
    let complex = catalog::magic_square_complex().unwrap();
    assert!(matches!(is_strongly_acyclic(&complex).unwrap(), Acyclicity::Cycle { .. }));
    assert!(brute_winder_has_cycle(&complex));
}
