use std::cmp::Ordering;

use gbperf::poly::*;
use proptest::prelude::*;

const N: usize = 4;

fn exps(max: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=max, N)
}

fn order() -> impl Strategy<Value = MonomialOrder> {
    prop_oneof![
        Just(MonomialOrder::Grevlex),
        (1usize..N).prop_map(MonomialOrder::Elimination)
    ]
}

fn poly(ord: MonomialOrder, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((1i64..PRIME as i64, exps(5)), 0..=max_terms)
        .prop_map(move |terms| Polynomial::from_terms(N, ord, terms).unwrap())
}

fn mono(e: &[u32]) -> Exponent {
    Exponent::new(e).unwrap()
}

fn sum(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Reference grevlex written directly from its definition.
fn grevlex_reference(a: &[u32], b: &[u32]) -> Ordering {
    let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
    if da != db {
        return da.cmp(&db);
    }
    match (0..a.len()).rev().find(|&i| a[i] != b[i]) {
        Some(i) => b[i].cmp(&a[i]),
        None => Ordering::Equal,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn order_laws(a in exps(8), b in exps(8), c in exps(8), ord in order()) {
        let (ma, mb, mc) = (mono(&a), mono(&b), mono(&c));
        let ab = ord.cmp(&ma, &mb);
        prop_assert_eq!(ab, ord.cmp(&mb, &ma).reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        let bc = ord.cmp(&mb, &mc);
        if ab != Ordering::Less && bc != Ordering::Less {
            prop_assert_ne!(ord.cmp(&ma, &mc), Ordering::Less);
        }
        prop_assert_eq!(ord.cmp(&mono(&sum(&a, &c)), &mono(&sum(&b, &c))), ab);
        prop_assert_ne!(ord.cmp(&ma, &Exponent::one(N)), Ordering::Less);
        if ord == MonomialOrder::Grevlex {
            prop_assert_eq!(ab, grevlex_reference(&a, &b));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn addition_is_commutative_and_associative(
        (p, q, r) in order().prop_flat_map(|o| (poly(o, 8), poly(o, 8), poly(o, 8)))
    ) {
        prop_assert_eq!(poly_add(&p, &q), poly_add(&q, &p));
        prop_assert_eq!(poly_add(&poly_add(&p, &q), &r), poly_add(&p, &poly_add(&q, &r)));
        prop_assert!(poly_add(&p, &p.scale(Fp::new(-1))).is_zero());
    }

    #[test]
    fn polynomial_invariants_hold(p in order().prop_flat_map(|o| poly(o, 12))) {
        prop_assert!(p.terms().iter().all(|t| !t.coeff.is_zero()));
        for w in p.terms().windows(2) {
            prop_assert_eq!(p.order().cmp(&w[0].mono, &w[1].mono), Ordering::Greater);
        }
    }

    #[test]
    fn normal_form_is_reduced_and_traced(
        (f, divisors) in order().prop_flat_map(|o| (poly(o, 10), prop::collection::vec(poly(o, 3), 1..5)))
    ) {
        let (red, trail) = normal_form_traced(&f, &divisors);
        prop_assert_eq!(red.additions, trail.len() as u64);
        let leads: Vec<&Exponent> = divisors.iter().filter_map(|g| g.lead_monomial()).collect();
        for t in red.remainder.terms() {
            prop_assert!(leads.iter().all(|lm| !lm.divides(&t.mono)), "remainder term {:?} is reducible", t.mono);
        }
        let mut combination = Polynomial::zero(N, f.order());
        for step in &trail {
            combination = poly_add(&combination, &divisors[step.divisor].mul_term(step.quotient.coeff, &step.quotient.mono));
        }
        prop_assert_eq!(poly_add(&combination, &red.remainder), f);
    }
}
