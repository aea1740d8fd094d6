use gbperf::buchberger::{run, Strategy as Selection};
use gbperf::idealgen::*;
use gbperf::poly::*;
use gbperf::rng::{mix, seeded};
use proptest::prelude::*;

/// Rank by fraction-free elimination over i128.
fn bareiss_rank(a: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let (rows, cols) = (m.len(), m.first().map_or(0, Vec::len));
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                m[r][k] = (m[rank][c] * m[r][k] - m[r][c] * m[rank][k]) / prev;
            }
            m[r][c] = 0;
        }
        prev = m[rank][c];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=8)
        .prop_flat_map(|(d, n)| prop::collection::vec(prop::collection::vec(-10i64..=10, n), d))
}

fn apply(a: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn exponents(m: &Exponent) -> Vec<i64> {
    m.exps().iter().map(|&e| e as i64).collect()
}

/// All `x^{v+} - x^{v-}` with `A v = 0` and `|v|_inf <= bound`, one per sign class.
fn bounded_kernel_binomials(a: &[Vec<i64>], bound: i64) -> Vec<Polynomial> {
    let n = a[0].len();
    let mut v = vec![-bound; n];
    let mut out = Vec::new();
    loop {
        let first = v.iter().find(|&&x| x != 0);
        if first.is_some_and(|&x| x > 0) && apply(a, &v).iter().all(|&x| x == 0) {
            out.push(lattice_binomial(&v, MonomialOrder::Grevlex));
        }
        let Some(k) = (0..n).find(|&k| v[k] < bound) else {
            break;
        };
        v[k] += 1;
        v[..k].iter_mut().for_each(|x| *x = -bound);
    }
    out
}

#[test]
fn sampled_binomials_have_two_distinct_terms() {
    let mut seen = 0;
    for (k, mode) in [SamplingMode::Uniform, SamplingMode::Weighted]
        .into_iter()
        .enumerate()
    {
        let spec = BinomialDistSpec::new(3, 20, 10, mode);
        let sampler = BinomialSampler::new(spec).unwrap();
        for id in 0..5_000 {
            for g in sampler.sample(&mut seeded(mix(k as u64, id))) {
                let [t1, t2] = g.terms() else {
                    panic!("not a binomial: {g}")
                };
                assert_ne!(t1.mono, t2.mono);
                assert!(!t1.coeff.is_zero() && !t2.coeff.is_zero());
                assert!(
                    (1..=20).contains(&t1.mono.degree()) && (1..=20).contains(&t2.mono.degree())
                );
                seen += 1;
            }
        }
    }
    assert_eq!(seen, 100_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn kernel_basis_is_correct_and_full(a in matrix()) {
        let n = a[0].len();
        let basis = lattice_kernel(&a).unwrap();
        for v in &basis {
            prop_assert_eq!(v.len(), n);
            prop_assert!(apply(&a, v).iter().all(|&x| x == 0));
        }
        let rank = integer_rank(&a).unwrap();
        prop_assert_eq!(rank, bareiss_rank(&a));
        prop_assert_eq!(basis.len() + rank, n);
        prop_assert_eq!(bareiss_rank(&basis), basis.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn small_toric_ideals_match_bounded_enumeration(rows in 1usize..=3, upper in 1u32..=3, n in 2usize..=4, seed in any::<u64>()) {
        let spec = ToricDistSpec::new(rows, 0, upper, n);
        let a = sample_toric_matrix(&spec, &mut seeded(seed)).unwrap();
        let gens = toric_ideal(&a, None).unwrap();
        prop_assert!(toric_membership_ok(&a, &gens));
        let bound = 6;
        let oracle = bounded_kernel_binomials(&a.entries, bound);
        let ours = if gens.is_empty() {
            Vec::new()
        } else {
            run(&gens, Selection::Degree, MonomialOrder::Grevlex).unwrap().0
        };
        for b in &oracle {
            prop_assert!(normal_form(b, &ours).remainder.is_zero(), "A = {:?}: {} not in the ideal", a.entries, b);
        }
        let in_box = gens
            .iter()
            .flat_map(|g| g.terms())
            .all(|t| exponents(&t.mono).iter().all(|&e| e <= bound));
        if in_box {
            let theirs = if oracle.is_empty() {
                Vec::new()
            } else {
                run(&oracle, Selection::Degree, MonomialOrder::Grevlex).unwrap().0
            };
            prop_assert_eq!(ours, theirs, "A = {:?}", a.entries);
        }
    }

    #[test]
    fn toric_generators_are_binomials_in_the_kernel(rows in 1usize..=4, upper in 1u32..=6, n in 2usize..=6, seed in any::<u64>()) {
        let a = sample_toric_matrix(&ToricDistSpec::new(rows, 0, upper, n), &mut seeded(seed)).unwrap();
        for col in 0..n {
            let s: i64 = a.entries.iter().map(|r| r[col]).sum();
            prop_assert!((1..=upper as i64).contains(&s));
            prop_assert!(a.entries.iter().all(|r| r[col] >= 0));
        }
        let gens = toric_ideal(&a, Some(1_000_000)).unwrap();
        for g in &gens {
            let [t1, t2] = g.terms() else { panic!("not a binomial: {g}") };
            prop_assert_eq!(apply(&a.entries, &exponents(&t1.mono)), apply(&a.entries, &exponents(&t2.mono)));
            prop_assert_eq!(t1.coeff.value(), 1);
            prop_assert_eq!(t2.coeff, Fp::new(-1));
        }
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), toric in any::<bool>()) {
        if toric {
            let spec = ToricDistSpec::new(3, 0, 5, 6);
            prop_assert_eq!(sample_toric_matrix(&spec, &mut seeded(seed)).unwrap(), sample_toric_matrix(&spec, &mut seeded(seed)).unwrap());
        } else {
            let spec = BinomialDistSpec::new(3, 20, 10, SamplingMode::Weighted);
            prop_assert_eq!(
                sample_binomial_system(&spec, &mut seeded(seed)).unwrap(),
                sample_binomial_system(&spec, &mut seeded(seed)).unwrap()
            );
        }
    }
}
