use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use snakefold::cluster::{ExchangeMatrix, Seed};
use snakefold::fixtures::sweep_surfaces;
use snakefold::poly::{ExponentVector, LaurentPolynomial};
use snakefold::repalg::{submodule_counts_brute_force, SymmetricContext};
use snakefold::snake::{arc_expansion, build_modified, build_snake};

fn poly_strategy() -> impl Strategy<Value = LaurentPolynomial> {
    prop::collection::vec((prop::collection::vec(-2i64..=2, 3), -3i64..=3), 0..5).prop_map(|terms| {
        LaurentPolynomial::from_terms(terms.into_iter().map(|(e, c)| (ExponentVector::y_dense(&e), c.into())))
    })
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (2usize..=4).prop_flat_map(|n| {
        (prop::collection::vec(1i64..=2, n), prop::collection::vec(-1i64..=1, n * n)).prop_map(move |(d, c)| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let v = match i.cmp(&j) {
                                std::cmp::Ordering::Less => c[i * n + j],
                                std::cmp::Ordering::Greater => -c[j * n + i],
                                std::cmp::Ordering::Equal => 0,
                            };
                            v * d[j]
                        })
                        .collect()
                })
                .collect()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative_and_commutative(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn exact_division_inverts_multiplication(a in poly_strategy(), b in poly_strategy()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
    }

    #[test]
    fn mutation_is_an_involution(b in matrix_strategy(), seq in prop::collection::vec(0usize..4, 0..3), k in 0usize..4) {
        let m = ExchangeMatrix::new(b).unwrap();
        let n = m.rank();
        let seq: Vec<usize> = seq.into_iter().map(|s| s % n).collect();
        let seed = Seed::principal(&m).mutate_sequence(&seq).unwrap();
        let back = seed.mutate(k % n).unwrap().mutate(k % n).unwrap();
        prop_assert_eq!(back.ext, seed.ext);
        prop_assert_eq!(back.cluster, seed.cluster);
    }

    #[test]
    fn arc_expansions_are_f_polynomials(surface in 0usize..4, seed in any::<u64>()) {
        let (_, t) = sweep_surfaces().swap_remove(surface);
        let mut rng = StdRng::seed_from_u64(seed);
        let a = t.random_arc(&mut rng, 7, 0.25);
        prop_assume!(!a.is_empty());
        let g = build_snake(&t, &a).unwrap();
        let f = g.matching_polynomial();
        prop_assert_eq!(f.constant_term(), 1.into());
        prop_assert!(f.all_coefficients_positive() && !f.has_negative_exponent());
        let total: i64 = f.terms().map(|(_, c)| i64::try_from(c.clone()).unwrap()).sum();
        prop_assert_eq!(total as usize, g.perfect_matchings().len());
        // the orientation of the arc does not matter
        prop_assert_eq!(arc_expansion(&t, &a).unwrap(), arc_expansion(&t, &a.reversed()).unwrap());
    }

    #[test]
    fn modified_graph_keeps_the_expansion(surface in 0usize..4, seed in any::<u64>()) {
        let (_, t) = sweep_surfaces().swap_remove(surface);
        let mut rng = StdRng::seed_from_u64(seed);
        let a = t.random_basepoint_arc(&mut rng, 7, 0.25).unwrap();
        prop_assume!(a.crosses(t.n() - 1));
        let g = build_snake(&t, &a).unwrap();
        let h = build_modified(&t, &a).unwrap();
        prop_assert_eq!(g.perfect_matchings().len(), h.perfect_matchings().len());
        prop_assert_eq!(g.matching_polynomial(), h.matching_polynomial());
    }

    #[test]
    fn string_f_counts_submodules(surface in 0usize..4, seed in any::<u64>()) {
        let (_, t) = sweep_surfaces().swap_remove(surface);
        let ctx = SymmetricContext::new(&t).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let a = ctx.refl.tri.random_arc(&mut rng, 6, 0.3);
        prop_assume!(!a.is_empty());
        let w = snakefold::repalg::string_of_path(&ctx.qbar, &a).unwrap();
        prop_assert_eq!(w.f_polynomial(&ctx.qbar), submodule_counts_brute_force(&ctx.qbar, &w));
    }
}
