mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svetlichny::nosignal::{
    check_nosignalling, even_shifts, marginal, mixture_from_weights, parity_mixture, proper_subsets, MixtureSpec,
};
use svetlichny::{
    catalog, eval_strategy, evaluate, strategy_to_table, svetlichny_coeffs, tp_strategy, CommGraph,
    CorrelationTable, DeterministicStrategy, ExactScalar, Method, Value,
};

use common::{explicit_strategy, random_graph, random_strategy};

#[test]
fn delta_table_of_explicit_strategy_signals() {
    let t = strategy_to_table(&explicit_strategy());
    let r = check_nosignalling(&t, 1e-12).unwrap().expect("a_2 reads x_1");
    assert_eq!(r.subset, vec![1]);
    assert_eq!(r.x_reference & 1, 0);
    assert_eq!(r.x_other & 1, 1);
    assert_eq!(r.difference.abs(), 1.0);
    let (a, b) = r.exact.unwrap();
    assert_eq!((a - b).abs(), ExactScalar::ONE);
}

#[test]
fn mixture_of_explicit_strategy() {
    let s = explicit_strategy();
    let t = parity_mixture(&s);
    assert!(t.is_exact());
    assert_eq!(check_nosignalling(&t, 0.0).unwrap(), None);
    let mu = svetlichny_coeffs(4, Method::Closed).unwrap();
    assert_eq!(evaluate(&t, &mu).unwrap(), Value::Exact(ExactScalar::from_int(4)));
    assert_eq!(evaluate(&t, &mu).unwrap().exact(), Some(eval_strategy(&s, &mu).unwrap()));
    assert_eq!(t.validate(0.0), Ok(()));
}

/// Every marginal with `k ≥ 1` parties summed out equals `2^{k-m}`.
fn assert_flat_marginals(t: &CorrelationTable) {
    let m = t.m();
    for s in proper_subsets(m) {
        let k = s.count_ones();
        for x in 0..1u32 << m {
            for a in 0..1u32 << m {
                if a & s != 0 {
                    continue;
                }
                assert_eq!(
                    marginal(t, s, x, a).exact(),
                    Some(ExactScalar::pow2_neg(m as u32 - k)),
                    "S={s:b} x={x:b} a={a:b}"
                );
            }
        }
    }
}

#[test]
fn complementary_marginals_are_flat() {
    assert_flat_marginals(&parity_mixture(&explicit_strategy()));
    for m in [3usize, 5] {
        let s = tp_strategy(&CommGraph::complete(m).unwrap()).unwrap();
        assert_flat_marginals(&parity_mixture(&s));
    }
}

#[test]
fn mixture_closed_form_matches_literal_average() {
    for m in 2..=5 {
        let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
        for _ in 0..5 {
            let g = random_graph(m, 0.5, &mut rng);
            let s = random_strategy(&g, &mut rng);
            let spec = MixtureSpec::even_shifts_of(&s);
            assert_eq!(spec.components().len(), 1 << (m - 1));
            assert!(spec.components().iter().all(|(w, _)| *w == ExactScalar::pow2_neg(m as u32 - 1)));
            assert_eq!(mixture_from_weights(&spec), parity_mixture(&s));
        }
    }
    assert_eq!(even_shifts(3), vec![0b000, 0b011, 0b101, 0b110]);
}

#[test]
fn mixture_attains_algebraic_max() {
    for m in 2..=6 {
        let s = tp_strategy(&CommGraph::complete(m).unwrap()).unwrap();
        let t = parity_mixture(&s);
        let mu = svetlichny_coeffs(m, Method::Closed).unwrap();
        assert_eq!(evaluate(&t, &mu).unwrap().exact(), Some(svetlichny::coeffs::algebraic_max(m)));
        assert_eq!(check_nosignalling(&t, 0.0).unwrap(), None);
    }
}

#[test]
fn local_strategies_do_not_signal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in 2..=5 {
        let s = random_strategy(&CommGraph::empty(m).unwrap(), &mut rng);
        assert_eq!(check_nosignalling(&strategy_to_table(&s), 0.0).unwrap(), None);
    }
}

#[test]
fn tolerance_hides_small_float_deviations() {
    let mut values = vec![0.25; 16];
    // P(a|x) for x = 01: move 1e-9 of mass between outcomes of party 2
    values[0b0100] += 1e-9;
    values[0b0110] -= 1e-9;
    let t = CorrelationTable::float(2, values).unwrap();
    assert!(check_nosignalling(&t, 1e-12).unwrap().is_some());
    assert_eq!(check_nosignalling(&t, 1e-6).unwrap(), None);
}

#[test]
fn weighted_mixtures() {
    let g = catalog("fig1_iva", None, None).unwrap();
    let s = tp_strategy(&g).unwrap();
    let zero = DeterministicStrategy::from_fn(&g, |_, _| 0);
    let spec = MixtureSpec::new(vec![(ExactScalar::new(3, 2), s.clone()), (ExactScalar::new(1, 2), zero.clone())]).unwrap();
    let t = mixture_from_weights(&spec);
    let mu = svetlichny_coeffs(4, Method::Closed).unwrap();
    let expected = ExactScalar::new(3, 2) * eval_strategy(&s, &mu).unwrap()
        + ExactScalar::new(1, 2) * eval_strategy(&zero, &mu).unwrap();
    assert_eq!(evaluate(&t, &mu).unwrap().exact(), Some(expected));
    let other = DeterministicStrategy::from_fn(&CommGraph::empty(3).unwrap(), |_, _| 0);
    assert!(MixtureSpec::new(vec![(ExactScalar::new(1, 1), s), (ExactScalar::new(1, 1), other)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_parity_mixture_is_nosignalling(m in 2usize..=5, code in any::<u64>(), seed in any::<u64>()) {
        let code = code & ((1u64 << (m * (m - 1))) - 1);
        let g = CommGraph::from_code(m, code).unwrap();
        let s = random_strategy(&g, &mut ChaCha8Rng::seed_from_u64(seed));
        let t = parity_mixture(&s);
        prop_assert_eq!(check_nosignalling(&t, 0.0).unwrap(), None);
        let mu = svetlichny_coeffs(m, Method::Closed).unwrap();
        prop_assert_eq!(evaluate(&t, &mu).unwrap().exact(), Some(eval_strategy(&s, &mu).unwrap()));
    }

    #[test]
    fn table_json_roundtrip(m in 2usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(m, 0.5, &mut rng);
        let t = parity_mixture(&random_strategy(&g, &mut rng));
        prop_assert_eq!(CorrelationTable::from_json(&t.to_json()).unwrap(), t.clone());
        let f = t.to_float();
        prop_assert_eq!(CorrelationTable::from_json(&f.to_json()).unwrap(), f);
    }
}
