use companion_core::behavior::{Approximant, BehaviorSignature};
use companion_core::causal::builtins::{self, is_causal_maybe_fn, maybe_fn_causal_by_definition, maybe_table, Extended, MaybeDefinition};
use companion_core::causal::checker::Witness;
use companion_core::causal::{check_causality, CausalityVerdict, CheckConfig, OpArgs};
use proptest::prelude::*;

fn tables(n: usize) -> impl Iterator<Item = Vec<Extended>> {
    let vals: Vec<Extended> = (0..=n).map(Some).chain([None]).collect();
    let len = n + 2;
    let total = vals.len().pow(len as u32);
    (0..total).map(move |mut code| {
        (0..len)
            .map(|_| {
                let v = vals[code % vals.len()];
                code /= vals.len();
                v
            })
            .collect()
    })
}

#[test]
fn maybe_characterization_matches_definition_exhaustively() {
    for n in 0..=5 {
        let def = MaybeDefinition::new(n, n);
        let mut agree = 0;
        for t in tables(n) {
            assert_eq!(is_causal_maybe_fn(&t), def.is_causal(&t), "table {t:?}");
            if n <= 2 {
                assert_eq!(def.is_causal(&t), maybe_fn_causal_by_definition(&t));
            }
            agree += 1;
        }
        assert_eq!(agree, (n + 2usize).pow(n as u32 + 2));
    }
}

#[test]
fn maybe_sampling_check_matches_characterization() {
    let cfg = CheckConfig { max_depth: 5, samples: 200, ..CheckConfig::default() };
    for n in 0..=1 {
        for t in tables(n) {
            let op = maybe_table("f", t.clone());
            let v = check_causality(&op, &cfg).unwrap();
            assert_eq!(v.is_causal(), is_causal_maybe_fn(&t), "table {t:?}");
        }
    }
}

#[test]
fn witness_survives_json() {
    let op = builtins::even_stream();
    let cfg = CheckConfig { max_depth: 4, samples: 100, ..CheckConfig::default() };
    let CausalityVerdict::NotCausal(w) = check_causality(&op, &cfg).unwrap() else { panic!("even is not causal") };
    let back = Witness::from_json(&op, &w.to_json(&op)).unwrap();
    assert_eq!(back, w);
    back.replay(&op).unwrap();
}

#[test]
fn documented_prefix_examples() {
    let sig = BehaviorSignature::rational_stream();
    let ints = |xs: &[i64]| Approximant::from_ints(&sig, xs).unwrap();
    let out = builtins::plus().apply_prefix(&OpArgs::Tuple(vec![ints(&[1, 2, 3]), ints(&[10, 20, 30])]), 3).unwrap();
    assert_eq!(out, ints(&[11, 22, 33]));
    let out = builtins::shuffle().apply_prefix(&OpArgs::Tuple(vec![ints(&[1; 4]), ints(&[1; 4])]), 4).unwrap();
    assert_eq!(out, ints(&[1, 2, 4, 8]));

    let ab = ['a', 'b'];
    let lang = BehaviorSignature::detaut(&ab);
    let eps = Approximant::from_language(&lang, 2, &|w| w.is_empty());
    let a = Approximant::from_language(&lang, 2, &|w| w == [0]);
    let out = builtins::concat(&ab).apply_prefix(&OpArgs::Tuple(vec![eps, a.clone()]), 2).unwrap();
    assert_eq!(out, a);
}

fn stream(xs: &[i64]) -> Approximant {
    Approximant::from_ints(&BehaviorSignature::rational_stream(), xs).unwrap()
}

proptest! {
    #[test]
    fn finset_ops_ignore_duplicates_and_order(xs in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 1..4)) {
        let items: Vec<Approximant> = xs.iter().map(|x| stream(x)).collect();
        let mut dup = items.clone();
        dup.extend(items.iter().rev().cloned());
        let op = builtins::fin_min();
        let a = op.apply_prefix(&OpArgs::Set(dup), 3).unwrap();
        let b = op.apply_prefix(&OpArgs::set(items), 3).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn stream_ops_commute_with_projection(
        x in prop::collection::vec(-3i64..4, 6),
        y in prop::collection::vec(-3i64..4, 6),
        i in 0usize..=6,
    ) {
        for op in [builtins::plus(), builtins::shuffle(), builtins::convolution(), builtins::alt()] {
            let full = op.apply_prefix(&OpArgs::Tuple(vec![stream(&x), stream(&y)]), 6).unwrap();
            let low = op.apply_prefix(&OpArgs::Tuple(vec![stream(&x[..i]), stream(&y[..i])]), i).unwrap();
            prop_assert_eq!(full.project(i).unwrap(), low);
        }
    }
}
