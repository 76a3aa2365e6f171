mod common;

use companion_core::bisim::{in_upto_closure, Combinators, Env, LangExpr, Relation};
use companion_core::causal::Registry;
use companion_core::corecursion::{PrefixSolution, State};
use companion_core::lattice::{companion, final_sequence, is_below_companion, FiniteLattice, MonotoneFn};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn regex(seed: u64, budget: usize) -> LangExpr {
    common::random_regex(&mut ChaCha8Rng::seed_from_u64(seed), budget)
}

/// Replace the letters of a concrete expression by atoms.
fn plug(e: &LangExpr, a: &str, b: &str) -> LangExpr {
    match e {
        LangExpr::Letter('a') => LangExpr::atom(a),
        LangExpr::Letter(_) => LangExpr::atom(b),
        LangExpr::Sum(xs) => LangExpr::sum_all(xs.iter().map(|x| plug(x, a, b))),
        LangExpr::Cat(x, y) => LangExpr::cat(plug(x, a, b), plug(y, a, b)),
        LangExpr::Star(x) => LangExpr::star(plug(x, a, b)),
        e => e.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivatives_agree_with_matcher(seed in any::<u64>(), budget in 1usize..=8) {
        let e = regex(seed, budget);
        let mut env = Env::new(&['a', 'b']);
        for w in common::words_up_to(&['a', 'b'], 6) {
            let by_deriv = env.accepts(&e, &w).unwrap().is_true();
            prop_assert_eq!(by_deriv, common::matches(&e, &w), "{} on {:?}", e, w);
        }
    }

    #[test]
    fn normalization_preserves_language(seed in any::<u64>(), budget in 1usize..=8) {
        let e = regex(seed, budget);
        let n = e.normalize();
        for w in common::words_up_to(&['a', 'b'], 5) {
            prop_assert_eq!(common::matches(&e, &w), common::matches(&n, &w));
        }
    }

    #[test]
    fn closure_is_monotone(seeds in prop::collection::vec(any::<u64>(), 4), extra in any::<u64>()) {
        let xs: Vec<LangExpr> = seeds.iter().map(|&s| regex(s, 4)).collect();
        let r: Relation = [(xs[0].clone(), xs[1].clone()), (xs[2].clone(), xs[3].clone())].into_iter().collect();
        let mut bigger = r.clone();
        bigger.insert(regex(extra, 4), regex(extra.wrapping_add(1), 4));
        let goals = [
            (LangExpr::sum(xs[0].clone(), xs[2].clone()), LangExpr::sum(xs[1].clone(), xs[3].clone())),
            (LangExpr::cat(xs[0].clone(), xs[2].clone()), LangExpr::cat(xs[1].clone(), xs[3].clone())),
            (LangExpr::star(xs[1].clone()), LangExpr::star(xs[0].clone())),
            (xs[0].clone(), xs[3].clone()),
        ];
        let small = Combinators::rfl_ctx();
        let large = Combinators::parse("rfl,ctx,sym,trn(2)").unwrap();
        for (l, rr) in &goals {
            if in_upto_closure(l, rr, &r, &small).is_some() {
                prop_assert!(in_upto_closure(l, rr, &bigger, &small).is_some());
                prop_assert!(in_upto_closure(l, rr, &r, &large).is_some());
            }
        }
    }

    #[test]
    fn contexts_are_derivable(seed in any::<u64>(), budget in 1usize..=8) {
        let ctx = regex(seed, budget);
        let lhs = plug(&ctx, "K0", "K2");
        let rhs = plug(&ctx, "K1", "K3");
        let r: Relation = [(LangExpr::atom("K0"), LangExpr::atom("K1")), (LangExpr::atom("K2"), LangExpr::atom("K3"))]
            .into_iter()
            .collect();
        let c = Combinators::rfl_ctx();
        let d = in_upto_closure(&lhs, &rhs, &r, &c);
        prop_assert!(d.is_some(), "{} vs {}", lhs, rhs);
        prop_assert!(d.unwrap().verify(&r, &c).is_ok());
    }

    #[test]
    fn companion_laws_on_powerset(seed in any::<u64>()) {
        let l = FiniteLattice::powerset(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = MonotoneFn::random(&l, &mut rng);
        let f = MonotoneFn::random(&l, &mut rng);
        let t = companion(&l, &b);
        let seq = final_sequence(&l, &b);
        prop_assert_eq!(b.apply(seq.nu), seq.nu);
        prop_assert!(l.elements().all(|x| !l.leq(x, b.apply(x)) || l.leq(x, seq.nu)));
        prop_assert_eq!(t.apply(seq.nu), seq.nu);
        prop_assert!(MonotoneFn::identity(&l).leq_pointwise(&l, &t));
        prop_assert_eq!(t.after(&t), t.clone());
        prop_assert!(t.after(&b).leq_pointwise(&l, &b.after(&t)));
        prop_assert_eq!(is_below_companion(&l, &f, &b), f.leq_pointwise(&l, &t));
    }

    #[test]
    fn random_systems_are_stage_coherent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sys, bindings, vars) = common::random_system(&mut rng);
        let mut sol = PrefixSolution::new(sys, Registry::stream_builtins(), bindings).unwrap();
        for v in &vars {
            let top = sol.solve(v, 8).unwrap();
            for n in 0..8 {
                prop_assert_eq!(top.project(n).unwrap(), sol.solve(v, n).unwrap());
            }
        }
        let roots: Vec<State> = vars.iter().map(State::var).collect();
        prop_assert!(sol.check_unfolding(&roots, 8).unwrap().passed());
        let lazy = sol.into_lazy(State::var(vars[0].clone())).unwrap();
        prop_assert_eq!(lazy.coherence_failure(6), None);
        prop_assert_eq!(lazy.signature().name(), "stream");
    }
}
