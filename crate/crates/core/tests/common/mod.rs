#![allow(dead_code)]

use std::collections::BTreeSet;

use companion_core::behavior::{BehaviorSignature, LazyBehavior};
use companion_core::bisim::LangExpr;
use companion_core::corecursion::{Bindings, Equation, EquationSystem, OutExpr, Term};
use companion_core::Value;
use rand::Rng;

/// Backtracking matcher, independent of derivatives. Concrete expressions only.
pub fn matches(e: &LangExpr, w: &[char]) -> bool {
    m(e, w, &|rest: &[char]| rest.is_empty())
}

fn m(e: &LangExpr, w: &[char], k: &dyn Fn(&[char]) -> bool) -> bool {
    match e {
        LangExpr::Empty => false,
        LangExpr::Eps => k(w),
        LangExpr::Letter(a) => w.first() == Some(a) && k(&w[1..]),
        LangExpr::Sum(xs) => xs.iter().any(|x| m(x, w, k)),
        LangExpr::Cat(x, y) => m(x, w, &|rest: &[char]| m(y, rest, k)),
        LangExpr::Star(x) => k(w) || m(x, w, &|rest: &[char]| rest.len() < w.len() && m(e, rest, k)),
        LangExpr::Atom(_) | LangExpr::Nu(_) => panic!("matcher needs a concrete expression"),
    }
}

pub fn words_up_to(alphabet: &[char], n: usize) -> Vec<Vec<char>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<char>> = vec![vec![]];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |&a| {
                let mut v = w.clone();
                v.push(a);
                v
            }))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn random_regex(rng: &mut impl Rng, budget: usize) -> LangExpr {
    if budget <= 1 {
        return match rng.gen_range(0..10) {
            0 => LangExpr::Empty,
            1 => LangExpr::Eps,
            k if k < 6 => LangExpr::letter('a'),
            _ => LangExpr::letter('b'),
        };
    }
    match rng.gen_range(0..3) {
        0 => LangExpr::star(random_regex(rng, budget - 1)),
        k => {
            let left = rng.gen_range(1..budget);
            let (a, b) = (random_regex(rng, left), random_regex(rng, budget - left));
            if k == 1 {
                LangExpr::sum(a, b)
            } else {
                LangExpr::cat(a, b)
            }
        }
    }
}

/// Rewrite with language-preserving identities at random positions.
pub fn equivalent_variant(e: &LangExpr, rng: &mut impl Rng) -> LangExpr {
    match e {
        LangExpr::Star(x) => {
            let x2 = equivalent_variant(x, rng);
            match (rng.gen_range(0..4), &**x) {
                (0, _) => LangExpr::sum(LangExpr::Eps, LangExpr::cat(x2.clone(), LangExpr::star(x2))),
                (1, LangExpr::Sum(ys)) if ys.len() == 2 => {
                    LangExpr::star(LangExpr::cat(LangExpr::star(ys[0].clone()), LangExpr::star(ys[1].clone())))
                }
                (2, _) => LangExpr::cat(LangExpr::star(x2.clone()), LangExpr::star(x2)),
                _ => LangExpr::star(x2),
            }
        }
        LangExpr::Cat(x, y) => match (&**y, rng.gen_range(0..2)) {
            (LangExpr::Sum(ys), 0) => LangExpr::sum_all(ys.iter().map(|z| LangExpr::cat((**x).clone(), z.clone()))),
            _ => LangExpr::cat(equivalent_variant(x, rng), equivalent_variant(y, rng)),
        },
        LangExpr::Sum(xs) => LangExpr::sum_all(xs.iter().map(|x| equivalent_variant(x, rng))),
        e => e.clone(),
    }
}

pub fn rational_pool(rng: &mut impl Rng) -> Value {
    const POOL: [(i64, i64); 7] = [(0, 1), (1, 1), (-1, 1), (2, 1), (1, 2), (-3, 4), (5, 3)];
    let (n, d) = POOL[rng.gen_range(0..POOL.len())];
    Value::ratio(n, d)
}

pub fn random_stream(rng: &mut impl Rng, len: usize) -> LazyBehavior {
    let vals: Vec<Value> = (0..len).map(|_| rational_pool(rng)).collect();
    LazyBehavior::stream(BehaviorSignature::rational_stream(), move |k| vals[k % vals.len()].clone())
}

/// A random guarded stream system with at most 4 variables, at most 3 binary
/// operations drawn from the stream built-ins, and one bound oracle `o`.
pub fn random_system(rng: &mut impl Rng) -> (EquationSystem, Bindings, Vec<String>) {
    let all_ops = ["plus", "shuffle", "conv", "alt"];
    let nops = rng.gen_range(1..=3);
    let mut ops: Vec<&str> = all_ops.to_vec();
    while ops.len() > nops {
        ops.remove(rng.gen_range(0..ops.len()));
    }
    let nvars = rng.gen_range(1..=4);
    let vars: Vec<String> = (0..nvars).map(|k| format!("x{k}")).collect();
    let mut sys = EquationSystem::new(BehaviorSignature::rational_stream()).oracle("o");
    for v in &vars {
        let kid = random_term(rng, &vars, &ops, 2);
        sys = sys.equation(v.clone(), Equation::new("cons", OutExpr::int(rng.gen_range(-3..=3)), vec![kid]));
    }
    let bindings: Bindings = [("o".to_string(), random_stream(rng, 3))].into();
    (sys, bindings, vars)
}

fn random_term(rng: &mut impl Rng, vars: &[String], ops: &[&str], depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.4) {
        if rng.gen_range(0..5) == 0 {
            Term::oracle("o")
        } else {
            Term::var(vars[rng.gen_range(0..vars.len())].clone())
        }
    } else {
        let op = ops[rng.gen_range(0..ops.len())];
        Term::op(op, vec![random_term(rng, vars, ops, depth - 1), random_term(rng, vars, ops, depth - 1)])
    }
}

/// Words of `{S → aSb | ε}` of length at most `n`, by expanding the grammar.
pub fn anbn_by_grammar(n: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut forms = vec!["S".to_string()];
    while let Some(f) = forms.pop() {
        if f.chars().filter(|&c| c != 'S').count() > n {
            continue;
        }
        match f.find('S') {
            None => {
                out.insert(f);
            }
            Some(i) => {
                forms.push(format!("{}{}", &f[..i], &f[i + 1..]));
                forms.push(format!("{}aSb{}", &f[..i], &f[i + 1..]));
            }
        }
    }
    out
}
