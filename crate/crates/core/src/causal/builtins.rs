//! Built-in operations on streams, languages and `X + 1`.
//!
//! Stream operations carry a prefix action computed by unfolding their defining
//! behavioral differential equations, together with a closed-form elementwise
//! semantics used by the causality checker.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::words::{self, LangTable};
use super::{BehaviorArgs, CausalOperation, OpArgs, Shape};
use crate::behavior::{Approximant, BehaviorSignature, LazyBehavior};
use crate::error::CausalError;
use crate::value::Value;

fn rats(a: &Approximant) -> Vec<BigRational> {
    a.values().iter().map(|v| v.as_rat().cloned().unwrap_or_else(BigRational::zero)).collect()
}

fn stream_out(sig: &BehaviorSignature, vals: Vec<BigRational>) -> Result<Approximant, CausalError> {
    let vs: Vec<Value> = vals.into_iter().map(Value::Rat).collect();
    Ok(Approximant::from_values(sig, &vs)?)
}

fn rat_at(b: &LazyBehavior, k: usize) -> BigRational {
    b.at(k).as_rat().cloned().unwrap_or_else(BigRational::zero)
}

fn tuple_args(args: &OpArgs) -> &[Approximant] {
    match args {
        OpArgs::Tuple(v) => v,
        _ => unreachable!("shape checked by apply_prefix"),
    }
}

fn set_args(args: &OpArgs) -> &[Approximant] {
    match args {
        OpArgs::Set(v) => v,
        _ => unreachable!("shape checked by apply_prefix"),
    }
}

fn full_tuple(args: &BehaviorArgs) -> Vec<LazyBehavior> {
    match args {
        BehaviorArgs::Tuple(v) => v.clone(),
        _ => panic!("expected a tuple of arguments"),
    }
}

fn full_set(args: &BehaviorArgs) -> Vec<LazyBehavior> {
    match args {
        BehaviorArgs::Set(v) => v.clone(),
        _ => panic!("expected a set of arguments"),
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut c = BigInt::one();
    for j in 0..k {
        c = c * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    c
}

// ---------------------------------------------------------------- streams

/// `(x ⊕ y)_0 = x_0 + y_0`, `(x ⊕ y)' = x' ⊕ y'`.
pub fn plus() -> CausalOperation {
    let sig = BehaviorSignature::rational_stream();
    let s = sig.clone();
    let out = sig.clone();
    CausalOperation::new("plus", Shape::Tuple(2), sig.clone(), sig)
        .with_prefix(move |args, _| {
            let a = tuple_args(args);
            let (x, y) = (rats(&a[0]), rats(&a[1]));
            stream_out(&s, x.into_iter().zip(y).map(|(p, q)| p + q).collect())
        })
        .with_full(move |args| {
            let v = full_tuple(args);
            let (x, y) = (v[0].clone(), v[1].clone());
            LazyBehavior::stream(out.clone(), move |k| Value::Rat(rat_at(&x, k) + rat_at(&y, k)))
        })
}

/// `(x ⊗ y)_0 = x_0 · y_0`, `(x ⊗ y)' = x ⊗ y' ⊕ x' ⊗ y`.
///
/// The prefix action tabulates `S(a, b, n) = (x^(a) ⊗ y^(b))_n` with
/// `S(a, b, n+1) = S(a, b+1, n) + S(a+1, b, n)`. The full semantics is the
/// closed form `Σ_m C(k, m) x_m y_{k-m}`.
pub fn shuffle() -> CausalOperation {
    let sig = BehaviorSignature::rational_stream();
    let s = sig.clone();
    let out = sig.clone();
    CausalOperation::new("shuffle", Shape::Tuple(2), sig.clone(), sig)
        .with_prefix(move |args, depth| {
            let a = tuple_args(args);
            let (x, y) = (rats(&a[0]), rats(&a[1]));
            // level[a][b] holds S(a, b, n) for a + b + n < depth
            let mut level: Vec<Vec<BigRational>> =
                (0..depth).map(|p| (0..depth - p).map(|q| &x[p] * &y[q]).collect()).collect();
            let mut vals = Vec::with_capacity(depth);
            for n in 0..depth {
                vals.push(level[0][0].clone());
                let size = depth - n - 1;
                level = (0..size)
                    .map(|p| (0..size - p).map(|q| &level[p][q + 1] + &level[p + 1][q]).collect())
                    .collect();
            }
            stream_out(&s, vals)
        })
        .with_full(move |args| {
            let v = full_tuple(args);
            let (x, y) = (v[0].clone(), v[1].clone());
            LazyBehavior::stream(out.clone(), move |k| {
                let mut acc = BigRational::zero();
                for m in 0..=k {
                    acc += BigRational::from_integer(binomial(k, m)) * rat_at(&x, m) * rat_at(&y, k - m);
                }
                Value::Rat(acc)
            })
        })
}

/// Convolution: `(x ⊙ y)_0 = x_0 · y_0`, `(x ⊙ y)' = x' ⊙ y ⊕ [x_0] ⊙ y'`.
///
/// The prefix action tabulates `C(a, n) = (x^(a) ⊙ y)_n` with
/// `C(a, n+1) = C(a+1, n) + x_a · y_{n+1}`; the full semantics is `Σ_m x_m y_{k-m}`.
pub fn convolution() -> CausalOperation {
    let sig = BehaviorSignature::rational_stream();
    let s = sig.clone();
    let out = sig.clone();
    CausalOperation::new("conv", Shape::Tuple(2), sig.clone(), sig)
        .with_prefix(move |args, depth| {
            let a = tuple_args(args);
            let (x, y) = (rats(&a[0]), rats(&a[1]));
            let mut level: Vec<BigRational> = (0..depth).map(|p| &x[p] * &y[0]).collect();
            let mut vals = Vec::with_capacity(depth);
            for n in 0..depth {
                vals.push(level[0].clone());
                let size = depth - n - 1;
                level = (0..size).map(|p| &level[p + 1] + &x[p] * &y[n + 1]).collect();
            }
            stream_out(&s, vals)
        })
        .with_full(move |args| {
            let v = full_tuple(args);
            let (x, y) = (v[0].clone(), v[1].clone());
            LazyBehavior::stream(out.clone(), move |k| {
                Value::Rat((0..=k).map(|m| rat_at(&x, m) * rat_at(&y, k - m)).sum())
            })
        })
}

/// `alt(σ, τ) = (σ(0), τ(1), σ(2), τ(3), …)`.
pub fn alt() -> CausalOperation {
    let sig = BehaviorSignature::rational_stream();
    let s = sig.clone();
    let out = sig.clone();
    CausalOperation::new("alt", Shape::Tuple(2), sig.clone(), sig)
        .with_prefix(move |args, _| {
            let a = tuple_args(args);
            let (x, y) = (rats(&a[0]), rats(&a[1]));
            stream_out(&s, x.into_iter().zip(y).enumerate().map(|(k, (p, q))| if k % 2 == 0 { p } else { q }).collect())
        })
        .with_full(move |args| {
            let v = full_tuple(args);
            let (x, y) = (v[0].clone(), v[1].clone());
            LazyBehavior::stream(out.clone(), move |k| if k % 2 == 0 { x.at(k) } else { y.at(k) })
        })
}

/// The constant `[r] = (r, 0, 0, …)` as a nullary operation.
pub fn constant(symbol: impl Into<String>, r: BigRational) -> CausalOperation {
    let sig = BehaviorSignature::rational_stream();
    let s = sig.clone();
    let out = sig.clone();
    let r2 = r.clone();
    CausalOperation::new(symbol, Shape::Tuple(0), sig.clone(), sig)
        .with_prefix(move |_, depth| {
            stream_out(&s, (0..depth).map(|k| if k == 0 { r.clone() } else { BigRational::zero() }).collect())
        })
        .with_full(move |_| LazyBehavior::scalar(out.clone(), Value::Rat(r2.clone())))
}

/// `α(S)(n) = min { σ(n) | σ ∈ S }`, with the empty set mapped to the zero stream.
pub fn fin_min() -> CausalOperation {
    let sig = BehaviorSignature::rational_stream();
    let s = sig.clone();
    let out = sig.clone();
    CausalOperation::new("min", Shape::FinSet, sig.clone(), sig)
        .with_prefix(move |args, depth| {
            let xs: Vec<Vec<BigRational>> = set_args(args).iter().map(rats).collect();
            stream_out(
                &s,
                (0..depth).map(|k| xs.iter().map(|x| x[k].clone()).min().unwrap_or_else(BigRational::zero)).collect(),
            )
        })
        .with_full(move |args| {
            let xs = full_set(args);
            LazyBehavior::stream(out.clone(), move |k| {
                Value::Rat(xs.iter().map(|x| rat_at(x, k)).min().unwrap_or_else(BigRational::zero))
            })
        })
}

/// `β(S)(n) = Σ_{σ ∈ S} σ(n)`. Depends on whether elements of `S` are equal, so it is
/// not causal and registration refuses it.
pub fn fin_sum() -> CausalOperation {
    let sig = BehaviorSignature::rational_stream();
    let s = sig.clone();
    let out = sig.clone();
    CausalOperation::new("sum", Shape::FinSet, sig.clone(), sig)
        .with_prefix(move |args, depth| {
            let xs: Vec<Vec<BigRational>> = set_args(args).iter().map(rats).collect();
            stream_out(&s, (0..depth).map(|k| xs.iter().map(|x| x[k].clone()).sum()).collect())
        })
        .with_full(move |args| {
            let xs = full_set(args);
            LazyBehavior::stream(out.clone(), move |k| Value::Rat(xs.iter().map(|x| rat_at(x, k)).sum()))
        })
}

/// `even(σ) = (σ(0), σ(2), σ(4), …)` as a stream-to-stream function (not causal).
pub fn even_stream() -> CausalOperation {
    let sig = BehaviorSignature::rational_stream();
    let out = sig.clone();
    CausalOperation::new("even", Shape::Tuple(1), sig.clone(), sig).with_full(move |args| {
        let x = full_tuple(args).remove(0);
        LazyBehavior::stream(out.clone(), move |k| x.at(2 * k))
    })
}

/// `even` from streams of pairs to streams: a depth-`i` input carries `2i` values.
pub fn even() -> CausalOperation {
    let input = BehaviorSignature::pair_stream();
    let output = BehaviorSignature::rational_stream();
    let s = output.clone();
    let out = output.clone();
    CausalOperation::new("even", Shape::Tuple(1), input, output)
        .with_prefix(move |args, _| {
            let pairs = tuple_args(args)[0].values();
            let firsts: Vec<Value> = pairs.iter().map(|p| first(p).clone()).collect();
            Ok(Approximant::from_values(&s, &firsts)?)
        })
        .with_full(move |args| {
            let x = full_tuple(args).remove(0);
            LazyBehavior::stream(out.clone(), move |k| first(&x.at(k)).clone())
        })
}

/// `double(σ) = (σ(0), σ(0), σ(1), σ(1), …)` from streams to streams of pairs.
pub fn double() -> CausalOperation {
    let input = BehaviorSignature::rational_stream();
    let output = BehaviorSignature::pair_stream();
    let s = output.clone();
    let out = output.clone();
    CausalOperation::new("double", Shape::Tuple(1), input, output)
        .with_prefix(move |args, _| {
            let vals = tuple_args(args)[0].values();
            let pairs: Vec<Value> = vals.into_iter().map(|v| Value::Tuple(vec![v.clone(), v])).collect();
            Ok(Approximant::from_values(&s, &pairs)?)
        })
        .with_full(move |args| {
            let x = full_tuple(args).remove(0);
            LazyBehavior::stream(out.clone(), move |k| {
                let v = x.at(k);
                Value::Tuple(vec![v.clone(), v])
            })
        })
}

fn first(pair: &Value) -> &Value {
    match pair {
        Value::Tuple(vs) => &vs[0],
        other => other,
    }
}

/// View a rational stream `(v0, v1, v2, …)` as the stream of pairs `((v0,v1), (v2,v3), …)`.
pub fn pair_up(x: &LazyBehavior) -> LazyBehavior {
    let x = x.clone();
    LazyBehavior::stream(BehaviorSignature::pair_stream(), move |k| Value::Tuple(vec![x.at(2 * k), x.at(2 * k + 1)]))
}

/// Flatten a stream of pairs back into the rational stream it encodes.
pub fn flatten_pairs(a: &Approximant) -> Vec<Value> {
    a.values()
        .into_iter()
        .flat_map(|p| match p {
            Value::Tuple(vs) => vs,
            other => vec![other],
        })
        .collect()
}

/// Position of the first zero, as an element of `ℕ ∪ {ω}` for `X + 1`.
pub fn first_zero() -> CausalOperation {
    let input = BehaviorSignature::rational_stream();
    let output = BehaviorSignature::maybe();
    let s = output.clone();
    let out = output.clone();
    CausalOperation::new("first_zero", Shape::Tuple(1), input, output)
        .with_prefix(move |args, depth| {
            let vals = rats(&tuple_args(args)[0]);
            Ok(Approximant::from_maybe(&s, vals.iter().position(Zero::is_zero), depth))
        })
        .with_full(move |args| {
            let x = full_tuple(args).remove(0);
            let s = out.clone();
            LazyBehavior::general(out.clone(), move |i| {
                Approximant::from_maybe(&s, (0..i).find(|&k| rat_at(&x, k).is_zero()), i)
            })
        })
}

// ---------------------------------------------------------------- languages

fn lang_tables(sig: &BehaviorSignature, items: &[Approximant]) -> Vec<LangTable> {
    items.iter().map(|a| LangTable::new(a, sig.alphabet().len())).collect()
}

fn lang_op(
    symbol: &str,
    shape: Shape,
    sig: Arc<BehaviorSignature>,
    member: fn(&[LangTable], &[usize]) -> bool,
    full_member: fn(&[LazyBehavior], &[usize]) -> bool,
) -> CausalOperation {
    let s = sig.clone();
    let out = sig.clone();
    CausalOperation::new(symbol, shape, sig.clone(), sig)
        .with_prefix(move |args, depth| {
            let tables = lang_tables(&s, tuple_args_or_set(args));
            Ok(Approximant::from_language(&s, depth, &|w| member(&tables, w)))
        })
        .with_full(move |args| {
            let xs = match args {
                BehaviorArgs::Tuple(v) | BehaviorArgs::Set(v) => v.clone(),
                BehaviorArgs::Seqs(_) => panic!("expected a tuple or set of languages"),
            };
            LazyBehavior::language(out.clone(), move |w| full_member(&xs, w))
        })
}

fn tuple_args_or_set(args: &OpArgs) -> &[Approximant] {
    match args {
        OpArgs::Tuple(v) | OpArgs::Set(v) => v,
        OpArgs::Seqs(_) => unreachable!("shape checked by apply_prefix"),
    }
}

pub fn union(alphabet: &[char]) -> CausalOperation {
    lang_op(
        "union",
        Shape::Tuple(2),
        BehaviorSignature::detaut(alphabet),
        |t, w| t[0].contains(w) || t[1].contains(w),
        |l, w| l[0].accepts(w) || l[1].accepts(w),
    )
}

pub fn concat(alphabet: &[char]) -> CausalOperation {
    lang_op(
        "concat",
        Shape::Tuple(2),
        BehaviorSignature::detaut(alphabet),
        |t, w| words::concat(&|u| t[0].contains(u), &|u| t[1].contains(u), w),
        |l, w| words::concat(&|u| l[0].accepts(u), &|u| l[1].accepts(u), w),
    )
}

pub fn star(alphabet: &[char]) -> CausalOperation {
    lang_op(
        "star",
        Shape::Tuple(1),
        BehaviorSignature::detaut(alphabet),
        |t, w| words::star(&|u| t[0].contains(u), w),
        |l, w| words::star(&|u| l[0].accepts(u), w),
    )
}

pub fn language_shuffle(alphabet: &[char]) -> CausalOperation {
    lang_op(
        "shuffle",
        Shape::Tuple(2),
        BehaviorSignature::detaut(alphabet),
        |t, w| t[0].shuffle_contains(&t[1], w),
        |l, w| words::shuffle(&|u| l[0].accepts(u), &|u| l[1].accepts(u), w),
    )
}

/// Union of a finite set of languages.
pub fn fin_union(alphabet: &[char]) -> CausalOperation {
    lang_op(
        "funion",
        Shape::FinSet,
        BehaviorSignature::detaut(alphabet),
        |t, w| t.iter().any(|l| l.contains(w)),
        |l, w| l.iter().any(|x| x.accepts(w)),
    )
}

/// `α(S) = ⋃_{L1…Lk ∈ S} L1 · L2 ⋯ Lk`: union of products, the algebra behind
/// grammars in Greibach-like form. The empty sequence contributes `{ε}`.
pub fn cfg(alphabet: &[char]) -> CausalOperation {
    let sig = BehaviorSignature::detaut(alphabet);
    let s = sig.clone();
    let out = sig.clone();
    CausalOperation::new("cfg", Shape::SeqSet, sig.clone(), sig)
        .with_prefix(move |args, depth| {
            let OpArgs::Seqs(seqs) = args else { unreachable!("shape checked by apply_prefix") };
            let tables: Vec<Vec<LangTable>> = seqs.iter().map(|q| lang_tables(&s, q)).collect();
            Ok(Approximant::from_language(&s, depth, &|w| {
                tables.iter().any(|q| {
                    let ms: Vec<Box<words::Member>> =
                        q.iter().map(|t| Box::new(move |u: &[usize]| t.contains(u)) as Box<words::Member>).collect();
                    let refs: Vec<&words::Member> = ms.iter().map(|b| &**b).collect();
                    words::product(&refs, w)
                })
            }))
        })
        .with_full(move |args| {
            let BehaviorArgs::Seqs(seqs) = args else { panic!("expected a set of sequences of languages") };
            let seqs = seqs.clone();
            LazyBehavior::language(out.clone(), move |w| {
                seqs.iter().any(|q| {
                    let ms: Vec<Box<words::Member>> =
                        q.iter().map(|l| Box::new(move |u: &[usize]| l.accepts(u)) as Box<words::Member>).collect();
                    let refs: Vec<&words::Member> = ms.iter().map(|b| &**b).collect();
                    words::product(&refs, w)
                })
            })
        })
}

/// `union`, `concat`, `star`, `shuffle`, `funion` and `cfg` over one alphabet.
pub fn language_catalog(alphabet: &[char]) -> Vec<CausalOperation> {
    vec![
        union(alphabet),
        concat(alphabet),
        star(alphabet),
        language_shuffle(alphabet),
        fin_union(alphabet),
        cfg(alphabet),
    ]
}

// ---------------------------------------------------------------- X + 1

/// An element of `ℕ ∪ {ω}`; `None` is `ω`.
pub type Extended = Option<usize>;

fn ext_lt(a: Extended, b: Extended) -> bool {
    match (a, b) {
        (_, None) => a.is_some(),
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x < y,
    }
}

/// A function on `{0, …, N, ω}` given by `table[x]` for `x ≤ N` and `table[N+1]` for `ω`.
fn table_at(table: &[Extended], x: Extended) -> Extended {
    let n = table.len() - 1;
    match x {
        Some(k) if k < n => table[k],
        _ => table[n],
    }
}

fn table_domain(table: &[Extended]) -> Vec<Extended> {
    let n = table.len() - 1;
    (0..n).map(Some).chain(std::iter::once(None)).collect()
}

/// The characterization: `∀ x, y. (x > f(x) ∧ y > f(x)) → f(x) = f(y)`.
///
/// `table` lists `f(0), …, f(N), f(ω)`; entries are `Some(k)` or `None` for `ω`.
pub fn is_causal_maybe_fn(table: &[Extended]) -> bool {
    let dom = table_domain(table);
    dom.iter().all(|&x| {
        let fx = table_at(table, x);
        dom.iter().all(|&y| !(ext_lt(fx, x) && ext_lt(fx, y)) || fx == table_at(table, y))
    })
}

/// The definition, checked exhaustively through approximants: whenever `x` and `y`
/// have equal depth-`i` approximants, so do `f(x)` and `f(y)`.
pub fn maybe_fn_causal_by_definition(table: &[Extended]) -> bool {
    let max = table.iter().flatten().copied().max().unwrap_or(0);
    MaybeDefinition::new(table.len() - 2, max).is_causal(table)
}

/// [`maybe_fn_causal_by_definition`] for many tables over `{0, …, N, ω}`: the
/// approximants of every point and every candidate value are interned once.
pub struct MaybeDefinition {
    n: usize,
    depths: usize,
    /// `ids[v][i]`: class of the depth-`i` approximant of value `v`; index `max + 1` is `ω`.
    ids: Vec<Vec<usize>>,
}

impl MaybeDefinition {
    /// Domain `{0, …, n, ω}`, table values in `{0, …, max, ω}`.
    pub fn new(n: usize, max: usize) -> Self {
        let sig = BehaviorSignature::maybe();
        // Beyond depth N + 2 only ω remains distinguishable, and x = y there.
        let depths = n + 3;
        let max = max.max(n);
        let mut interned: Vec<Approximant> = Vec::new();
        let ids = (0..=max)
            .map(Some)
            .chain([None])
            .map(|v| {
                (0..depths)
                    .map(|i| {
                        let a = Approximant::from_maybe(&sig, v, i);
                        interned.iter().position(|b| *b == a).unwrap_or_else(|| {
                            interned.push(a);
                            interned.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        MaybeDefinition { n, depths, ids }
    }

    fn class(&self, v: Extended, i: usize) -> usize {
        let omega = self.ids.len() - 1;
        let row = v.map_or(omega, |k| {
            assert!(k < omega, "table value {k} outside the prepared range");
            k
        });
        self.ids[row][i]
    }

    pub fn is_causal(&self, table: &[Extended]) -> bool {
        assert_eq!(table.len(), self.n + 2, "table must list f(0), …, f(N), f(ω)");
        let dom = table_domain(table);
        (0..self.depths).all(|i| {
            dom.iter().all(|&x| {
                dom.iter().all(|&y| {
                    self.class(x, i) != self.class(y, i)
                        || self.class(table_at(table, x), i) == self.class(table_at(table, y), i)
                })
            })
        })
    }
}

/// A function on `X + 1` given by a finite table, as an operation checked like any other.
pub fn maybe_table(symbol: impl Into<String>, table: Vec<Extended>) -> CausalOperation {
    assert!(!table.is_empty());
    let sig = BehaviorSignature::maybe();
    let out = sig.clone();
    let n = table.len() - 1;
    let s = sig.clone();
    let t = table.clone();
    CausalOperation::new(symbol, Shape::Tuple(1), sig.clone(), sig)
        .with_prefix(move |args, depth| {
            // least point with this depth-`depth` approximant
            let v = tuple_args(args)[0].maybe_value();
            Ok(Approximant::from_maybe(&s, table_at(&t, Some(v)), depth))
        })
        .with_full(move |args| {
            let x = full_tuple(args).remove(0);
            // x is determined up to "at least n" by its depth-n approximant
            let probe = x.produce(n).maybe_value();
            let xv = (probe < n).then_some(probe);
            let fx = table_at(&table, xv);
            let s = out.clone();
            LazyBehavior::general(out.clone(), move |i| Approximant::from_maybe(&s, fx, i))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ints(xs: &[i64]) -> Approximant {
        Approximant::from_ints(&BehaviorSignature::rational_stream(), xs).unwrap()
    }

    #[test]
    fn plus_is_pointwise() {
        let out = plus().apply_prefix(&OpArgs::Tuple(vec![ints(&[1, 2, 3]), ints(&[10, 20, 30])]), 3).unwrap();
        assert_eq!(out, ints(&[11, 22, 33]));
    }

    #[test]
    fn shuffle_of_ones_doubles() {
        let out = shuffle().apply_prefix(&OpArgs::Tuple(vec![ints(&[1; 4]), ints(&[1; 4])]), 4).unwrap();
        assert_eq!(out, ints(&[1, 2, 4, 8]));
    }

    #[test]
    fn shuffle_prefix_matches_closed_form() {
        let x = ints(&[1, -2, 3, 0, 5, 7]);
        let y = ints(&[2, 1, 0, -1, 4, 1]);
        let op = shuffle();
        let prefix = op.apply_prefix(&OpArgs::Tuple(vec![x.clone(), y.clone()]), 6).unwrap();
        let sig = BehaviorSignature::rational_stream();
        let full = op
            .apply_full(&BehaviorArgs::Tuple(vec![
                LazyBehavior::from_prefix(sig.clone(), x),
                LazyBehavior::from_prefix(sig, y),
            ]))
            .unwrap();
        assert_eq!(prefix, full.produce(6));
    }

    #[test]
    fn convolution_of_ones_counts() {
        let out = convolution().apply_prefix(&OpArgs::Tuple(vec![ints(&[1; 5]), ints(&[1; 5])]), 5).unwrap();
        assert_eq!(out, ints(&[1, 2, 3, 4, 5]));
    }

    #[test]
    fn concat_of_epsilon_and_a() {
        let sig = BehaviorSignature::detaut(&['a']);
        let eps = Approximant::from_words(&sig, 2, &BTreeSet::from([vec![]]));
        let a = Approximant::from_words(&sig, 2, &BTreeSet::from([vec![0]]));
        let out = concat(&['a']).apply_prefix(&OpArgs::Tuple(vec![eps, a.clone()]), 2).unwrap();
        assert_eq!(out, a);
    }

    #[test]
    fn min_of_empty_set_is_zero() {
        let out = fin_min().apply_prefix(&OpArgs::set(vec![]), 3).unwrap();
        assert_eq!(out, ints(&[0, 0, 0]));
    }

    #[test]
    fn double_and_even_roundtrip() {
        let sig = BehaviorSignature::rational_stream();
        let nat = LazyBehavior::stream(sig, |k| Value::int(k as i64));
        let d = double().apply_full(&BehaviorArgs::Tuple(vec![nat])).unwrap();
        assert_eq!(flatten_pairs(&d.produce(2)), vec![Value::int(0), Value::int(0), Value::int(1), Value::int(1)]);
        let e = even().apply_full(&BehaviorArgs::Tuple(vec![d])).unwrap();
        assert_eq!(e.produce(3), ints(&[0, 1, 2]));
    }

    #[test]
    fn first_zero_caps_at_depth() {
        let op = first_zero();
        let out = op.apply_prefix(&OpArgs::Tuple(vec![ints(&[3, 1, 0, 2])]), 4).unwrap();
        assert_eq!(out.maybe_value(), 2);
        let out = op.apply_prefix(&OpArgs::Tuple(vec![ints(&[3, 1])]), 2).unwrap();
        assert_eq!(out.maybe_value(), 2);
    }

    #[test]
    fn maybe_tables_register_by_causality() {
        let mut reg = crate::causal::Registry::with_config(crate::causal::CheckConfig { max_depth: 5, samples: 100, ..Default::default() });
        reg.register(maybe_table("id", vec![Some(0), Some(1), None])).unwrap();
        assert!(reg.register(maybe_table("bad", vec![Some(1), Some(1), Some(0)])).is_err());
        let sig = BehaviorSignature::maybe();
        let out = reg.lookup("id").unwrap().apply_prefix(&OpArgs::Tuple(vec![Approximant::from_maybe(&sig, Some(1), 4)]), 4).unwrap();
        assert_eq!(out.maybe_value(), 1);
    }

    #[test]
    fn maybe_characterization_examples() {
        // identity and constants are causal
        assert!(is_causal_maybe_fn(&[Some(0), Some(1), None]));
        assert!(is_causal_maybe_fn(&[Some(1), Some(1), Some(1)]));
        // f(ω) = 0 while f(1) = 1: observing 0 of ω's output needs all of ω
        assert!(!is_causal_maybe_fn(&[Some(1), Some(1), Some(0)]));
    }
}
