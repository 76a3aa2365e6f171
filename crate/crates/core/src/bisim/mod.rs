//! Language equalities by bisimulation up to context, over Brzozowski derivatives.
//!
//! Expressions are kept in a normal form: sums are flattened, sorted and
//! deduplicated with `0` dropped, concatenation associates to the right with `0`
//! absorbing and `1` neutral, and `(e*)* = e*`. Atoms stand for unknown languages;
//! their derivatives are fresh atoms (`K_a`, `K_ab`, …) and their empty-word flags
//! may be symbolic, in which case every valuation is explored.

mod closure;
mod env;
mod parse;
mod prove;
mod stream;

use std::fmt;

pub use closure::{in_upto_closure, Combinators, Derivation, Relation, Rule};
pub use env::{AtomFlag, Env, Truth, MAX_SYMBOLIC};
pub use parse::parse_expr;
pub use prove::{bstep, env_from_json, prove_upto, recheck, Bounds, Counterexample, Outcome, Proof, RecheckReport, Step, StepKind};
pub use stream::{stream_eq, StreamEq};

/// An atom `name` differentiated along `path`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub name: String,
    pub path: String,
}

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom { name: name.into(), path: String::new() }
    }

    pub fn deriv(&self, a: char) -> Atom {
        let mut path = self.path.clone();
        path.push(a);
        Atom { name: self.name.clone(), path }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}_{}", self.name, self.path)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LangExpr {
    Empty,
    Eps,
    Letter(char),
    Atom(Atom),
    /// At least two summands, sorted, distinct, none of them a sum or `0`.
    Sum(Vec<LangExpr>),
    Cat(Box<LangExpr>, Box<LangExpr>),
    Star(Box<LangExpr>),
    /// `{ε} ∩ e`: the empty-word guard produced when differentiating `e·f` with
    /// a symbolic `eps(e)`.
    Nu(Box<LangExpr>),
}

impl LangExpr {
    pub fn letter(a: char) -> Self {
        LangExpr::Letter(a)
    }

    pub fn atom(name: impl Into<String>) -> Self {
        LangExpr::Atom(Atom::new(name))
    }

    pub fn sum(a: LangExpr, b: LangExpr) -> Self {
        Self::sum_all([a, b])
    }

    pub fn sum_all(items: impl IntoIterator<Item = LangExpr>) -> Self {
        let mut flat = Vec::new();
        for e in items {
            match e {
                LangExpr::Empty => {}
                LangExpr::Sum(xs) => flat.extend(xs),
                other => flat.push(other),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => LangExpr::Empty,
            1 => flat.pop().unwrap(),
            _ => LangExpr::Sum(flat),
        }
    }

    pub fn cat(a: LangExpr, b: LangExpr) -> Self {
        match (a, b) {
            (LangExpr::Empty, _) | (_, LangExpr::Empty) => LangExpr::Empty,
            (LangExpr::Eps, b) => b,
            (a, LangExpr::Eps) => a,
            (LangExpr::Cat(x, y), b) => LangExpr::cat(*x, LangExpr::cat(*y, b)),
            (a, b) => LangExpr::Cat(Box::new(a), Box::new(b)),
        }
    }

    pub fn cat_all(items: impl IntoIterator<Item = LangExpr>) -> Self {
        let items: Vec<LangExpr> = items.into_iter().collect();
        items.into_iter().rev().fold(LangExpr::Eps, |acc, e| LangExpr::cat(e, acc))
    }

    pub fn star(e: LangExpr) -> Self {
        match e {
            LangExpr::Empty | LangExpr::Eps => LangExpr::Eps,
            s @ LangExpr::Star(_) => s,
            e => LangExpr::Star(Box::new(e)),
        }
    }

    /// Structural part of `{ε} ∩ e`; atoms stay guarded.
    pub fn nu(e: LangExpr) -> Self {
        match e {
            LangExpr::Empty | LangExpr::Letter(_) => LangExpr::Empty,
            LangExpr::Eps | LangExpr::Star(_) => LangExpr::Eps,
            LangExpr::Sum(xs) => LangExpr::sum_all(xs.into_iter().map(LangExpr::nu)),
            LangExpr::Cat(a, b) => LangExpr::cat(LangExpr::nu(*a), LangExpr::nu(*b)),
            n @ LangExpr::Nu(_) => n,
            a @ LangExpr::Atom(_) => LangExpr::Nu(Box::new(a)),
        }
    }

    /// Rebuild through the smart constructors.
    pub fn normalize(&self) -> LangExpr {
        match self {
            LangExpr::Sum(xs) => LangExpr::sum_all(xs.iter().map(LangExpr::normalize)),
            LangExpr::Cat(a, b) => LangExpr::cat(a.normalize(), b.normalize()),
            LangExpr::Star(e) => LangExpr::star(e.normalize()),
            LangExpr::Nu(e) => LangExpr::nu(e.normalize()),
            e => e.clone(),
        }
    }

    /// Summands (a non-sum is its own single summand).
    pub fn summands(&self) -> &[LangExpr] {
        match self {
            LangExpr::Sum(xs) => xs,
            LangExpr::Empty => &[],
            e => std::slice::from_ref(e),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            LangExpr::Sum(xs) => xs.iter().map(LangExpr::size).sum::<usize>() + xs.len() - 1,
            LangExpr::Cat(a, b) => 1 + a.size() + b.size(),
            LangExpr::Star(e) | LangExpr::Nu(e) => 1 + e.size(),
            _ => 1,
        }
    }

    /// All subexpressions, including `self`.
    pub fn subterms(&self, acc: &mut Vec<LangExpr>) {
        acc.push(self.clone());
        match self {
            LangExpr::Sum(xs) => xs.iter().for_each(|x| x.subterms(acc)),
            LangExpr::Cat(a, b) => {
                a.subterms(acc);
                b.subterms(acc);
            }
            LangExpr::Star(e) | LangExpr::Nu(e) => e.subterms(acc),
            _ => {}
        }
    }

    fn prec(&self) -> u8 {
        match self {
            LangExpr::Sum(_) => 0,
            LangExpr::Cat(..) => 1,
            _ => 2,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            LangExpr::Empty => write!(f, "0"),
            LangExpr::Eps => write!(f, "1"),
            LangExpr::Letter(a) => write!(f, "{a}"),
            LangExpr::Atom(a) => write!(f, "{a}"),
            LangExpr::Sum(xs) => {
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    x.fmt_at(f, 1)?;
                }
                Ok(())
            }
            LangExpr::Cat(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "·")?;
                b.fmt_at(f, 1)
            }
            LangExpr::Star(e) => {
                e.fmt_at(f, 2)?;
                write!(f, "*")
            }
            LangExpr::Nu(e) => {
                write!(f, "nu(")?;
                e.fmt_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for LangExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
