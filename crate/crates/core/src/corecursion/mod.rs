//! Guarded equation systems `g : X → B F* X` and their unique solutions at every
//! finite depth.
//!
//! A system assigns to each variable one behavior step: a constructor, an output
//! expression, and one continuation term per successor. Continuations are terms over
//! variables, oracles (externally supplied behaviors) and operation symbols. The
//! solution is computed stage by stage: `sol_0(x) = ⋆` and
//! `sol_{i+1}(x) = node(tag, out, [eval_i(t) for each continuation t])`.
//!
//! Variables may take oracle arguments (`z[σ, τ']`), which lets a system define a
//! function on behaviors such as the shuffle product by its stream equations.

pub mod gsos;
mod json;
pub mod solver;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::behavior::{BehaviorSignature, LazyBehavior};
use crate::value::Value;

pub use json::{signature_from_json, signature_to_json};
pub use gsos::{solve_gsos, GTerm, GsosInterp, GsosRule, GsosSpec, GsosStep, StepView};
pub use solver::{composite, solve, solve_cross, Interpretation, PrefixSolution, State, UnfoldingReport};

pub type Bindings = BTreeMap<String, LazyBehavior>;

/// A reference to an oracle behavior: a declared name, the `k`-th argument of the
/// enclosing variable, or a successor (`tail`, letter derivative) of another reference.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleRef {
    Named(String),
    Param(usize),
    Child(Box<OracleRef>, usize),
}

impl OracleRef {
    pub fn named(name: impl Into<String>) -> Self {
        OracleRef::Named(name.into())
    }

    /// Successor `k` (for streams `k = 0` is the tail).
    pub fn child(self, k: usize) -> Self {
        OracleRef::Child(Box::new(self), k)
    }

    pub fn tail(self) -> Self {
        self.child(0)
    }
}

/// An oracle reference with parameters resolved: a named behavior and a successor path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedOracle {
    pub name: String,
    pub path: Vec<usize>,
}

impl fmt::Display for ClosedOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for k in &self.path {
            write!(f, "'{k}")?;
        }
        Ok(())
    }
}

/// Output data of a step, possibly reading the current outputs of oracles.
#[derive(Clone, Debug, PartialEq)]
pub enum OutExpr {
    Lit(Value),
    Head(OracleRef),
    Add(Box<OutExpr>, Box<OutExpr>),
    Sub(Box<OutExpr>, Box<OutExpr>),
    Mul(Box<OutExpr>, Box<OutExpr>),
    Neg(Box<OutExpr>),
    And(Box<OutExpr>, Box<OutExpr>),
    Or(Box<OutExpr>, Box<OutExpr>),
    Not(Box<OutExpr>),
}

impl OutExpr {
    pub fn int(n: i64) -> Self {
        OutExpr::Lit(Value::int(n))
    }

    pub fn bool(b: bool) -> Self {
        OutExpr::Lit(Value::Bool(b))
    }

    pub fn head(r: OracleRef) -> Self {
        OutExpr::Head(r)
    }

    pub fn mul(a: OutExpr, b: OutExpr) -> Self {
        OutExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn add(a: OutExpr, b: OutExpr) -> Self {
        OutExpr::Add(Box::new(a), Box::new(b))
    }

    fn oracle_refs<'a>(&'a self, acc: &mut Vec<&'a OracleRef>) {
        match self {
            OutExpr::Lit(_) => {}
            OutExpr::Head(r) => acc.push(r),
            OutExpr::Neg(a) | OutExpr::Not(a) => a.oracle_refs(acc),
            OutExpr::Add(a, b) | OutExpr::Sub(a, b) | OutExpr::Mul(a, b) | OutExpr::And(a, b) | OutExpr::Or(a, b) => {
                a.oracle_refs(acc);
                b.oracle_refs(acc);
            }
        }
    }
}

/// A continuation term, an element of `F* X`.
#[derive(Clone, Debug)]
pub enum Term {
    Var { name: String, args: Vec<OracleRef> },
    Oracle(OracleRef),
    Op { symbol: String, args: Vec<Term> },
    Const(LazyBehavior),
    /// A finite sequence; only meaningful as an argument of a set-of-sequences operation.
    Seq(Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var { name: name.into(), args: vec![] }
    }

    pub fn var_with(name: impl Into<String>, args: Vec<OracleRef>) -> Self {
        Term::Var { name: name.into(), args }
    }

    pub fn oracle(name: impl Into<String>) -> Self {
        Term::Oracle(OracleRef::named(name))
    }

    pub fn op(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Term::Op { symbol: symbol.into(), args }
    }

    /// Operation symbols occurring in the term.
    pub fn symbols(&self, acc: &mut BTreeSet<String>) {
        match self {
            Term::Op { symbol, args } => {
                acc.insert(symbol.clone());
                args.iter().for_each(|a| a.symbols(acc));
            }
            Term::Seq(ts) => ts.iter().for_each(|a| a.symbols(acc)),
            _ => {}
        }
    }
}

/// One guarded equation `x[p_0, …] = tag(out, kids…)`.
#[derive(Clone, Debug)]
pub struct Equation {
    /// Number of oracle parameters.
    pub params: usize,
    pub tag: String,
    pub out: OutExpr,
    pub kids: Vec<Term>,
}

impl Equation {
    pub fn new(tag: impl Into<String>, out: OutExpr, kids: Vec<Term>) -> Self {
        Equation { params: 0, tag: tag.into(), out, kids }
    }

    pub fn with_params(mut self, params: usize) -> Self {
        self.params = params;
        self
    }
}

#[derive(Clone, Debug)]
pub struct EquationSystem {
    pub signature: Arc<BehaviorSignature>,
    pub equations: BTreeMap<String, Equation>,
    /// Declared oracle names; each must be bound when solving.
    pub oracles: Vec<String>,
}

impl EquationSystem {
    pub fn new(signature: Arc<BehaviorSignature>) -> Self {
        EquationSystem { signature, equations: BTreeMap::new(), oracles: vec![] }
    }

    pub fn equation(mut self, var: impl Into<String>, eq: Equation) -> Self {
        self.equations.insert(var.into(), eq);
        self
    }

    pub fn oracle(mut self, name: impl Into<String>) -> Self {
        self.oracles.push(name.into());
        self
    }

    /// Operation symbols used anywhere in the system.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        for eq in self.equations.values() {
            eq.kids.iter().for_each(|t| t.symbols(&mut acc));
        }
        acc
    }
}
