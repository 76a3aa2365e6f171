//! Abstract GSOS rule sets and the operations they induce on approximants.
//!
//! A rule sees each argument's first step (constructor and output) and produces
//! one step whose continuations are terms over the arguments and their successors.
//! The stage maps are built by iteration: on depth-`(i+1)` arguments, pair each
//! argument's step with the argument projected to depth `i`, apply the rule, and
//! evaluate the produced continuations with the depth-`i` maps.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use super::solver::{Interpretation, PrefixSolution};
use super::{Bindings, EquationSystem};
use crate::behavior::{Approximant, BehaviorSignature, LazyBehavior};
use crate::causal::{OpArgs, Shape};
use crate::error::SolveError;
use crate::value::Value;

/// What a rule may inspect about an argument: its first step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepView {
    pub tag: String,
    pub out: Value,
    pub arity: usize,
}

/// Continuation terms of a rule.
#[derive(Clone)]
pub enum GTerm {
    /// Argument `j` itself.
    Arg(usize),
    /// Successor `k` of argument `j`.
    Succ(usize, usize),
    Op(String, Vec<GTerm>),
    Const(LazyBehavior),
}

impl fmt::Debug for GTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GTerm::Arg(j) => write!(f, "x{j}"),
            GTerm::Succ(j, k) => write!(f, "x{j}'{k}"),
            GTerm::Op(s, args) => f.debug_tuple(s).field(args).finish(),
            GTerm::Const(b) => write!(f, "{b:?}"),
        }
    }
}

impl GTerm {
    pub fn op(symbol: impl Into<String>, args: Vec<GTerm>) -> Self {
        GTerm::Op(symbol.into(), args)
    }
}

#[derive(Clone, Debug)]
pub struct GsosStep {
    pub tag: String,
    pub out: Value,
    pub kids: Vec<GTerm>,
}

/// Returns `None` when the rule does not cover the given argument steps.
pub type GsosRule = Arc<dyn Fn(&[StepView]) -> Option<GsosStep> + Send + Sync>;

#[derive(Clone)]
pub struct GsosSpec {
    signature: Arc<BehaviorSignature>,
    rules: BTreeMap<String, (usize, GsosRule)>,
}

impl fmt::Debug for GsosSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GsosSpec")
            .field("signature", &self.signature.name())
            .field("rules", &self.rules.keys().collect::<Vec<_>>())
            .finish()
    }
}

fn rat(v: &Value) -> num_rational::BigRational {
    v.as_rat().cloned().unwrap_or_default()
}

impl GsosSpec {
    pub fn new(signature: Arc<BehaviorSignature>) -> Self {
        GsosSpec { signature, rules: BTreeMap::new() }
    }

    pub fn signature(&self) -> &Arc<BehaviorSignature> {
        &self.signature
    }

    pub fn rule(
        mut self,
        symbol: impl Into<String>,
        arity: usize,
        rule: impl Fn(&[StepView]) -> Option<GsosStep> + Send + Sync + 'static,
    ) -> Self {
        self.rules.insert(symbol.into(), (arity, Arc::new(rule)));
        self
    }

    pub fn has_rule(&self, symbol: &str) -> bool {
        self.rules.contains_key(symbol)
    }

    /// `(x ⊕ y)_0 = x_0 + y_0`, `(x ⊕ y)' = x' ⊕ y'`.
    pub fn with_plus(self) -> Self {
        self.rule("plus", 2, |s| {
            Some(GsosStep {
                tag: "cons".into(),
                out: Value::Rat(rat(&s[0].out) + rat(&s[1].out)),
                kids: vec![GTerm::op("plus", vec![GTerm::Succ(0, 0), GTerm::Succ(1, 0)])],
            })
        })
    }

    /// `(x ⊗ y)_0 = x_0 · y_0`, `(x ⊗ y)' = x ⊗ y' ⊕ x' ⊗ y`. Uses the arguments themselves.
    pub fn with_shuffle(self) -> Self {
        self.rule("shuffle", 2, |s| {
            Some(GsosStep {
                tag: "cons".into(),
                out: Value::Rat(rat(&s[0].out) * rat(&s[1].out)),
                kids: vec![GTerm::op(
                    "plus",
                    vec![
                        GTerm::op("shuffle", vec![GTerm::Arg(0), GTerm::Succ(1, 0)]),
                        GTerm::op("shuffle", vec![GTerm::Succ(0, 0), GTerm::Arg(1)]),
                    ],
                )],
            })
        })
    }

    /// `(x ⊙ y)_0 = x_0 · y_0`, `(x ⊙ y)' = x' ⊙ y ⊕ [x_0] ⊙ y'`.
    pub fn with_convolution(self) -> Self {
        let sig = self.signature.clone();
        self.rule("conv", 2, move |s| {
            let x0 = GTerm::Const(LazyBehavior::scalar(sig.clone(), s[0].out.clone()));
            Some(GsosStep {
                tag: "cons".into(),
                out: Value::Rat(rat(&s[0].out) * rat(&s[1].out)),
                kids: vec![GTerm::op(
                    "plus",
                    vec![
                        GTerm::op("conv", vec![GTerm::Succ(0, 0), GTerm::Arg(1)]),
                        GTerm::op("conv", vec![x0, GTerm::Succ(1, 0)]),
                    ],
                )],
            })
        })
    }

    /// `plus`, `shuffle` and `conv` on rational streams.
    pub fn stream_builtins() -> Self {
        GsosSpec::new(BehaviorSignature::rational_stream()).with_plus().with_shuffle().with_convolution()
    }
}

/// The operations induced by a GSOS rule set, memoized per `(symbol, args)`.
pub struct GsosInterp {
    spec: Arc<GsosSpec>,
    memo: HashMap<(String, Vec<Approximant>), Approximant>,
}

impl GsosInterp {
    pub fn new(spec: impl Into<Arc<GsosSpec>>) -> Self {
        GsosInterp { spec: spec.into(), memo: HashMap::new() }
    }

    fn eval(&mut self, t: &GTerm, args: &[Approximant], d: usize) -> Result<Approximant, SolveError> {
        match t {
            GTerm::Arg(j) => Ok(args[*j].project(d)?),
            GTerm::Succ(j, k) => args[*j].child(*k).ok_or_else(|| SolveError::MissingGsosRule {
                symbol: format!("successor {k} of argument {j}"),
                shape: "argument has no such successor".into(),
            }),
            GTerm::Const(b) => Ok(b.produce(d)),
            GTerm::Op(s, ts) => {
                let vals = ts.iter().map(|a| self.eval(a, args, d)).collect::<Result<Vec<_>, _>>()?;
                self.apply(s, &OpArgs::Tuple(vals), d)
            }
        }
    }
}

impl Interpretation for GsosInterp {
    fn shape_of(&self, symbol: &str, sig: &BehaviorSignature) -> Result<Shape, SolveError> {
        if *self.spec.signature != *sig {
            return Err(SolveError::SignatureMismatch {
                symbol: symbol.into(),
                expected: sig.name().into(),
                got: self.spec.signature.name().into(),
            });
        }
        self.spec
            .rules
            .get(symbol)
            .map(|(k, _)| Shape::Tuple(*k))
            .ok_or_else(|| SolveError::MissingGsosRule { symbol: symbol.into(), shape: "any".into() })
    }

    fn apply(&mut self, symbol: &str, args: &OpArgs, depth: usize) -> Result<Approximant, SolveError> {
        let OpArgs::Tuple(args) = args else {
            return Err(SolveError::IllFormed { var: symbol.into(), msg: "GSOS operations take tuples".into() });
        };
        if depth == 0 {
            return Ok(Approximant::unit());
        }
        let key = (symbol.to_string(), args.clone());
        if let Some(a) = self.memo.get(&key) {
            return Ok(a.clone());
        }
        let (arity, rule) = self
            .spec
            .rules
            .get(symbol)
            .cloned()
            .ok_or_else(|| SolveError::MissingGsosRule { symbol: symbol.into(), shape: "any".into() })?;
        if args.len() != arity {
            return Err(SolveError::OpArity { symbol: symbol.into(), expected: arity, got: args.len() });
        }
        let sig = self.spec.signature.clone();
        let views: Vec<StepView> = args
            .iter()
            .map(|a| {
                let n = a.root().expect("depth >= 1");
                let c = &sig.constructors()[n.ctor];
                StepView { tag: c.tag.clone(), out: n.out.clone(), arity: c.arity }
            })
            .collect();
        let step = rule(&views).ok_or_else(|| SolveError::MissingGsosRule {
            symbol: symbol.into(),
            shape: views.iter().map(|v| v.tag.as_str()).collect::<Vec<_>>().join(","),
        })?;
        let kids = step.kids.iter().map(|t| self.eval(t, args, depth - 1)).collect::<Result<Vec<_>, _>>()?;
        let out = if kids.is_empty() {
            Approximant::terminal(&sig, &step.tag, step.out, depth)?
        } else {
            Approximant::node(&sig, &step.tag, step.out, kids)?
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// `sol_n(x)` with operations interpreted through the GSOS rules.
pub fn solve_gsos(
    spec: &GsosSpec,
    system: &EquationSystem,
    bindings: &Bindings,
    x: &str,
    n: usize,
) -> Result<Approximant, SolveError> {
    PrefixSolution::new(system.clone(), GsosInterp::new(spec.clone()), bindings.clone())?.solve(x, n)
}
