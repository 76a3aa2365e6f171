//! Depth-synchronous memoized solving of guarded systems.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::{Bindings, ClosedOracle, EquationSystem, OracleRef, OutExpr, Term};
use crate::behavior::{Approximant, BehaviorSignature, LazyBehavior};
use crate::causal::{BehaviorArgs, CausalOperation, OpArgs, Registry, Shape};
use crate::error::{CausalError, SolveError};
use crate::value::Value;

/// How operation symbols act on depth-`i` approximants.
pub trait Interpretation {
    /// Check that `symbol` may be used inside a guarded system over `sig`; returns its shape.
    fn shape_of(&self, symbol: &str, sig: &BehaviorSignature) -> Result<Shape, SolveError>;

    /// The stage map `α_depth`.
    fn apply(&mut self, symbol: &str, args: &OpArgs, depth: usize) -> Result<Approximant, SolveError>;
}

fn registered<'r>(reg: &'r Registry, symbol: &str) -> Result<&'r CausalOperation, SolveError> {
    reg.lookup(symbol).ok_or_else(|| match reg.rejection(symbol) {
        Some(reason) => SolveError::NonCausalOp { symbol: symbol.into(), reason: reason.into() },
        None => SolveError::UnregisteredOp(symbol.into()),
    })
}

fn registry_shape(reg: &Registry, symbol: &str, sig: &BehaviorSignature) -> Result<Shape, SolveError> {
    let op = registered(reg, symbol)?;
    if op.is_cross() {
        return Err(SolveError::CrossSignatureInRecursion { symbol: symbol.into() });
    }
    if **op.output() != *sig {
        return Err(SolveError::SignatureMismatch {
            symbol: symbol.into(),
            expected: sig.name().into(),
            got: op.output().name().into(),
        });
    }
    Ok(op.shape())
}

impl Interpretation for Registry {
    fn shape_of(&self, symbol: &str, sig: &BehaviorSignature) -> Result<Shape, SolveError> {
        registry_shape(self, symbol, sig)
    }

    fn apply(&mut self, symbol: &str, args: &OpArgs, depth: usize) -> Result<Approximant, SolveError> {
        Ok(registered(self, symbol)?.apply_prefix(args, depth)?)
    }
}

impl Interpretation for Arc<Registry> {
    fn shape_of(&self, symbol: &str, sig: &BehaviorSignature) -> Result<Shape, SolveError> {
        registry_shape(self, symbol, sig)
    }

    fn apply(&mut self, symbol: &str, args: &OpArgs, depth: usize) -> Result<Approximant, SolveError> {
        Ok(registered(self, symbol)?.apply_prefix(args, depth)?)
    }
}

/// A variable instantiated with closed oracle arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub var: String,
    pub args: Vec<ClosedOracle>,
}

impl State {
    pub fn var(name: impl Into<String>) -> Self {
        State { var: name.into(), args: vec![] }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.var)?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
            write!(f, "[{}]", args.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldingFailure {
    pub state: State,
    pub depth: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldingReport {
    /// Memo entries verified.
    pub checked: usize,
    pub failure: Option<UnfoldingFailure>,
}

impl UnfoldingReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// The solution of a system at finite depths, with its memo table.
pub struct PrefixSolution<I> {
    system: Arc<EquationSystem>,
    interp: I,
    bindings: Bindings,
    memo: HashMap<(State, usize), Approximant>,
    oracles: HashMap<ClosedOracle, LazyBehavior>,
}

impl<I: Interpretation> PrefixSolution<I> {
    /// Validate the system against the interpretation and bindings.
    ///
    /// Refuses unregistered symbols, symbols whose registration was refused,
    /// cross-signature operations, unbound oracles and arity mismatches.
    pub fn new(system: impl Into<Arc<EquationSystem>>, interp: I, bindings: Bindings) -> Result<Self, SolveError> {
        let sol = PrefixSolution {
            system: system.into(),
            interp,
            bindings,
            memo: HashMap::new(),
            oracles: HashMap::new(),
        };
        sol.validate()?;
        Ok(sol)
    }

    fn validate(&self) -> Result<(), SolveError> {
        let sys = &self.system;
        for name in &sys.oracles {
            if !self.bindings.contains_key(name) {
                return Err(SolveError::UnboundOracle(name.clone()));
            }
        }
        for (var, eq) in &sys.equations {
            let ill = |msg: String| SolveError::IllFormed { var: var.clone(), msg };
            let ctor = sys.signature.ctor_index(&eq.tag).ok_or_else(|| ill(format!("unknown constructor `{}`", eq.tag)))?;
            let arity = sys.signature.constructors()[ctor].arity;
            if eq.kids.len() != arity {
                return Err(ill(format!("`{}` takes {arity} continuations, got {}", eq.tag, eq.kids.len())));
            }
            let mut refs = Vec::new();
            eq.out.oracle_refs(&mut refs);
            for r in refs {
                self.validate_ref(r, eq.params, var)?;
            }
            for t in &eq.kids {
                self.validate_term(t, eq.params, var, false)?;
            }
        }
        Ok(())
    }

    fn validate_ref(&self, r: &OracleRef, params: usize, var: &str) -> Result<(), SolveError> {
        match r {
            OracleRef::Named(n) => {
                if !self.system.oracles.contains(n) && !self.bindings.contains_key(n) {
                    return Err(SolveError::IllFormed { var: var.into(), msg: format!("undeclared oracle `{n}`") });
                }
                if !self.bindings.contains_key(n) {
                    return Err(SolveError::UnboundOracle(n.clone()));
                }
                Ok(())
            }
            OracleRef::Param(k) if *k < params => Ok(()),
            OracleRef::Param(k) => Err(SolveError::IllFormed {
                var: var.into(),
                msg: format!("parameter #{k} out of range ({params} parameters)"),
            }),
            OracleRef::Child(inner, _) => self.validate_ref(inner, params, var),
        }
    }

    fn validate_term(&self, t: &Term, params: usize, var: &str, in_seqset: bool) -> Result<(), SolveError> {
        let sys = &self.system;
        match t {
            Term::Var { name, args } => {
                let eq = sys.equations.get(name).ok_or_else(|| SolveError::UnknownVariable(name.clone()))?;
                if eq.params != args.len() {
                    return Err(SolveError::VariableArity { name: name.clone(), expected: eq.params, got: args.len() });
                }
                args.iter().try_for_each(|r| self.validate_ref(r, params, var))
            }
            Term::Oracle(r) => {
                self.validate_ref(r, params, var)?;
                if let Some(b) = self.root_binding(r) {
                    if **b.signature() != *sys.signature {
                        return Err(SolveError::SignatureMismatch {
                            symbol: root_name(r).unwrap_or_default(),
                            expected: sys.signature.name().into(),
                            got: b.signature().name().into(),
                        });
                    }
                }
                Ok(())
            }
            Term::Const(b) if **b.signature() != *sys.signature => Err(SolveError::SignatureMismatch {
                symbol: "constant".into(),
                expected: sys.signature.name().into(),
                got: b.signature().name().into(),
            }),
            Term::Const(_) => Ok(()),
            Term::Op { symbol, args } => {
                let shape = self.interp.shape_of(symbol, &sys.signature)?;
                if let Shape::Tuple(k) = shape {
                    if args.len() != k {
                        return Err(SolveError::OpArity { symbol: symbol.clone(), expected: k, got: args.len() });
                    }
                }
                let seqs = shape == Shape::SeqSet;
                for a in args {
                    if seqs != matches!(a, Term::Seq(_)) {
                        return Err(SolveError::IllFormed {
                            var: var.into(),
                            msg: if seqs {
                                format!("arguments of `{symbol}` must be sequences")
                            } else {
                                format!("sequence argument passed to `{symbol}`")
                            },
                        });
                    }
                    self.validate_term(a, params, var, seqs)?;
                }
                Ok(())
            }
            Term::Seq(ts) if in_seqset => ts.iter().try_for_each(|a| self.validate_term(a, params, var, false)),
            Term::Seq(_) => {
                Err(SolveError::IllFormed { var: var.into(), msg: "sequence outside a set-of-sequences operation".into() })
            }
        }
    }

    fn root_binding(&self, r: &OracleRef) -> Option<&LazyBehavior> {
        root_name(r).and_then(|n| self.bindings.get(&n))
    }

    pub fn system(&self) -> &EquationSystem {
        &self.system
    }

    pub fn interpretation(&self) -> &I {
        &self.interp
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Build a state from a variable and oracle references (no parameters allowed).
    pub fn state(&self, var: &str, args: &[OracleRef]) -> Result<State, SolveError> {
        let eq = self.system.equations.get(var).ok_or_else(|| SolveError::UnknownVariable(var.into()))?;
        if eq.params != args.len() {
            return Err(SolveError::VariableArity { name: var.into(), expected: eq.params, got: args.len() });
        }
        args.iter().try_for_each(|r| self.validate_ref(r, 0, var))?;
        let top = State::var(var);
        Ok(State { var: var.into(), args: args.iter().map(|r| resolve(r, &top)).collect() })
    }

    /// `sol_n(var)` for a variable without parameters.
    pub fn solve(&mut self, var: &str, n: usize) -> Result<Approximant, SolveError> {
        let st = self.state(var, &[])?;
        self.solve_state(&st, n)
    }

    pub fn solve_state(&mut self, state: &State, n: usize) -> Result<Approximant, SolveError> {
        if n == 0 {
            return Ok(Approximant::unit());
        }
        let key = (state.clone(), n);
        if let Some(a) = self.memo.get(&key) {
            return Ok(a.clone());
        }
        let a = self.unfold(state, n)?;
        self.memo.insert(key, a.clone());
        Ok(a)
    }

    /// One unfolding of `g` at depth `n ≥ 1`, with continuations at depth `n - 1`.
    fn unfold(&mut self, state: &State, n: usize) -> Result<Approximant, SolveError> {
        let system = self.system.clone();
        let eq = system.equations.get(&state.var).ok_or_else(|| SolveError::UnknownVariable(state.var.clone()))?;
        let sig = &system.signature;
        let ctor = sig.ctor_index(&eq.tag).expect("validated");
        let out = self.eval_out(&eq.out, state)?;
        if eq.kids.is_empty() {
            return Ok(Approximant::terminal(sig, &eq.tag, out, n)?);
        }
        let kids = eq.kids.iter().map(|t| self.eval(t, state, n - 1)).collect::<Result<Vec<_>, _>>()?;
        Ok(Approximant::node(sig, &sig.constructors()[ctor].tag, out, kids)?)
    }

    fn oracle(&mut self, c: &ClosedOracle) -> Result<LazyBehavior, SolveError> {
        if let Some(b) = self.oracles.get(c) {
            return Ok(b.clone());
        }
        let root = self.bindings.get(&c.name).ok_or_else(|| SolveError::UnboundOracle(c.name.clone()))?;
        let b = root.derive(&c.path)?;
        self.oracles.insert(c.clone(), b.clone());
        Ok(b)
    }

    fn eval_out(&mut self, e: &OutExpr, state: &State) -> Result<Value, SolveError> {
        let num = |v: Value| match v {
            Value::Rat(r) => Ok(r),
            other => Err(SolveError::Output(format!("expected a number, got {other}"))),
        };
        let boolean = |v: Value| v.as_bool().ok_or_else(|| SolveError::Output(format!("expected a boolean, got {v}")));
        Ok(match e {
            OutExpr::Lit(v) => v.clone(),
            OutExpr::Head(r) => self.oracle(&resolve(r, state))?.head().1,
            OutExpr::Add(a, b) => Value::Rat(num(self.eval_out(a, state)?)? + num(self.eval_out(b, state)?)?),
            OutExpr::Sub(a, b) => Value::Rat(num(self.eval_out(a, state)?)? - num(self.eval_out(b, state)?)?),
            OutExpr::Mul(a, b) => Value::Rat(num(self.eval_out(a, state)?)? * num(self.eval_out(b, state)?)?),
            OutExpr::Neg(a) => Value::Rat(-num(self.eval_out(a, state)?)?),
            OutExpr::And(a, b) => Value::Bool(boolean(self.eval_out(a, state)?)? && boolean(self.eval_out(b, state)?)?),
            OutExpr::Or(a, b) => Value::Bool(boolean(self.eval_out(a, state)?)? || boolean(self.eval_out(b, state)?)?),
            OutExpr::Not(a) => Value::Bool(!boolean(self.eval_out(a, state)?)?),
        })
    }

    /// `eval_d(t)` in the context of `state` (which supplies parameter oracles).
    fn eval(&mut self, t: &Term, state: &State, d: usize) -> Result<Approximant, SolveError> {
        match t {
            Term::Var { name, args } => {
                let st = State { var: name.clone(), args: args.iter().map(|r| resolve(r, state)).collect() };
                self.solve_state(&st, d)
            }
            Term::Oracle(r) => Ok(self.oracle(&resolve(r, state))?.produce(d)),
            Term::Const(b) => Ok(b.produce(d)),
            Term::Op { symbol, args } => {
                let shape = self.interp.shape_of(symbol, &self.system.signature)?;
                let op_args = match shape {
                    Shape::Tuple(_) => OpArgs::Tuple(self.eval_all(args, state, d)?),
                    Shape::FinSet => OpArgs::set(self.eval_all(args, state, d)?),
                    Shape::SeqSet => OpArgs::seqs(
                        args.iter()
                            .map(|a| match a {
                                Term::Seq(ts) => self.eval_all(ts, state, d),
                                _ => Err(SolveError::IllFormed {
                                    var: state.var.clone(),
                                    msg: format!("arguments of `{symbol}` must be sequences"),
                                }),
                            })
                            .collect::<Result<_, _>>()?,
                    ),
                };
                self.interp.apply(symbol, &op_args, d)
            }
            Term::Seq(_) => Err(SolveError::IllFormed {
                var: state.var.clone(),
                msg: "sequence outside a set-of-sequences operation".into(),
            }),
        }
    }

    fn eval_all(&mut self, ts: &[Term], state: &State, d: usize) -> Result<Vec<Approximant>, SolveError> {
        ts.iter().map(|t| self.eval(t, state, d)).collect()
    }

    /// Evaluate a closed term (no variable parameters) at depth `n`, e.g. `ones ⊗ ones`.
    pub fn solve_term(&mut self, term: &Term, n: usize) -> Result<Approximant, SolveError> {
        self.validate_term(term, 0, "<term>", false)?;
        self.eval(term, &State::var("<term>"), n)
    }

    /// Replace a memo entry. Only useful for fault-injection tests of [`Self::check_unfolding`].
    pub fn overwrite_memo(&mut self, state: &State, depth: usize, a: Approximant) {
        self.memo.insert((state.clone(), depth), a);
    }

    /// Verify the unfolding square at every memoized `(state, depth)`, shallowest first:
    /// the root of `sol_d(x)` is `g(x)`'s constructor and output, child `k` equals
    /// `eval_{d-1}` of continuation `k`, and `sol_d(x)` projects to `sol_{d-1}(x)`.
    pub fn check_unfolding(&mut self, roots: &[State], n: usize) -> Result<UnfoldingReport, SolveError> {
        for r in roots {
            self.solve_state(r, n)?;
        }
        let mut keys: Vec<(State, usize)> = self.memo.keys().cloned().collect();
        keys.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let system = self.system.clone();
        let mut checked = 0;
        for (state, d) in keys {
            let entry = self.memo[&(state.clone(), d)].clone();
            let eq = &system.equations[&state.var];
            let fail = |reason: String| {
                Ok(UnfoldingReport { checked, failure: Some(UnfoldingFailure { state: state.clone(), depth: d, reason }) })
            };
            let ctor = system.signature.ctor_index(&eq.tag).expect("validated");
            let out = self.eval_out(&eq.out, &state)?;
            match entry.root() {
                Some(node) if node.ctor == ctor && node.out == out => {}
                _ => return fail(format!("root is not `{}` with output {out}", eq.tag)),
            }
            for (k, t) in eq.kids.iter().enumerate() {
                let expected = self.eval(t, &state, d - 1)?;
                if entry.child(k).as_ref() != Some(&expected) {
                    return fail(format!("child {k} differs from its continuation at depth {}", d - 1));
                }
            }
            let below = self.solve_state(&state, d - 1)?;
            if entry.project(d - 1)? != below {
                return fail(format!("does not project to the depth-{} solution", d - 1));
            }
            checked += 1;
        }
        Ok(UnfoldingReport { checked, failure: None })
    }
}

impl<I: Interpretation + Send + 'static> PrefixSolution<I> {
    /// Package the solution for `state` as an element of `B_ω`.
    ///
    /// Depth 1 is solved eagerly so that immediate errors surface here; errors at
    /// deeper stages panic inside `produce`.
    pub fn into_lazy(mut self, state: State) -> Result<LazyBehavior, SolveError> {
        self.solve_state(&state, 1)?;
        let sig = self.system.signature.clone();
        let cell = Arc::new(Mutex::new(self));
        Ok(LazyBehavior::general(sig, move |i| {
            let mut sol = cell.lock().unwrap_or_else(|p| p.into_inner());
            sol.solve_state(&state, i).unwrap_or_else(|e| panic!("solving {state} at depth {i}: {e}"))
        }))
    }
}

fn root_name(r: &OracleRef) -> Option<String> {
    match r {
        OracleRef::Named(n) => Some(n.clone()),
        OracleRef::Param(_) => None,
        OracleRef::Child(inner, _) => root_name(inner),
    }
}

fn resolve(r: &OracleRef, state: &State) -> ClosedOracle {
    match r {
        OracleRef::Named(n) => ClosedOracle { name: n.clone(), path: vec![] },
        OracleRef::Param(k) => state.args[*k].clone(),
        OracleRef::Child(inner, k) => {
            let mut c = resolve(inner, state);
            c.path.push(*k);
            c
        }
    }
}

/// `sol_n(x)` with the registry's prefix actions.
pub fn solve(
    system: &EquationSystem,
    registry: &Registry,
    bindings: &Bindings,
    x: &str,
    n: usize,
) -> Result<Approximant, SolveError> {
    PrefixSolution::new(system.clone(), registry.clone(), bindings.clone())?.solve(x, n)
}

/// Apply a registered operation, typically one between different signatures such as
/// `even` or `double`, directly to complete behaviors. `n` is the output depth.
pub fn solve_cross(registry: &Registry, symbol: &str, args: &[LazyBehavior], n: usize) -> Result<Approximant, SolveError> {
    let op = registered(registry, symbol)?;
    for a in args {
        if a.signature() != op.input() {
            return Err(SolveError::SignatureMismatch {
                symbol: symbol.into(),
                expected: op.input().name().into(),
                got: a.signature().name().into(),
            });
        }
    }
    let full = match op.shape() {
        Shape::Tuple(k) if k != args.len() => {
            return Err(SolveError::OpArity { symbol: symbol.into(), expected: k, got: args.len() })
        }
        Shape::Tuple(_) => BehaviorArgs::Tuple(args.to_vec()),
        Shape::FinSet => BehaviorArgs::Set(args.to_vec()),
        Shape::SeqSet => BehaviorArgs::Seqs(vec![args.to_vec()]),
    };
    Ok(op.apply_prefix(&full.produce(n), n)?)
}

fn eval_composite(reg: &Registry, t: &Term, params: &[Approximant], d: usize) -> Result<Approximant, CausalError> {
    match t {
        Term::Oracle(OracleRef::Param(k)) => Ok(params[*k].clone()),
        Term::Const(b) => Ok(b.produce(d)),
        Term::Op { symbol, args } => {
            let op = reg.lookup(symbol).expect("validated");
            let ev = |ts: &[Term]| ts.iter().map(|a| eval_composite(reg, a, params, d)).collect::<Result<Vec<_>, _>>();
            let op_args = match op.shape() {
                Shape::Tuple(_) => OpArgs::Tuple(ev(args)?),
                Shape::FinSet => OpArgs::set(ev(args)?),
                Shape::SeqSet => OpArgs::seqs(
                    args.iter()
                        .map(|a| match a {
                            Term::Seq(ts) => ev(ts),
                            _ => unreachable!("validated"),
                        })
                        .collect::<Result<_, _>>()?,
                ),
            };
            op.apply_prefix(&op_args, d)
        }
        _ => unreachable!("validated"),
    }
}

fn validate_composite(reg: &Registry, t: &Term, arity: usize, sig: &BehaviorSignature, seq_ok: bool) -> Result<(), SolveError> {
    match t {
        Term::Oracle(OracleRef::Param(k)) if *k < arity => Ok(()),
        Term::Oracle(r) => Err(SolveError::IllFormed {
            var: "<composite>".into(),
            msg: format!("only placeholders #0..#{} may appear, found {r:?}", arity.saturating_sub(1)),
        }),
        Term::Const(b) if *b.signature().as_ref() == *sig => Ok(()),
        Term::Const(_) => Err(SolveError::IllFormed { var: "<composite>".into(), msg: "constant of another signature".into() }),
        Term::Op { symbol, args } => {
            let shape = registry_shape(reg, symbol, sig)?;
            if let Shape::Tuple(k) = shape {
                if k != args.len() {
                    return Err(SolveError::OpArity { symbol: symbol.clone(), expected: k, got: args.len() });
                }
            }
            let seqs = shape == Shape::SeqSet;
            args.iter().try_for_each(|a| {
                if seqs != matches!(a, Term::Seq(_)) {
                    return Err(SolveError::IllFormed { var: "<composite>".into(), msg: format!("bad arguments to `{symbol}`") });
                }
                validate_composite(reg, a, arity, sig, seqs)
            })
        }
        Term::Seq(ts) if seq_ok => ts.iter().try_for_each(|a| validate_composite(reg, a, arity, sig, false)),
        _ => Err(SolveError::IllFormed { var: "<composite>".into(), msg: "variables are not allowed in compositions".into() }),
    }
}

/// An operation defined by a term over registered operations, with placeholders
/// `Param(0..arity)` for its arguments. Compositions of causal operations are causal.
pub fn composite(
    symbol: impl Into<String>,
    registry: &Registry,
    body: Term,
    arity: usize,
    sig: Arc<BehaviorSignature>,
) -> Result<CausalOperation, SolveError> {
    validate_composite(registry, &body, arity, &sig, false)?;
    let reg = registry.clone();
    Ok(CausalOperation::new(symbol, Shape::Tuple(arity), sig.clone(), sig).with_prefix(move |args, depth| {
        let OpArgs::Tuple(params) = args else { unreachable!("shape checked by apply_prefix") };
        eval_composite(&reg, &body, params, depth)
    }))
}
