//! Causal operations as depth-indexed prefix transformers.
//!
//! An operation `α : F A_ω → B_ω` is causal when the depth-`i` part of its
//! output only depends on the depth-`i` parts of its arguments. Such an
//! operation is the same thing as a family of maps `α_i : F A_i → B_i`
//! commuting with the projections, and the engine works with that family.

pub mod builtins;
pub mod checker;
pub mod kan;
pub(crate) mod words;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::behavior::{Approximant, BehaviorSignature, LazyBehavior};
use crate::error::CausalError;

pub use checker::{
    check_causality, check_prefix_coherence, CausalityVerdict, CheckConfig, CoherenceVerdict, Structure, Witness,
};

/// The argument functor `F` of an operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// `F X = X^k`.
    Tuple(usize),
    /// `F X = P_f(X)`.
    FinSet,
    /// `F X = P_f(X^*)`: finite sets of finite sequences.
    SeqSet,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Tuple(k) => write!(f, "tuple/{k}"),
            Shape::FinSet => write!(f, "finset"),
            Shape::SeqSet => write!(f, "seqset"),
        }
    }
}

/// An element of `F B_i`. Sets are kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpArgs {
    Tuple(Vec<Approximant>),
    Set(Vec<Approximant>),
    Seqs(Vec<Vec<Approximant>>),
}

impl OpArgs {
    pub fn set(mut items: Vec<Approximant>) -> Self {
        items.sort();
        items.dedup();
        OpArgs::Set(items)
    }

    pub fn seqs(mut items: Vec<Vec<Approximant>>) -> Self {
        items.sort();
        items.dedup();
        OpArgs::Seqs(items)
    }

    pub fn shape_matches(&self, shape: Shape) -> bool {
        matches!(
            (self, shape),
            (OpArgs::Tuple(v), Shape::Tuple(k)) if v.len() == k
        ) || matches!((self, shape), (OpArgs::Set(_), Shape::FinSet) | (OpArgs::Seqs(_), Shape::SeqSet))
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = &Approximant> + '_> {
        match self {
            OpArgs::Tuple(v) | OpArgs::Set(v) => Box::new(v.iter()),
            OpArgs::Seqs(v) => Box::new(v.iter().flatten()),
        }
    }

    /// `F` applied to a map on approximants (re-normalizing sets).
    pub fn map<E>(&self, mut f: impl FnMut(&Approximant) -> Result<Approximant, E>) -> Result<OpArgs, E> {
        Ok(match self {
            OpArgs::Tuple(v) => OpArgs::Tuple(v.iter().map(&mut f).collect::<Result<_, _>>()?),
            OpArgs::Set(v) => OpArgs::set(v.iter().map(&mut f).collect::<Result<_, _>>()?),
            OpArgs::Seqs(v) => OpArgs::seqs(
                v.iter()
                    .map(|s| s.iter().map(&mut f).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    /// `F B_{j,i}`.
    pub fn project(&self, i: usize) -> Result<OpArgs, crate::error::BehaviorError> {
        self.map(|a| a.project(i))
    }
}

/// An element of `F B_ω`.
#[derive(Clone, Debug)]
pub enum BehaviorArgs {
    Tuple(Vec<LazyBehavior>),
    Set(Vec<LazyBehavior>),
    Seqs(Vec<Vec<LazyBehavior>>),
}

impl BehaviorArgs {
    pub fn shape_matches(&self, shape: Shape) -> bool {
        match (self, shape) {
            (BehaviorArgs::Tuple(v), Shape::Tuple(k)) => v.len() == k,
            (BehaviorArgs::Set(_), Shape::FinSet) | (BehaviorArgs::Seqs(_), Shape::SeqSet) => true,
            _ => false,
        }
    }

    pub fn produce(&self, i: usize) -> OpArgs {
        match self {
            BehaviorArgs::Tuple(v) => OpArgs::Tuple(v.iter().map(|b| b.produce(i)).collect()),
            BehaviorArgs::Set(v) => OpArgs::set(v.iter().map(|b| b.produce(i)).collect()),
            BehaviorArgs::Seqs(v) => OpArgs::seqs(v.iter().map(|s| s.iter().map(|b| b.produce(i)).collect()).collect()),
        }
    }
}

pub type PrefixAction = Arc<dyn Fn(&OpArgs, usize) -> Result<Approximant, CausalError> + Send + Sync>;
pub type FullSemantics = Arc<dyn Fn(&BehaviorArgs) -> LazyBehavior + Send + Sync>;

/// An operation symbol with its argument shape, input and output signatures,
/// a prefix action `α_i`, and optionally a semantics on complete behaviors.
#[derive(Clone)]
pub struct CausalOperation {
    symbol: String,
    shape: Shape,
    input: Arc<BehaviorSignature>,
    output: Arc<BehaviorSignature>,
    prefix: Option<PrefixAction>,
    full: Option<FullSemantics>,
}

impl fmt::Debug for CausalOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CausalOperation")
            .field("symbol", &self.symbol)
            .field("shape", &self.shape)
            .field("input", &self.input.name())
            .field("output", &self.output.name())
            .field("prefix", &self.prefix.is_some())
            .field("full", &self.full.is_some())
            .finish()
    }
}

impl CausalOperation {
    pub fn new(
        symbol: impl Into<String>,
        shape: Shape,
        input: Arc<BehaviorSignature>,
        output: Arc<BehaviorSignature>,
    ) -> Self {
        CausalOperation { symbol: symbol.into(), shape, input, output, prefix: None, full: None }
    }

    pub fn with_prefix(
        mut self,
        f: impl Fn(&OpArgs, usize) -> Result<Approximant, CausalError> + Send + Sync + 'static,
    ) -> Self {
        self.prefix = Some(Arc::new(f));
        self
    }

    pub fn with_full(mut self, f: impl Fn(&BehaviorArgs) -> LazyBehavior + Send + Sync + 'static) -> Self {
        self.full = Some(Arc::new(f));
        self
    }

    /// Same operation under another symbol.
    pub fn renamed(mut self, symbol: impl Into<String>) -> Self {
        self.symbol = symbol.into();
        self
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn input(&self) -> &Arc<BehaviorSignature> {
        &self.input
    }

    pub fn output(&self) -> &Arc<BehaviorSignature> {
        &self.output
    }

    pub fn has_prefix_action(&self) -> bool {
        self.prefix.is_some()
    }

    pub fn has_full_semantics(&self) -> bool {
        self.full.is_some()
    }

    /// Maps between different signatures (a law `F A ⇒ B F` rather than an algebra).
    pub fn is_cross(&self) -> bool {
        self.input != self.output
    }

    fn check_args(&self, args: &OpArgs, depth: usize) -> Result<(), CausalError> {
        if !args.shape_matches(self.shape) {
            return Err(CausalError::BadArguments {
                symbol: self.symbol.clone(),
                detail: format!("expected {} arguments", self.shape),
            });
        }
        if let Some(a) = args.iter().find(|a| a.depth() != depth) {
            return Err(CausalError::BadArguments {
                symbol: self.symbol.clone(),
                detail: format!("argument of depth {} at stage {depth}", a.depth()),
            });
        }
        Ok(())
    }

    /// `α_depth` on depth-`depth` arguments.
    ///
    /// Without an explicit prefix action, arguments are padded to complete
    /// behaviors and the full semantics is evaluated; for a causal operation the
    /// choice of padding does not matter.
    pub fn apply_prefix(&self, args: &OpArgs, depth: usize) -> Result<Approximant, CausalError> {
        self.check_args(args, depth)?;
        if depth == 0 {
            return Ok(Approximant::unit());
        }
        if let Some(p) = &self.prefix {
            return p(args, depth);
        }
        let full = self.full.as_ref().ok_or_else(|| CausalError::NoSemantics(self.symbol.clone()))?;
        let lift = |a: &Approximant| LazyBehavior::from_prefix(self.input.clone(), a.clone());
        let behaviors = match args {
            OpArgs::Tuple(v) => BehaviorArgs::Tuple(v.iter().map(lift).collect()),
            OpArgs::Set(v) => BehaviorArgs::Set(v.iter().map(lift).collect()),
            OpArgs::Seqs(v) => BehaviorArgs::Seqs(v.iter().map(|s| s.iter().map(lift).collect()).collect()),
        };
        Ok(full(&behaviors).produce(depth))
    }

    /// `α_ω` on complete behaviors. Without a full semantics, the prefix action is
    /// evaluated stage by stage.
    pub fn apply_full(&self, args: &BehaviorArgs) -> Result<LazyBehavior, CausalError> {
        if !args.shape_matches(self.shape) {
            return Err(CausalError::BadArguments {
                symbol: self.symbol.clone(),
                detail: format!("expected {} arguments", self.shape),
            });
        }
        if let Some(f) = &self.full {
            return Ok(f(args));
        }
        let p = self.prefix.clone().ok_or_else(|| CausalError::NoSemantics(self.symbol.clone()))?;
        let args = args.clone();
        Ok(LazyBehavior::general(self.output.clone(), move |i| {
            p(&args.produce(i), i).expect("prefix action is total on well-formed arguments")
        }))
    }
}

/// Symbol table of operations admitted for use by the solver and the prover.
///
/// `register` admits an operation only after the causality checker (when a full
/// semantics is present) and the prefix-coherence checker both pass.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    ops: BTreeMap<String, CausalOperation>,
    rejected: BTreeMap<String, String>,
    config: CheckConfig,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_config(config: CheckConfig) -> Self {
        Registry { config, ..Self::default() }
    }

    pub fn config(&self) -> &CheckConfig {
        &self.config
    }

    pub fn register(&mut self, op: CausalOperation) -> Result<(), CausalError> {
        let symbol = op.symbol().to_string();
        if self.ops.contains_key(&symbol) {
            return Err(CausalError::Duplicate(symbol));
        }
        let cfg = self.config.clone();
        if op.has_full_semantics() {
            if let CausalityVerdict::NotCausal(w) = check_causality(&op, &cfg)? {
                let detail = w.summary(&op);
                self.rejected.insert(symbol.clone(), format!("not causal ({detail})"));
                return Err(CausalError::NotCausal { symbol, detail });
            }
        }
        if let CoherenceVerdict::Incoherent { i, j, .. } = check_prefix_coherence(&op, &cfg)? {
            self.rejected.insert(symbol.clone(), format!("prefix action incoherent at (i, j) = ({i}, {j})"));
            return Err(CausalError::Incoherent { symbol, i, j });
        }
        self.rejected.remove(&symbol);
        self.ops.insert(symbol, op);
        Ok(())
    }

    /// Admit a built-in without running the checkers.
    pub fn insert_builtin(&mut self, op: CausalOperation) -> Result<(), CausalError> {
        let symbol = op.symbol().to_string();
        if self.ops.contains_key(&symbol) {
            return Err(CausalError::Duplicate(symbol));
        }
        self.ops.insert(symbol, op);
        Ok(())
    }

    pub fn lookup(&self, symbol: &str) -> Option<&CausalOperation> {
        self.ops.get(symbol)
    }

    /// Why `symbol` was refused, if it was.
    pub fn rejection(&self, symbol: &str) -> Option<&str> {
        self.rejected.get(symbol).map(String::as_str)
    }

    pub fn operations(&self) -> impl Iterator<Item = &CausalOperation> {
        self.ops.values()
    }

    /// Stream built-ins: `plus`, `shuffle`, `conv`, `alt`, `min`.
    pub fn stream_builtins() -> Self {
        let mut r = Registry::new();
        for op in [builtins::plus(), builtins::shuffle(), builtins::convolution(), builtins::alt(), builtins::fin_min()] {
            r.insert_builtin(op).expect("distinct symbols");
        }
        r
    }

    /// Language built-ins over `alphabet`: `union`, `concat`, `star`, `shuffle`, `funion`, `cfg`.
    pub fn language_builtins(alphabet: &[char]) -> Self {
        let mut r = Registry::new();
        for op in builtins::language_catalog(alphabet) {
            r.insert_builtin(op).expect("distinct symbols");
        }
        r
    }
}
