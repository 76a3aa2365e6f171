use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BehaviorError {
    #[error("cannot project a depth-{have} approximant to depth {want}")]
    ProjectionTooDeep { have: usize, want: usize },
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("constructor `{tag}` takes {expected} children, got {got}")]
    ArityMismatch { tag: String, expected: usize, got: usize },
    #[error("output {value} is not in the sort of constructor `{tag}`")]
    SortMismatch { tag: String, value: String },
    #[error("children have different depths")]
    RaggedChildren,
    #[error("malformed approximant: {0}")]
    Malformed(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("signature `{0}` has an infinite value sort")]
    InfiniteSort(String),
    #[error("stage too large to enumerate ({0} elements)")]
    TooLarge(String),
    #[error("behavior has no successor along path {0:?}")]
    NoSuccessor(Vec<usize>),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{name}` takes {expected} oracle arguments, got {got}")]
    VariableArity { name: String, expected: usize, got: usize },
    #[error("operation `{0}` is not registered")]
    UnregisteredOp(String),
    #[error("operation `{symbol}` was refused registration: {reason}; coinduction up to it is not guaranteed valid")]
    NonCausalOp { symbol: String, reason: String },
    #[error(
        "operation `{symbol}` maps between different behavior signatures and cannot be used inside \
         guarded recursion (such systems may have multiple solutions)"
    )]
    CrossSignatureInRecursion { symbol: String },
    #[error("`{symbol}` has signature `{got}` where `{expected}` is required")]
    SignatureMismatch { symbol: String, expected: String, got: String },
    #[error("operation `{symbol}` expects {expected} arguments, got {got}")]
    OpArity { symbol: String, expected: usize, got: usize },
    #[error("oracle `{0}` is not bound")]
    UnboundOracle(String),
    #[error("equation for `{var}`: {msg}")]
    IllFormed { var: String, msg: String },
    #[error("no GSOS rule for `{symbol}` on argument steps {shape}")]
    MissingGsosRule { symbol: String, shape: String },
    #[error("output expression: {0}")]
    Output(String),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
    #[error(transparent)]
    Causal(#[from] CausalError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CausalError {
    #[error("operation `{0}` is already registered")]
    Duplicate(String),
    #[error("operation `{symbol}` is not causal: {detail}")]
    NotCausal { symbol: String, detail: String },
    #[error("operation `{symbol}` fails prefix coherence at (i, j) = ({i}, {j})")]
    Incoherent { symbol: String, i: usize, j: usize },
    #[error("operation `{0}` has neither a prefix action nor a full semantics")]
    NoSemantics(String),
    #[error("argument shape mismatch for `{symbol}`: {detail}")]
    BadArguments { symbol: String, detail: String },
    #[error("level {0} rejected: |P_4| = 2^16 makes {{x,y}} -> P_4 too large to enumerate; use a level <= 3")]
    LevelTooLarge(usize),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BisimError {
    #[error("{pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("atom `{0}` is not declared")]
    UnknownAtom(String),
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(char),
    #[error("hypothesis for `{0}` is not guarded: its empty-word flag or derivative depends on itself")]
    Unguarded(String),
    #[error("more than {0} symbolic atoms would need a truth value")]
    TooManySymbolic(usize),
    #[error("combinator `{combinator}` refused: {reason}")]
    Refused { combinator: String, reason: String },
    #[error("proof rejected: {0}")]
    BadProof(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("order is not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("elements {0} and {1} have no {2}")]
    MissingBound(String, String, &'static str),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("function is not monotone: {0} <= {1} but f({0}) > f({1})")]
    NotMonotone(String, String),
    #[error("function table has {got} entries, lattice has {expected} elements")]
    TableSize { expected: usize, got: usize },
    #[error("f is not below the companion of b; coinduction up to f is refused")]
    NotBelowCompanion,
    #[error("lattice input: {0}")]
    Input(String),
}
