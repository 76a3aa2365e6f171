//! Polynomial behavior functors `B X = Σ_c O_c × X^{ar(c)}`, the stages `B_i` of
//! their final sequence, and lazy behaviors living at stage ω.
//!
//! A depth-`i` [`Approximant`] is an element of `B_i`: a behavior observed for
//! `i` steps. Projection `B_{j,i}` truncates the tree. Only finite stages are
//! materialized; complete behaviors are [`LazyBehavior`] producers.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::json;

use crate::error::BehaviorError;
use crate::value::{Value, ValueSort};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constructor {
    pub tag: String,
    pub sort: ValueSort,
    pub arity: usize,
}

impl Constructor {
    pub fn new(tag: impl Into<String>, sort: ValueSort, arity: usize) -> Self {
        Constructor { tag: tag.into(), sort, arity }
    }
}

/// Recognized special forms, used for fast lazy representations and rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignatureKind {
    /// One constructor of arity 1.
    Stream,
    /// One boolean constructor with one child per letter.
    Language,
    /// `X + 1`: a unary `just` and a nullary `stop`, both unit-valued.
    Maybe,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BehaviorSignature {
    name: String,
    constructors: Vec<Constructor>,
    alphabet: Vec<char>,
    kind: SignatureKind,
}

impl BehaviorSignature {
    pub fn new(name: impl Into<String>, constructors: Vec<Constructor>) -> Result<Self, BehaviorError> {
        Self::build(name.into(), constructors, Vec::new())
    }

    fn build(name: String, constructors: Vec<Constructor>, alphabet: Vec<char>) -> Result<Self, BehaviorError> {
        if constructors.is_empty() {
            return Err(BehaviorError::InvalidSignature("no constructors".into()));
        }
        let tags: BTreeSet<&str> = constructors.iter().map(|c| c.tag.as_str()).collect();
        if tags.len() != constructors.len() {
            return Err(BehaviorError::InvalidSignature("duplicate constructor tags".into()));
        }
        let kind = match constructors.as_slice() {
            [c] if c.sort == ValueSort::Bool && !alphabet.is_empty() && c.arity == alphabet.len() => {
                SignatureKind::Language
            }
            [c] if c.arity == 1 => SignatureKind::Stream,
            [j, s]
                if j.arity == 1 && s.arity == 0 && j.sort == ValueSort::Unit && s.sort == ValueSort::Unit =>
            {
                SignatureKind::Maybe
            }
            _ => SignatureKind::Other,
        };
        Ok(BehaviorSignature { name, constructors, alphabet, kind })
    }

    /// `B X = V × X`: streams over `sort`.
    pub fn stream(sort: ValueSort) -> Arc<Self> {
        let name = match sort {
            ValueSort::Rational => "stream".to_string(),
            ValueSort::Tuple(ref s) if s.len() == 2 && s.iter().all(|x| *x == ValueSort::Rational) => {
                "stream2".to_string()
            }
            ref other => format!("stream<{other:?}>"),
        };
        Arc::new(Self::build(name, vec![Constructor::new("cons", sort, 1)], Vec::new()).expect("valid"))
    }

    /// Streams of exact rationals.
    pub fn rational_stream() -> Arc<Self> {
        Self::stream(ValueSort::Rational)
    }

    /// `A X = V × V × X`, presented as streams of pairs.
    pub fn pair_stream() -> Arc<Self> {
        Self::stream(ValueSort::Tuple(vec![ValueSort::Rational, ValueSort::Rational]))
    }

    /// `B X = 2 × X^A`: deterministic automata; final coalgebra = languages over `alphabet`.
    pub fn detaut(alphabet: &[char]) -> Arc<Self> {
        let mut letters = alphabet.to_vec();
        letters.sort_unstable();
        letters.dedup();
        let ctor = Constructor::new("state", ValueSort::Bool, letters.len());
        let name = format!("detaut{{{}}}", letters.iter().collect::<String>());
        Arc::new(Self::build(name, vec![ctor], letters).expect("valid"))
    }

    /// `B X = X + 1`.
    pub fn maybe() -> Arc<Self> {
        let ctors = vec![
            Constructor::new("just", ValueSort::Unit, 1),
            Constructor::new("stop", ValueSort::Unit, 0),
        ];
        Arc::new(Self::build("maybe".into(), ctors, Vec::new()).expect("valid"))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constructors(&self) -> &[Constructor] {
        &self.constructors
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn kind(&self) -> SignatureKind {
        self.kind
    }

    pub fn ctor_index(&self, tag: &str) -> Option<usize> {
        self.constructors.iter().position(|c| c.tag == tag)
    }

    pub fn letter_index(&self, letter: char) -> Option<usize> {
        self.alphabet.iter().position(|&c| c == letter)
    }

    /// The padding behavior of depth `depth`: constructor 0 with default output, everywhere.
    /// Subtrees are shared, so this is linear in `depth`.
    pub fn default_tree(&self, depth: usize) -> Tree {
        let c = &self.constructors[0];
        let out = Value::default_of(&c.sort);
        let mut t = Tree::Leaf;
        for _ in 0..depth {
            t = Tree::node(0, out.clone(), vec![t; c.arity]);
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub ctor: usize,
    pub out: Value,
    pub children: Vec<Tree>,
}

/// Raw behavior tree; the leaf is the unique element `⋆` of `B_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf,
    Node(Arc<Node>),
}

impl Tree {
    pub fn node(ctor: usize, out: Value, children: Vec<Tree>) -> Tree {
        Tree::Node(Arc::new(Node { ctor, out, children }))
    }

    pub fn as_node(&self) -> Option<&Node> {
        match self {
            Tree::Leaf => None,
            Tree::Node(n) => Some(n),
        }
    }

    fn truncate(&self, depth: usize) -> Tree {
        if depth == 0 {
            return Tree::Leaf;
        }
        match self {
            Tree::Leaf => Tree::Leaf,
            Tree::Node(n) => Tree::node(n.ctor, n.out.clone(), n.children.iter().map(|c| c.truncate(depth - 1)).collect()),
        }
    }

    /// Replace every leaf at the bottom of a depth-`depth` tree with `fill(path)`.
    fn extend_with(&self, depth: usize, path: &mut Vec<usize>, fill: &mut dyn FnMut(&[usize]) -> Tree) -> Tree {
        match self {
            Tree::Leaf => fill(path),
            Tree::Node(n) => {
                debug_assert!(depth > 0);
                let children = n
                    .children
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        path.push(k);
                        let t = c.extend_with(depth - 1, path, fill);
                        path.pop();
                        t
                    })
                    .collect();
                Tree::node(n.ctor, n.out.clone(), children)
            }
        }
    }
}

/// An element of the stage `B_depth` of the final sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Approximant {
    depth: usize,
    tree: Tree,
}

impl Approximant {
    /// `⋆ ∈ B_0`.
    pub fn unit() -> Self {
        Approximant { depth: 0, tree: Tree::Leaf }
    }

    /// Build from a raw tree, validating it against `sig` at `depth`.
    pub fn from_tree_checked(sig: &BehaviorSignature, depth: usize, tree: Tree) -> Result<Self, BehaviorError> {
        check_tree(sig, depth, &tree)?;
        Ok(Approximant { depth, tree })
    }

    /// `B_{i+1} = B B_i`: one constructor over depth-`i` children.
    /// A nullary constructor yields depth 1; use [`Approximant::terminal`] for other depths.
    pub fn node(
        sig: &BehaviorSignature,
        tag: &str,
        out: Value,
        children: Vec<Approximant>,
    ) -> Result<Self, BehaviorError> {
        let ctor = sig.ctor_index(tag).ok_or_else(|| BehaviorError::UnknownConstructor(tag.into()))?;
        Self::node_at(sig, ctor, out, children)
    }

    pub(crate) fn node_at(
        sig: &BehaviorSignature,
        ctor: usize,
        out: Value,
        children: Vec<Approximant>,
    ) -> Result<Self, BehaviorError> {
        let c = &sig.constructors[ctor];
        if children.len() != c.arity {
            return Err(BehaviorError::ArityMismatch { tag: c.tag.clone(), expected: c.arity, got: children.len() });
        }
        if !out.belongs_to(&c.sort) {
            return Err(BehaviorError::SortMismatch { tag: c.tag.clone(), value: out.to_string() });
        }
        let child_depth = children.first().map_or(0, |a| a.depth);
        if children.iter().any(|a| a.depth != child_depth) {
            return Err(BehaviorError::RaggedChildren);
        }
        let tree = Tree::node(ctor, out, children.into_iter().map(|a| a.tree).collect());
        Ok(Approximant { depth: child_depth + 1, tree })
    }

    /// A nullary constructor viewed as an element of `B_depth` (`depth >= 1`).
    pub fn terminal(sig: &BehaviorSignature, tag: &str, out: Value, depth: usize) -> Result<Self, BehaviorError> {
        let mut a = Self::node(sig, tag, out, vec![])?;
        if depth == 0 {
            return Err(BehaviorError::Malformed("a constructor needs depth >= 1".into()));
        }
        a.depth = depth;
        Ok(a)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn root(&self) -> Option<&Node> {
        self.tree.as_node()
    }

    pub fn is_unit(&self) -> bool {
        self.depth == 0
    }

    /// Child `k` as a depth-`(depth-1)` approximant.
    pub fn child(&self, k: usize) -> Option<Approximant> {
        let n = self.root()?;
        n.children.get(k).map(|t| Approximant { depth: self.depth - 1, tree: t.clone() })
    }

    /// The connecting map `B_{j,i}`.
    pub fn project(&self, i: usize) -> Result<Approximant, BehaviorError> {
        if i > self.depth {
            return Err(BehaviorError::ProjectionTooDeep { have: self.depth, want: i });
        }
        if i == self.depth {
            return Ok(self.clone());
        }
        Ok(Approximant { depth: i, tree: self.tree.truncate(i) })
    }

    /// Extend to `depth` by filling the bottom leaves; `fill(path, remaining)` must
    /// return a well-formed tree of depth `remaining`.
    pub fn extend(&self, depth: usize, mut fill: impl FnMut(&[usize], usize) -> Tree) -> Approximant {
        assert!(depth >= self.depth);
        let remaining = depth - self.depth;
        let tree = self.tree.extend_with(self.depth, &mut Vec::new(), &mut |p| fill(p, remaining));
        Approximant { depth, tree }
    }

    /// Extend with the signature's default padding.
    pub fn extend_default(&self, sig: &BehaviorSignature, depth: usize) -> Approximant {
        if depth <= self.depth {
            return self.clone();
        }
        let pad = sig.default_tree(depth - self.depth);
        self.extend(depth, |_, _| pad.clone())
    }

    /// Follow a path of child indices.
    pub fn follow(&self, path: &[usize]) -> Option<Approximant> {
        let mut cur = self.clone();
        for &k in path {
            cur = cur.child(k)?;
        }
        Some(cur)
    }

    // ---- streams ----

    /// A stream prefix from values (depth = number of values).
    pub fn from_values(sig: &BehaviorSignature, values: &[Value]) -> Result<Self, BehaviorError> {
        let mut a = Approximant::unit();
        for v in values.iter().rev() {
            a = Approximant::node_at(sig, 0, v.clone(), vec![a])?;
        }
        Ok(a)
    }

    pub fn from_ints(sig: &BehaviorSignature, values: &[i64]) -> Result<Self, BehaviorError> {
        let vs: Vec<Value> = values.iter().map(|&n| Value::int(n)).collect();
        Self::from_values(sig, &vs)
    }

    /// Outputs along the child-0 spine (the stream prefix, for stream signatures).
    pub fn values(&self) -> Vec<Value> {
        let mut out = Vec::with_capacity(self.depth);
        let mut t = &self.tree;
        while let Tree::Node(n) = t {
            out.push(n.out.clone());
            match n.children.first() {
                Some(c) => t = c,
                None => break,
            }
        }
        out
    }

    // ---- languages ----

    /// The restriction of the language `member` to words of length `< depth`.
    pub fn from_language(sig: &BehaviorSignature, depth: usize, member: &dyn Fn(&[usize]) -> bool) -> Self {
        fn build(k: usize, depth: usize, word: &mut Vec<usize>, member: &dyn Fn(&[usize]) -> bool) -> Tree {
            if depth == 0 {
                return Tree::Leaf;
            }
            let children = (0..k)
                .map(|a| {
                    word.push(a);
                    let t = build(k, depth - 1, word, member);
                    word.pop();
                    t
                })
                .collect();
            Tree::node(0, Value::Bool(member(word)), children)
        }
        let k = sig.constructors[0].arity;
        Approximant { depth, tree: build(k, depth, &mut Vec::new(), member) }
    }

    pub fn from_words(sig: &BehaviorSignature, depth: usize, words: &BTreeSet<Vec<usize>>) -> Self {
        Self::from_language(sig, depth, &|w| words.contains(w))
    }

    /// Accepted words (letter indices), all of length `< depth`.
    pub fn words(&self) -> BTreeSet<Vec<usize>> {
        fn walk(t: &Tree, word: &mut Vec<usize>, acc: &mut BTreeSet<Vec<usize>>) {
            if let Tree::Node(n) = t {
                if n.out == Value::Bool(true) {
                    acc.insert(word.clone());
                }
                for (a, c) in n.children.iter().enumerate() {
                    word.push(a);
                    walk(c, word, acc);
                    word.pop();
                }
            }
        }
        let mut acc = BTreeSet::new();
        walk(&self.tree, &mut Vec::new(), &mut acc);
        acc
    }

    /// Membership of a word of length `< depth`.
    pub fn accepts(&self, word: &[usize]) -> Option<bool> {
        let a = self.follow(word)?;
        a.root().map(|n| n.out == Value::Bool(true))
    }

    // ---- X + 1 ----

    /// `k ∈ {0..depth}` for `B X = X + 1`: `Some(k)` with `k < depth` stops after `k`
    /// steps; `None` (ω) or `k >= depth` is the full `just` chain.
    pub fn from_maybe(sig: &BehaviorSignature, k: Option<usize>, depth: usize) -> Self {
        let mut t = Tree::Leaf;
        let steps = match k {
            Some(k) if k < depth => {
                t = Tree::node(1, Value::Unit, vec![]);
                k
            }
            _ => depth,
        };
        for _ in 0..steps {
            t = Tree::node(0, Value::Unit, vec![t]);
        }
        debug_assert_eq!(sig.kind(), SignatureKind::Maybe);
        Approximant { depth, tree: t }
    }

    /// The number in `{0..depth}` this element of `B_depth` denotes.
    pub fn maybe_value(&self) -> usize {
        let mut k = 0;
        let mut t = &self.tree;
        while let Tree::Node(n) = t {
            match n.children.first() {
                Some(c) => {
                    k += 1;
                    t = c;
                }
                None => return k,
            }
        }
        k
    }

    // ---- serialization ----

    /// Canonical JSON tree: `{"tag":…, "out":…, "children":[…]}`, leaves as `null`.
    pub fn to_json(&self, sig: &BehaviorSignature) -> serde_json::Value {
        fn go(sig: &BehaviorSignature, t: &Tree) -> serde_json::Value {
            match t {
                Tree::Leaf => serde_json::Value::Null,
                Tree::Node(n) => json!({
                    "tag": sig.constructors[n.ctor].tag,
                    "out": n.out.to_json(),
                    "children": n.children.iter().map(|c| go(sig, c)).collect::<Vec<_>>(),
                }),
            }
        }
        go(sig, &self.tree)
    }

    pub fn from_json(sig: &BehaviorSignature, depth: usize, v: &serde_json::Value) -> Result<Self, BehaviorError> {
        fn go(sig: &BehaviorSignature, v: &serde_json::Value) -> Result<Tree, BehaviorError> {
            if v.is_null() {
                return Ok(Tree::Leaf);
            }
            let tag = v.get("tag").and_then(|t| t.as_str()).ok_or_else(|| BehaviorError::Json("missing tag".into()))?;
            let ctor = sig.ctor_index(tag).ok_or_else(|| BehaviorError::UnknownConstructor(tag.into()))?;
            let c = &sig.constructors[ctor];
            let out = Value::from_json(&c.sort, v.get("out").unwrap_or(&serde_json::Value::Null))?;
            let kids = v
                .get("children")
                .and_then(|k| k.as_array())
                .ok_or_else(|| BehaviorError::Json("missing children".into()))?;
            let children = kids.iter().map(|k| go(sig, k)).collect::<Result<_, _>>()?;
            Ok(Tree::node(ctor, out, children))
        }
        let tree = go(sig, v)?;
        Self::from_tree_checked(sig, depth, tree)
    }

    /// Human-readable rendering: stream prefixes as space-separated values,
    /// languages as word sets, `X + 1` elements as numbers, `⋆` at depth 0.
    pub fn render(&self, sig: &BehaviorSignature) -> String {
        if self.depth == 0 {
            return "⋆".into();
        }
        match sig.kind() {
            SignatureKind::Stream => self.values().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
            SignatureKind::Language => {
                let mut ws: Vec<Vec<usize>> = self.words().into_iter().collect();
                ws.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
                let shown: Vec<String> = ws.iter().map(|w| word_string(sig, w)).collect();
                format!("{{{}}}", shown.join(", "))
            }
            SignatureKind::Maybe => self.maybe_value().to_string(),
            SignatureKind::Other => TreeDisplay { sig, tree: &self.tree }.to_string(),
        }
    }
}

/// Render a word of letter indices; the empty word is `ε`.
pub fn word_string(sig: &BehaviorSignature, w: &[usize]) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.iter().map(|&a| sig.alphabet()[a]).collect()
    }
}

struct TreeDisplay<'a> {
    sig: &'a BehaviorSignature,
    tree: &'a Tree,
}

impl fmt::Display for TreeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tree {
            Tree::Leaf => write!(f, "⋆"),
            Tree::Node(n) => {
                write!(f, "({} {}", self.sig.constructors[n.ctor].tag, n.out)?;
                for c in &n.children {
                    write!(f, " {}", TreeDisplay { sig: self.sig, tree: c })?;
                }
                write!(f, ")")
            }
        }
    }
}

fn check_tree(sig: &BehaviorSignature, depth: usize, t: &Tree) -> Result<(), BehaviorError> {
    match t {
        Tree::Leaf if depth == 0 => Ok(()),
        Tree::Leaf => Err(BehaviorError::Malformed(format!("leaf {depth} levels above the bottom"))),
        Tree::Node(_) if depth == 0 => Err(BehaviorError::Malformed("node below the stage depth".into())),
        Tree::Node(n) => {
            let c = sig
                .constructors
                .get(n.ctor)
                .ok_or_else(|| BehaviorError::Malformed(format!("constructor index {}", n.ctor)))?;
            if n.children.len() != c.arity {
                return Err(BehaviorError::ArityMismatch { tag: c.tag.clone(), expected: c.arity, got: n.children.len() });
            }
            if !n.out.belongs_to(&c.sort) {
                return Err(BehaviorError::SortMismatch { tag: c.tag.clone(), value: n.out.to_string() });
            }
            n.children.iter().try_for_each(|ch| check_tree(sig, depth - 1, ch))
        }
    }
}

/// `|B_i|`, or `Infinite` when a reachable value sort is infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StageCount {
    Finite(BigUint),
    Infinite,
}

/// `|B_0| = 1`, `|B_{i+1}| = Σ_c |O_c| · |B_i|^{ar(c)}`.
pub fn stage_count(sig: &BehaviorSignature, i: usize) -> StageCount {
    let mut count = BigUint::one();
    for _ in 0..i {
        let mut next = BigUint::zero();
        for c in sig.constructors() {
            let Some(vals) = c.sort.enumerate() else {
                return StageCount::Infinite;
            };
            next += BigUint::from(vals.len()) * num_traits::pow(count.clone(), c.arity);
        }
        count = next;
    }
    StageCount::Finite(count)
}

/// All elements of `B_i`, for finite signatures. Refuses stages above `limit` elements.
pub fn enumerate_stage(sig: &BehaviorSignature, i: usize, limit: usize) -> Result<Vec<Approximant>, BehaviorError> {
    match stage_count(sig, i) {
        StageCount::Infinite => return Err(BehaviorError::InfiniteSort(sig.name().into())),
        StageCount::Finite(n) if n > BigUint::from(limit) => return Err(BehaviorError::TooLarge(n.to_string())),
        _ => {}
    }
    let mut stage = vec![Tree::Leaf];
    for _ in 0..i {
        let mut next = Vec::new();
        for (ctor, c) in sig.constructors().iter().enumerate() {
            let vals = c.sort.enumerate().expect("finite");
            let mut combos: Vec<Vec<Tree>> = vec![vec![]];
            for _ in 0..c.arity {
                combos = combos
                    .into_iter()
                    .flat_map(|p| {
                        stage.iter().map(move |t| {
                            let mut q = p.clone();
                            q.push(t.clone());
                            q
                        })
                    })
                    .collect();
            }
            for v in &vals {
                for kids in &combos {
                    next.push(Tree::node(ctor, v.clone(), kids.clone()));
                }
            }
        }
        stage = next;
    }
    Ok(stage.into_iter().map(|t| Approximant { depth: i, tree: t }).collect())
}

type StreamFn = Arc<dyn Fn(usize) -> Value + Send + Sync>;
type LanguageFn = Arc<dyn Fn(&[usize]) -> bool + Send + Sync>;
type ProduceFn = Arc<dyn Fn(usize) -> Approximant + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Stream(StreamFn),
    Language(LanguageFn),
    General(ProduceFn),
}

/// An element of `B_ω`, given by its approximants at every finite depth.
///
/// Producers must be coherent: `produce(j).project(i) == produce(i)`.
#[derive(Clone)]
pub struct LazyBehavior {
    sig: Arc<BehaviorSignature>,
    repr: Repr,
}

impl fmt::Debug for LazyBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LazyBehavior<{}>({})", self.sig.name(), self.produce(4).render(&self.sig))
    }
}

impl LazyBehavior {
    /// A stream given elementwise.
    pub fn stream(sig: Arc<BehaviorSignature>, at: impl Fn(usize) -> Value + Send + Sync + 'static) -> Self {
        assert_eq!(sig.kind(), SignatureKind::Stream, "stream behavior over non-stream signature");
        LazyBehavior { sig, repr: Repr::Stream(Arc::new(at)) }
    }

    /// A language given by its membership predicate on letter-index words.
    pub fn language(sig: Arc<BehaviorSignature>, member: impl Fn(&[usize]) -> bool + Send + Sync + 'static) -> Self {
        assert_eq!(sig.kind(), SignatureKind::Language, "language behavior over non-language signature");
        LazyBehavior { sig, repr: Repr::Language(Arc::new(member)) }
    }

    /// Any behavior, given as a coherent approximant producer.
    pub fn general(sig: Arc<BehaviorSignature>, produce: impl Fn(usize) -> Approximant + Send + Sync + 'static) -> Self {
        LazyBehavior { sig, repr: Repr::General(Arc::new(produce)) }
    }

    /// `(v, v, v, …)`.
    pub fn repeat(sig: Arc<BehaviorSignature>, v: Value) -> Self {
        Self::stream(sig, move |_| v.clone())
    }

    /// `[r] = (r, 0, 0, …)`.
    pub fn scalar(sig: Arc<BehaviorSignature>, r: Value) -> Self {
        let zero = Value::default_of(&sig.constructors()[0].sort);
        Self::stream(sig, move |k| if k == 0 { r.clone() } else { zero.clone() })
    }

    /// The stream `(v_0, …, v_{n-1}, v_0, …)` cycling through `values`.
    pub fn cycle(sig: Arc<BehaviorSignature>, values: Vec<Value>) -> Self {
        assert!(!values.is_empty());
        Self::stream(sig, move |k| values[k % values.len()].clone())
    }

    /// `k ∈ ℕ ∪ {ω}` for `X + 1`.
    pub fn maybe(sig: Arc<BehaviorSignature>, k: Option<usize>) -> Self {
        let s = sig.clone();
        Self::general(sig, move |i| Approximant::from_maybe(&s, k, i))
    }

    /// A finite prefix continued with the signature's default padding.
    pub fn from_prefix(sig: Arc<BehaviorSignature>, prefix: Approximant) -> Self {
        match sig.kind() {
            SignatureKind::Stream => {
                let vals = prefix.values();
                let pad = Value::default_of(&sig.constructors()[0].sort);
                Self::stream(sig, move |k| vals.get(k).cloned().unwrap_or_else(|| pad.clone()))
            }
            SignatureKind::Language => {
                let words = prefix.words();
                Self::language(sig, move |w| words.contains(w))
            }
            _ => {
                let s = sig.clone();
                Self::general(sig, move |i| {
                    if i <= prefix.depth() {
                        prefix.project(i).expect("i <= depth")
                    } else {
                        prefix.extend_default(&s, i)
                    }
                })
            }
        }
    }

    pub fn signature(&self) -> &Arc<BehaviorSignature> {
        &self.sig
    }

    /// The depth-`i` approximant `B_{ω,i}(self)`.
    pub fn produce(&self, i: usize) -> Approximant {
        match &self.repr {
            Repr::Stream(at) => {
                let vals: Vec<Value> = (0..i).map(|k| at(k)).collect();
                Approximant::from_values(&self.sig, &vals).expect("stream values fit the signature")
            }
            Repr::Language(member) => Approximant::from_language(&self.sig, i, &**member),
            Repr::General(p) => p(i),
        }
    }

    /// Element `k` of a stream.
    pub fn at(&self, k: usize) -> Value {
        match &self.repr {
            Repr::Stream(at) => at(k),
            _ => self.produce(k + 1).values().pop().expect("non-empty prefix"),
        }
    }

    /// Membership of a word in a language behavior.
    pub fn accepts(&self, word: &[usize]) -> bool {
        match &self.repr {
            Repr::Language(member) => member(word),
            _ => self.produce(word.len() + 1).accepts(word).unwrap_or(false),
        }
    }

    /// Root constructor and output.
    pub fn head(&self) -> (usize, Value) {
        match &self.repr {
            Repr::Stream(at) => (0, at(0)),
            Repr::Language(member) => (0, Value::Bool(member(&[]))),
            Repr::General(_) => {
                let a = self.produce(1);
                let n = a.root().expect("depth 1 has a root");
                (n.ctor, n.out.clone())
            }
        }
    }

    /// The successor behavior reached along `path` (stream tail, language derivative, …).
    pub fn derive(&self, path: &[usize]) -> Result<LazyBehavior, BehaviorError> {
        if path.is_empty() {
            return Ok(self.clone());
        }
        let sig = self.sig.clone();
        match &self.repr {
            Repr::Stream(at) => {
                if path.iter().any(|&k| k != 0) {
                    return Err(BehaviorError::NoSuccessor(path.to_vec()));
                }
                let at = at.clone();
                let shift = path.len();
                Ok(Self::stream(sig, move |k| at(k + shift)))
            }
            Repr::Language(member) => {
                if path.iter().any(|&a| a >= sig.alphabet().len()) {
                    return Err(BehaviorError::NoSuccessor(path.to_vec()));
                }
                let member = member.clone();
                let prefix = path.to_vec();
                Ok(Self::language(sig, move |w| {
                    let mut full = prefix.clone();
                    full.extend_from_slice(w);
                    member(&full)
                }))
            }
            Repr::General(p) => {
                // Successors that exist at depth |path| exist at every deeper stage.
                if self.produce(path.len()).follow(path).is_none() {
                    return Err(BehaviorError::NoSuccessor(path.to_vec()));
                }
                let p = p.clone();
                let path = path.to_vec();
                Ok(Self::general(sig, move |i| p(i + path.len()).follow(&path).expect("successor exists")))
            }
        }
    }

    /// Exhaustively check `produce(j).project(i) == produce(i)` for `i <= j <= max_depth`;
    /// returns the first failing pair.
    pub fn coherence_failure(&self, max_depth: usize) -> Option<(usize, usize)> {
        let stages: Vec<Approximant> = (0..=max_depth).map(|i| self.produce(i)).collect();
        for (j, a) in stages.iter().enumerate() {
            for (i, b) in stages.iter().enumerate().take(j + 1) {
                if a.project(i).ok().as_ref() != Some(b) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}
