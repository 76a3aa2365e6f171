//! Loader for `.spec` input files. The grammar is in `docs/dsl.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;
use std::sync::Arc;

use companion_core::behavior::{BehaviorSignature, LazyBehavior, SignatureKind};
use companion_core::bisim::{parse_expr, AtomFlag, Env, LangExpr};
use companion_core::causal::builtins::{self, Extended};
use companion_core::corecursion::{composite, Equation, OracleRef, OutExpr};
use companion_core::value::ValueSort;
use companion_core::{Bindings, BisimError, CausalError, CausalOperation, CheckConfig, EquationSystem, Registry, Term, Value};
use num_rational::BigRational;

use crate::diag::{Diag, Location};
use crate::sexpr::{read, tokenize, SExpr, Token};

#[derive(Clone, Debug)]
pub struct Goal {
    pub name: String,
    pub lhs: LangExpr,
    pub rhs: LangExpr,
}

pub struct Spec {
    pub signature: Arc<BehaviorSignature>,
    pub registry: Registry,
    /// Every operation declared in the file, including refused ones.
    pub declared: BTreeMap<String, CausalOperation>,
    pub system: EquationSystem,
    pub bindings: Bindings,
    pub env: Env,
    pub goals: Vec<Goal>,
    var_params: BTreeMap<String, usize>,
}

/// Names visible while reading a term.
struct Scope<'a> {
    params: &'a [String],
    allow_vars: bool,
}

struct Loader<'a> {
    file: &'a str,
    line: usize,
    seed: Option<u64>,
    config: CheckConfig,
    var_params: BTreeMap<String, usize>,
    spec: Option<Spec>,
}

const KEYWORDS: [&str; 5] = ["seq", "tail", "child", "deriv", "head"];

fn cli_config() -> CheckConfig {
    CheckConfig { max_depth: 5, samples: 100, ..CheckConfig::default() }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn is_atom_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_uppercase()) && cs.all(|c| c.is_ascii_digit())
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.strip_prefix('+').unwrap_or(s);
    BigRational::from_str(s).ok()
}

pub fn parse_value(s: &str, sort: &ValueSort) -> Option<Value> {
    match sort {
        ValueSort::Unit => None,
        ValueSort::Bool => match s {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => None,
        },
        ValueSort::Rational => parse_rational(s).map(Value::Rat),
        ValueSort::Float => s.parse().ok().map(|f| Value::Float(companion_core::value::Float(f))),
        ValueSort::Tuple(sorts) => {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != sorts.len() {
                return None;
            }
            parts.iter().zip(sorts).map(|(p, s)| parse_value(p, s)).collect::<Option<_>>().map(Value::Tuple)
        }
    }
}

/// The built-in named `name` for `sig`, if the catalog has one.
pub fn builtin(name: &str, sig: &BehaviorSignature) -> Option<CausalOperation> {
    match sig.kind() {
        SignatureKind::Stream if sig.name() == "stream" => Some(match name {
            "plus" => builtins::plus(),
            "shuffle" => builtins::shuffle(),
            "conv" => builtins::convolution(),
            "alt" => builtins::alt(),
            "min" => builtins::fin_min(),
            "sum" => builtins::fin_sum(),
            "even_stream" => builtins::even_stream().renamed("even_stream"),
            "double" => builtins::double(),
            "first_zero" => builtins::first_zero(),
            _ => return None,
        }),
        SignatureKind::Stream if name == "even" => Some(builtins::even()),
        SignatureKind::Language => {
            let ab = sig.alphabet();
            Some(match name {
                "union" => builtins::union(ab),
                "concat" => builtins::concat(ab),
                "star" => builtins::star(ab),
                "shuffle" => builtins::language_shuffle(ab),
                "funion" => builtins::fin_union(ab),
                "cfg" => builtins::cfg(ab),
                _ => return None,
            })
        }
        _ => None,
    }
}

pub fn signature_from_words(words: &[&str]) -> Option<Arc<BehaviorSignature>> {
    match words {
        ["stream"] => Some(BehaviorSignature::rational_stream()),
        ["stream2"] => Some(BehaviorSignature::pair_stream()),
        ["maybe"] => Some(BehaviorSignature::maybe()),
        ["detaut", letters] => {
            let ab: Vec<char> = letters.chars().collect();
            let distinct: BTreeSet<char> = ab.iter().copied().collect();
            (ab.iter().all(char::is_ascii_lowercase) && distinct.len() == ab.len()).then(|| BehaviorSignature::detaut(&ab))
        }
        _ => None,
    }
}

impl<'a> Loader<'a> {
    fn loc(&self, col: usize) -> Location {
        Location { file: self.file.to_string(), line: self.line, col }
    }

    fn err(&self, code: &'static str, col: usize, msg: impl Into<String>) -> Diag {
        Diag::at(code, self.loc(col), msg)
    }

    fn spec(&mut self, col: usize) -> Result<&mut Spec, Diag> {
        let loc = self.loc(col);
        self.spec.as_mut().ok_or_else(|| Diag::at("signature", loc, "the first declaration must be `signature`"))
    }

    fn declare_op(&mut self, tok: &Token, op: CausalOperation) -> Result<(), Diag> {
        let loc = self.loc(tok.col);
        let spec = self.spec(tok.col)?;
        if spec.declared.contains_key(op.symbol()) || spec.var_params.contains_key(op.symbol()) || spec.bindings.contains_key(op.symbol()) {
            return Err(Diag::at("duplicate", loc, format!("`{}` is already declared", op.symbol())));
        }
        spec.declared.insert(op.symbol().to_string(), op.clone());
        match spec.registry.register(op) {
            Ok(()) | Err(CausalError::NotCausal { .. }) | Err(CausalError::Incoherent { .. }) => Ok(()),
            Err(e) => Err(Diag::at("causal", loc, e.to_string())),
        }
    }

    fn decl(&mut self, toks: &[Token], raw: &str) -> Result<(), Diag> {
        let head = &toks[0];
        let rest = &toks[1..];
        let words: Vec<&str> = rest.iter().map(|t| t.text.as_str()).collect();
        match head.text.as_str() {
            "signature" => {
                if self.spec.is_some() {
                    return Err(self.err("signature", head.col, "signature declared twice"));
                }
                let sig = signature_from_words(&words)
                    .ok_or_else(|| self.err("signature", head.col, format!("unknown signature `{}`", words.join(" "))))?;
                let env = Env::new(sig.alphabet());
                self.spec = Some(Spec {
                    signature: sig.clone(),
                    registry: Registry::with_config(self.config.clone()),
                    declared: BTreeMap::new(),
                    system: EquationSystem::new(sig),
                    bindings: Bindings::new(),
                    env,
                    goals: vec![],
                    var_params: self.var_params.clone(),
                });
                Ok(())
            }
            "registry" => {
                let mut cfg = cli_config();
                if let Some(seed) = self.seed {
                    cfg.seed = seed;
                }
                let mut it = rest.chunks(2);
                for pair in &mut it {
                    let [k, v] = pair else { return Err(self.err("syntax", pair[0].col, "expected a key and a value")) };
                    let n: usize = v.text.parse().map_err(|_| self.err("syntax", v.col, "expected a number"))?;
                    match k.text.as_str() {
                        "depth" => cfg.max_depth = n,
                        "samples" => cfg.samples = n,
                        "width" => cfg.max_width = n,
                        other => return Err(self.err("syntax", k.col, format!("unknown registry setting `{other}`"))),
                    }
                }
                self.config = cfg.clone();
                if let Some(spec) = self.spec.as_mut() {
                    if spec.declared.is_empty() {
                        spec.registry = Registry::with_config(cfg);
                    } else {
                        return Err(self.err("syntax", head.col, "`registry` must come before any operation"));
                    }
                }
                Ok(())
            }
            "builtin" => {
                if rest.is_empty() {
                    return Err(self.err("syntax", head.col, "expected operation names"));
                }
                for t in rest {
                    let sig = self.spec(t.col)?.signature.clone();
                    let op = builtin(&t.text, &sig).ok_or_else(|| {
                        self.err("unknown-name", t.col, format!("no built-in `{}` for signature `{}`", t.text, sig.name()))
                    })?;
                    self.declare_op(t, op)?;
                }
                Ok(())
            }
            "const" => {
                let [name, r] = rest else { return Err(self.err("syntax", head.col, "expected `const NAME RATIONAL`")) };
                let sig = self.spec(head.col)?.signature.clone();
                if sig.name() != "stream" {
                    return Err(self.err("signature", head.col, "constants need the `stream` signature"));
                }
                let r = parse_rational(&r.text).ok_or_else(|| self.err("syntax", r.col, "expected a rational"))?;
                self.check_name(name)?;
                self.declare_op(name, builtins::constant(name.text.clone(), r))
            }
            "table" => {
                let Some((name, points)) = rest.split_first() else {
                    return Err(self.err("syntax", head.col, "expected `table NAME v0 … vω`"));
                };
                if self.spec(head.col)?.signature.kind() != SignatureKind::Maybe {
                    return Err(self.err("signature", head.col, "tables need the `maybe` signature"));
                }
                if points.len() < 2 {
                    return Err(self.err("syntax", head.col, "a table needs at least two points"));
                }
                let table: Vec<Extended> = points
                    .iter()
                    .map(|p| match p.text.as_str() {
                        "w" => Ok(None),
                        s => s.parse().map(Some).map_err(|_| self.err("syntax", p.col, "expected a natural number or `w`")),
                    })
                    .collect::<Result<_, _>>()?;
                self.check_name(name)?;
                self.declare_op(name, builtins::maybe_table(name.text.clone(), table))
            }
            "define" => {
                let Some(name) = rest.first() else { return Err(self.err("syntax", head.col, "expected a name")) };
                self.check_name(name)?;
                let mut pos = 1;
                let params = match read(rest, &mut pos).map_err(|(c, m)| self.err("syntax", c, m))? {
                    SExpr::List(xs, _) => xs
                        .iter()
                        .map(|x| match x.atom() {
                            Some(s) if is_name(s) => Ok(s.to_string()),
                            _ => Err(self.err("syntax", x.col(), "expected a parameter name")),
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                    other => return Err(self.err("syntax", other.col(), "expected a parameter list")),
                };
                let body = read(rest, &mut pos).map_err(|(c, m)| self.err("syntax", c, m))?;
                self.expect_end(rest, pos)?;
                let scope = Scope { params: &params, allow_vars: false };
                let spec = self.spec(head.col)?;
                let term = spec.term(&scope, &body).map_err(|(c, code, m)| self.err(code, c, m))?;
                let spec = self.spec(head.col)?;
                let op = composite(name.text.clone(), &spec.registry, term, params.len(), spec.signature.clone())
                    .map_err(|e| Diag { location: Some(self.loc(body.col())), ..Diag::from(e) })?;
                self.declare_op(name, op)
            }
            "oracle" => {
                let [name, eq, src, args @ ..] = rest else {
                    return Err(self.err("syntax", head.col, "expected `oracle NAME = SOURCE`"));
                };
                if !eq.is("=") {
                    return Err(self.err("syntax", eq.col, "expected `=`"));
                }
                self.check_name(name)?;
                let sig = self.spec(head.col)?.signature.clone();
                let b = self.source(&sig, src, args)?;
                let spec = self.spec(head.col)?;
                spec.bindings.insert(name.text.clone(), b);
                spec.system.oracles.push(name.text.clone());
                Ok(())
            }
            "var" => self.var(rest, head),
            "atom" => {
                let [name, flag] = rest else { return Err(self.err("syntax", head.col, "expected `atom NAME FLAG`")) };
                let flag = match flag.text.as_str() {
                    "true" => AtomFlag::True,
                    "false" => AtomFlag::False,
                    "symbolic" => AtomFlag::Symbolic,
                    _ => return Err(self.err("syntax", flag.col, "expected `true`, `false` or `symbolic`")),
                };
                self.check_atom(name)?;
                let spec = self.spec(head.col)?;
                spec.env = spec.env.clone().with_atom(name.text.clone(), flag);
                Ok(())
            }
            "hyp" => {
                let [name, eq, ..] = rest else { return Err(self.err("syntax", head.col, "expected `hyp NAME = REGEX`")) };
                if !eq.is("=") {
                    return Err(self.err("syntax", eq.col, "expected `=`"));
                }
                self.check_atom(name)?;
                let start = eq.col;
                let e = self.regex(raw, start, raw.chars().count() + 1)?;
                let spec = self.spec(head.col)?;
                spec.env = spec.env.clone().with_hypothesis(name.text.clone(), e.clone());
                let env = spec.env.clone();
                env.check(&e).map_err(|err| self.err("regex", start + 1, err.to_string()))
            }
            "goal" => {
                let [name, colon, ..] = rest else { return Err(self.err("syntax", head.col, "expected `goal NAME : LHS == RHS`")) };
                if !colon.is(":") {
                    return Err(self.err("syntax", colon.col, "expected `:`"));
                }
                if !is_name(&name.text) {
                    return Err(self.err("syntax", name.col, "expected a goal name"));
                }
                if self.spec(head.col)?.signature.kind() != SignatureKind::Language {
                    return Err(self.err("signature", head.col, "goals need a `detaut` signature"));
                }
                let chars: Vec<char> = raw.chars().collect();
                let split = (colon.col..chars.len().saturating_sub(1))
                    .find(|&k| chars[k] == '=' && chars[k + 1] == '=')
                    .ok_or_else(|| self.err("syntax", colon.col, "expected `==`"))?;
                let lhs = self.regex(raw, colon.col, split + 1)?;
                let rhs = self.regex(raw, split + 2, chars.len() + 1)?;
                let spec = self.spec(head.col)?;
                if spec.goals.iter().any(|g| g.name == name.text) {
                    return Err(self.err("duplicate", name.col, format!("goal `{}` is already declared", name.text)));
                }
                let env = spec.env.clone();
                for (e, col) in [(&lhs, colon.col + 1), (&rhs, split + 3)] {
                    env.check(e).map_err(|err| self.err("regex", col, err.to_string()))?;
                }
                self.spec(head.col)?.goals.push(Goal { name: name.text.clone(), lhs, rhs });
                Ok(())
            }
            other => Err(self.err("unknown-declaration", head.col, format!("unknown declaration `{other}`"))),
        }
    }

    /// Parse the regular expression between 1-based columns `after` (exclusive) and `until` (exclusive).
    fn regex(&self, raw: &str, after: usize, until: usize) -> Result<LangExpr, Diag> {
        let text: String = raw.chars().skip(after).take(until.saturating_sub(after + 1)).collect();
        parse_expr(&text).map_err(|e| match e {
            BisimError::Parse { pos, msg } => self.err("regex", after + 1 + pos, msg),
            e => self.err("regex", after + 1, e.to_string()),
        })
    }

    fn expect_end(&self, toks: &[Token], pos: usize) -> Result<(), Diag> {
        match toks.get(pos) {
            Some(t) => Err(self.err("syntax", t.col, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }

    fn check_name(&mut self, t: &Token) -> Result<(), Diag> {
        if !is_name(&t.text) || KEYWORDS.contains(&t.text.as_str()) {
            return Err(self.err("syntax", t.col, format!("`{}` is not a valid name", t.text)));
        }
        let loc = self.loc(t.col);
        let spec = self.spec(t.col)?;
        if spec.declared.contains_key(&t.text) || spec.bindings.contains_key(&t.text) || spec.system.equations.contains_key(&t.text) {
            return Err(Diag::at("duplicate", loc, format!("`{}` is already declared", t.text)));
        }
        Ok(())
    }

    fn check_atom(&mut self, t: &Token) -> Result<(), Diag> {
        if !is_atom_name(&t.text) {
            return Err(self.err("syntax", t.col, format!("`{}` is not an atom name (an upper-case letter, then digits)", t.text)));
        }
        let loc = self.loc(t.col);
        let spec = self.spec(t.col)?;
        if spec.signature.kind() != SignatureKind::Language {
            return Err(Diag::at("signature", loc, "atoms need a `detaut` signature"));
        }
        if spec.env.atoms().contains_key(&t.text) || spec.env.hypotheses().contains_key(&t.text) {
            return Err(Diag::at("duplicate", loc, format!("`{}` is already declared", t.text)));
        }
        Ok(())
    }

    fn source(&self, sig: &Arc<BehaviorSignature>, src: &Token, args: &[Token]) -> Result<LazyBehavior, Diag> {
        let kind = sig.kind();
        let sort = sig.constructors()[0].sort.clone();
        let values = |ts: &[Token]| {
            ts.iter()
                .map(|t| parse_value(&t.text, &sort).ok_or_else(|| self.err("syntax", t.col, format!("`{}` is not a value", t.text))))
                .collect::<Result<Vec<_>, _>>()
        };
        let wrong = || self.err("signature", src.col, format!("source `{}` does not fit signature `{}`", src.text, sig.name()));
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(self.err("syntax", src.col, format!("`{}` takes {n} arguments", src.text)))
            }
        };
        match (src.text.as_str(), kind) {
            ("repeat", SignatureKind::Stream) => {
                arity(1)?;
                Ok(LazyBehavior::repeat(sig.clone(), values(args)?.remove(0)))
            }
            ("scalar", SignatureKind::Stream) => {
                arity(1)?;
                Ok(LazyBehavior::scalar(sig.clone(), values(args)?.remove(0)))
            }
            ("cycle", SignatureKind::Stream) if !args.is_empty() => Ok(LazyBehavior::cycle(sig.clone(), values(args)?)),
            ("prefix", SignatureKind::Stream) => {
                let vs = values(args)?;
                let zero = Value::default_of(&sort);
                Ok(LazyBehavior::stream(sig.clone(), move |k| vs.get(k).cloned().unwrap_or_else(|| zero.clone())))
            }
            ("naturals", SignatureKind::Stream) if sort == ValueSort::Rational => {
                arity(0)?;
                Ok(LazyBehavior::stream(sig.clone(), |k| Value::int(k as i64)))
            }
            ("words", SignatureKind::Language) => {
                let mut set = BTreeSet::new();
                for t in args {
                    let w = if t.is("eps") { Some(vec![]) } else { t.text.chars().map(|c| sig.letter_index(c)).collect() };
                    set.insert(w.ok_or_else(|| self.err("syntax", t.col, format!("`{}` is not a word over the alphabet", t.text)))?);
                }
                Ok(LazyBehavior::language(sig.clone(), move |w| set.contains(w)))
            }
            ("all", SignatureKind::Language) => {
                arity(0)?;
                Ok(LazyBehavior::language(sig.clone(), |_| true))
            }
            ("none", SignatureKind::Language) => {
                arity(0)?;
                Ok(LazyBehavior::language(sig.clone(), |_| false))
            }
            ("nat", SignatureKind::Maybe) => {
                arity(1)?;
                let k = args[0].text.parse().map_err(|_| self.err("syntax", args[0].col, "expected a natural number"))?;
                Ok(LazyBehavior::maybe(sig.clone(), Some(k)))
            }
            ("omega", SignatureKind::Maybe) => {
                arity(0)?;
                Ok(LazyBehavior::maybe(sig.clone(), None))
            }
            ("repeat" | "scalar" | "cycle" | "prefix" | "naturals" | "words" | "all" | "none" | "nat" | "omega", _) => Err(wrong()),
            (other, _) => Err(self.err("syntax", src.col, format!("unknown oracle source `{other}`"))),
        }
    }

    fn var(&mut self, rest: &[Token], head: &Token) -> Result<(), Diag> {
        let Some(name) = rest.first() else { return Err(self.err("syntax", head.col, "expected a variable name")) };
        self.check_name(name)?;
        let mut pos = 1;
        let mut params = Vec::new();
        if rest.get(pos).is_some_and(|t| t.is("[")) {
            pos += 1;
            loop {
                match rest.get(pos) {
                    None => return Err(self.err("syntax", rest[1].col, "unclosed `[`")),
                    Some(t) if t.is("]") => {
                        pos += 1;
                        break;
                    }
                    Some(t) if is_name(&t.text) && !params.contains(&t.text) => params.push(t.text.clone()),
                    Some(t) => return Err(self.err("syntax", t.col, format!("`{}` is not a fresh parameter name", t.text))),
                }
                pos += 1;
            }
        }
        match rest.get(pos) {
            Some(t) if t.is("=") => pos += 1,
            Some(t) => return Err(self.err("syntax", t.col, "expected `=`")),
            None => return Err(self.err("syntax", name.col, "expected `=`")),
        }
        let body = read(rest, &mut pos).map_err(|(c, m)| self.err("syntax", c, m))?;
        self.expect_end(rest, pos)?;
        let scope = Scope { params: &params, allow_vars: true };
        let eq = self.spec(head.col)?.equation(&scope, &body);
        let eq = eq.map_err(|(c, code, m)| self.err(code, c, m))?;
        self.spec(head.col)?.system.equations.insert(name.text.clone(), eq.with_params(params.len()));
        Ok(())
    }
}

type TermError = (usize, &'static str, String);

fn term_err(col: usize, code: &'static str, msg: impl Into<String>) -> TermError {
    (col, code, msg.into())
}

impl Spec {
    /// Wrap a system read from JSON. Operations come from the built-in catalog,
    /// admitted without re-running the checkers.
    pub fn from_system(system: EquationSystem) -> Spec {
        let sig = system.signature.clone();
        let registry = match sig.kind() {
            SignatureKind::Language => Registry::language_builtins(sig.alphabet()),
            SignatureKind::Stream if sig.name() == "stream" => Registry::stream_builtins(),
            _ => Registry::new(),
        };
        let declared = registry.operations().map(|op| (op.symbol().to_string(), op.clone())).collect();
        let var_params = system.equations.iter().map(|(k, e)| (k.clone(), e.params)).collect();
        Spec {
            env: Env::new(sig.alphabet()),
            signature: sig,
            registry,
            declared,
            bindings: Bindings::new(),
            system,
            goals: vec![],
            var_params,
        }
    }

    /// Parse a closed term given on the command line.
    pub fn parse_term(&self, text: &str) -> Result<Term, Diag> {
        let toks = tokenize(text);
        let mut pos = 0;
        let loc = |col| Location { file: "<term>".into(), line: 1, col };
        let e = read(&toks, &mut pos).map_err(|(c, m)| Diag::at("syntax", loc(c), m))?;
        if let Some(t) = toks.get(pos) {
            return Err(Diag::at("syntax", loc(t.col), format!("unexpected `{}`", t.text)));
        }
        self.term(&Scope { params: &[], allow_vars: true }, &e).map_err(|(c, code, m)| Diag::at(code, loc(c), m))
    }

    fn equation(&self, scope: &Scope, e: &SExpr) -> Result<Equation, TermError> {
        let SExpr::List(items, col) = e else {
            return Err(term_err(e.col(), "equation", "expected `(CONSTRUCTOR [OUT] CHILDREN…)`"));
        };
        let Some((tag, rest)) = items.split_first() else { return Err(term_err(*col, "equation", "empty equation")) };
        let tag_name = tag.atom().unwrap_or_default();
        let ctor = self.signature.ctor_index(tag_name).ok_or_else(|| {
            let tags: Vec<&str> = self.signature.constructors().iter().map(|c| c.tag.as_str()).collect();
            term_err(tag.col(), "equation", format!("`{tag}` is not a constructor; expected one of {}", tags.join(", ")))
        })?;
        let c = &self.signature.constructors()[ctor];
        let (out, kids) = if c.sort == ValueSort::Unit {
            (OutExpr::Lit(Value::Unit), rest)
        } else {
            let Some((o, kids)) = rest.split_first() else {
                return Err(term_err(*col, "equation", format!("constructor `{}` needs an output", c.tag)));
            };
            (self.out(scope, o, &c.sort)?, kids)
        };
        if kids.len() != c.arity {
            return Err(term_err(*col, "equation", format!("constructor `{}` takes {} children, got {}", c.tag, c.arity, kids.len())));
        }
        let kids = kids.iter().map(|k| self.term(scope, k)).collect::<Result<_, _>>()?;
        Ok(Equation::new(c.tag.clone(), out, kids))
    }

    fn out(&self, scope: &Scope, e: &SExpr, sort: &ValueSort) -> Result<OutExpr, TermError> {
        match e {
            SExpr::Atom(t) => parse_value(&t.text, sort)
                .or_else(|| parse_value(&t.text, &ValueSort::Rational))
                .or_else(|| parse_value(&t.text, &ValueSort::Bool))
                .map(OutExpr::Lit)
                .ok_or_else(|| term_err(t.col, "equation", format!("`{}` is not an output value", t.text))),
            SExpr::List(items, col) => {
                let head = items.first().and_then(SExpr::atom).unwrap_or_default();
                let args = &items[1.min(items.len())..];
                let want = |n: usize| {
                    if args.len() == n {
                        Ok(())
                    } else {
                        Err(term_err(*col, "equation", format!("`{head}` takes {n} arguments")))
                    }
                };
                let sub = |k: usize| self.out(scope, &args[k], sort).map(Box::new);
                Ok(match head {
                    "head" => {
                        want(1)?;
                        OutExpr::Head(self.oracle_ref(scope, &args[0])?)
                    }
                    "+" | "-" | "*" | "and" | "or" => {
                        want(2)?;
                        let (a, b) = (sub(0)?, sub(1)?);
                        match head {
                            "+" => OutExpr::Add(a, b),
                            "-" => OutExpr::Sub(a, b),
                            "*" => OutExpr::Mul(a, b),
                            "and" => OutExpr::And(a, b),
                            _ => OutExpr::Or(a, b),
                        }
                    }
                    "neg" | "not" => {
                        want(1)?;
                        if head == "neg" {
                            OutExpr::Neg(sub(0)?)
                        } else {
                            OutExpr::Not(sub(0)?)
                        }
                    }
                    _ => return Err(term_err(*col, "equation", format!("unknown output operator `{head}`"))),
                })
            }
        }
    }

    fn oracle_ref(&self, scope: &Scope, e: &SExpr) -> Result<OracleRef, TermError> {
        match e {
            SExpr::Atom(t) => {
                if let Some(k) = scope.params.iter().position(|p| *p == t.text) {
                    Ok(OracleRef::Param(k))
                } else if self.bindings.contains_key(&t.text) {
                    Ok(OracleRef::named(t.text.clone()))
                } else {
                    Err(term_err(t.col, "unknown-name", format!("`{}` is not an oracle or parameter", t.text)))
                }
            }
            SExpr::List(items, col) => {
                let head = items.first().and_then(SExpr::atom).unwrap_or_default();
                match (head, &items[1.min(items.len())..]) {
                    ("tail", [r]) => Ok(self.oracle_ref(scope, r)?.tail()),
                    ("child", [k, r]) => {
                        let n = k.atom().and_then(|s| s.parse().ok()).ok_or_else(|| term_err(k.col(), "syntax", "expected a child index"))?;
                        Ok(self.oracle_ref(scope, r)?.child(n))
                    }
                    ("deriv", [a, r]) => {
                        let idx = a
                            .atom()
                            .and_then(|s| {
                                let mut cs = s.chars();
                                cs.next().filter(|_| cs.next().is_none())
                            })
                            .and_then(|c| self.signature.letter_index(c))
                            .ok_or_else(|| term_err(a.col(), "syntax", "expected a letter of the alphabet"))?;
                        Ok(self.oracle_ref(scope, r)?.child(idx))
                    }
                    _ => Err(term_err(*col, "syntax", "expected an oracle reference")),
                }
            }
        }
    }

    fn term(&self, scope: &Scope, e: &SExpr) -> Result<Term, TermError> {
        match e {
            SExpr::Atom(t) => {
                let name = t.text.as_str();
                if scope.params.iter().any(|p| p == name) || self.bindings.contains_key(name) {
                    return Ok(Term::Oracle(self.oracle_ref(scope, e)?));
                }
                if scope.allow_vars {
                    match self.var_params.get(name) {
                        Some(0) => return Ok(Term::var(name)),
                        Some(k) => return Err(term_err(t.col, "equation", format!("variable `{name}` takes {k} oracle arguments"))),
                        None => {}
                    }
                }
                if self.declared.contains_key(name) {
                    return Ok(Term::op(name, vec![]));
                }
                Err(term_err(t.col, "unknown-name", format!("`{name}` is not declared")))
            }
            SExpr::List(items, col) => {
                let Some((head, args)) = items.split_first() else { return Err(term_err(*col, "syntax", "empty list")) };
                let Some(h) = head.atom() else { return Err(term_err(head.col(), "syntax", "expected a name")) };
                match h {
                    "seq" => Ok(Term::Seq(args.iter().map(|a| self.term(scope, a)).collect::<Result<_, _>>()?)),
                    "tail" | "child" | "deriv" => Ok(Term::Oracle(self.oracle_ref(scope, e)?)),
                    _ if scope.allow_vars && self.var_params.contains_key(h) => {
                        let refs = args.iter().map(|a| self.oracle_ref(scope, a)).collect::<Result<_, _>>()?;
                        Ok(Term::var_with(h, refs))
                    }
                    _ if is_name(h) => Ok(Term::op(h, args.iter().map(|a| self.term(scope, a)).collect::<Result<_, _>>()?)),
                    _ => Err(term_err(head.col(), "syntax", format!("`{h}` is not an operation name"))),
                }
            }
        }
    }
}

/// First line mentioning each declared name and each operation applied in a term.
pub fn sites(file: &str, text: &str) -> BTreeMap<String, Location> {
    let mut sites = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let toks = tokenize(strip_comment(line));
        let at = |t: &Token| Location { file: file.to_string(), line: k + 1, col: t.col };
        match toks.first().map(|t| t.text.as_str()) {
            Some("var" | "goal" | "define" | "const" | "table") => {
                if let Some(t) = toks.get(1) {
                    sites.entry(t.text.clone()).or_insert_with(|| at(t));
                }
            }
            Some("builtin") => {
                for t in &toks[1..] {
                    sites.entry(t.text.clone()).or_insert_with(|| at(t));
                }
            }
            _ => {}
        }
        for w in toks.windows(2) {
            if w[0].is("(") {
                sites.entry(w[1].text.clone()).or_insert_with(|| at(&w[1]));
            }
        }
    }
    sites
}

/// Load an input file from its text. `file` is used in error locations.
pub fn load(file: &str, text: &str, seed: Option<u64>) -> Result<Spec, Diag> {
    let mut cfg = cli_config();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let mut loader = Loader { file, line: 0, seed, config: cfg, var_params: BTreeMap::new(), spec: None };
    let mut var_params = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let toks = tokenize(strip_comment(line));
        if toks.first().is_some_and(|t| t.is("var")) {
            if let Some(name) = toks.get(1) {
                let n = match toks.get(2) {
                    Some(t) if t.is("[") => toks[3..].iter().take_while(|t| !t.is("]")).count(),
                    _ => 0,
                };
                if var_params.insert(name.text.clone(), n).is_some() {
                    loader.line = k + 1;
                    return Err(loader.err("duplicate", name.col, format!("variable `{}` is defined twice", name.text)));
                }
            }
        }
    }
    loader.var_params = var_params;
    for (k, line) in text.lines().enumerate() {
        loader.line = k + 1;
        let raw = strip_comment(line);
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        loader.decl(&toks, raw)?;
    }
    loader.line = text.lines().count().max(1);
    loader.spec.ok_or_else(|| Diag::at("signature", Location { file: file.into(), line: 1, col: 1 }, "missing `signature`"))
}
