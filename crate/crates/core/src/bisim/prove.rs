//! Worklist proof search for bisimulations up to a set of combinators.

use std::collections::VecDeque;

use serde_json::{json, Value as Json};

use super::closure::Pair;
use super::{in_upto_closure, parse_expr, AtomFlag, Combinators, Derivation, Env, LangExpr, Relation, Rule, Truth};
use crate::behavior::SignatureKind;
use crate::causal::Registry;
use crate::error::BisimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Largest relation the search may build.
    pub max_pairs: usize,
    /// Longest word explored.
    pub max_depth: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_pairs: 5000, max_depth: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Added to the relation; its successors were queued.
    Expanded,
    Discharged(Derivation),
}

/// One processed worklist entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub lhs: LangExpr,
    pub rhs: LangExpr,
    pub word: String,
    pub kind: StepKind,
}

#[derive(Clone, Debug)]
pub struct Proof {
    pub env: Env,
    pub combinators: Combinators,
    pub goals: Vec<Pair>,
    pub relation: Relation,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub goal: usize,
    pub word: String,
    /// Truth values of the symbolic atoms under which the sides disagree.
    pub valuation: Vec<(String, bool)>,
    pub lhs_accepts: bool,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Proof(Proof),
    Counterexample(Counterexample),
    Unknown { reason: String, relation_size: usize },
}

/// The empty-word obligation and the successor pairs of `(lhs, rhs)`.
pub fn bstep(env: &mut Env, lhs: &LangExpr, rhs: &LangExpr) -> Result<((Truth, Truth), Vec<Pair>), BisimError> {
    let obligation = (env.eps(lhs)?, env.eps(rhs)?);
    let mut succ = Vec::new();
    for a in env.alphabet().to_vec() {
        succ.push((env.deriv(lhs, a)?, env.deriv(rhs, a)?));
    }
    Ok((obligation, succ))
}

/// Refuse context combinators whose operation is not registered as causal over the alphabet.
fn soundness_gate(env: &Env, c: &Combinators, registry: &Registry) -> Result<(), BisimError> {
    for (comb, symbol) in c.context_ops() {
        let refuse = |reason: String| Err(BisimError::Refused { combinator: comb.into(), reason });
        let Some(op) = registry.lookup(symbol) else {
            return refuse(match registry.rejection(symbol) {
                Some(r) => format!("operation `{symbol}` was refused registration: {r}"),
                None => format!("operation `{symbol}` is not registered"),
            });
        };
        let out = op.output();
        if op.is_cross() || out.kind() != SignatureKind::Language || out.alphabet() != env.alphabet() {
            return refuse(format!("operation `{symbol}` is not a language operation over this alphabet"));
        }
    }
    Ok(())
}

/// Search for a relation `R` containing the goals with `R ⊆ b(C(R))`.
///
/// Pairs are processed breadth-first, so a counterexample word is as short as
/// possible. Symbolic empty-word flags are compared under every valuation.
pub fn prove_upto(
    env: &Env,
    goals: &[Pair],
    combinators: &Combinators,
    bounds: &Bounds,
    registry: &Registry,
) -> Result<Outcome, BisimError> {
    soundness_gate(env, combinators, registry)?;
    let start = env.clone();
    let mut env = env.clone();
    for (l, r) in goals {
        env.check(l)?;
        env.check(r)?;
    }
    let goals: Vec<Pair> = goals.iter().map(|(l, r)| (l.normalize(), r.normalize())).collect();
    let mut relation = Relation::new();
    let mut steps = Vec::new();
    let mut queue: VecDeque<(usize, String, LangExpr, LangExpr)> =
        goals.iter().enumerate().map(|(k, (l, r))| (k, String::new(), l.clone(), r.clone())).collect();
    while let Some((goal, word, lhs, rhs)) = queue.pop_front() {
        if let Some(d) = in_upto_closure(&lhs, &rhs, &relation, combinators) {
            steps.push(Step { lhs, rhs, word, kind: StepKind::Discharged(d) });
            continue;
        }
        let ((el, er), succ) = match bstep(&mut env, &lhs, &rhs) {
            Err(BisimError::TooManySymbolic(n)) => {
                return Ok(Outcome::Unknown {
                    reason: format!("more than {n} symbolic atoms"),
                    relation_size: relation.len(),
                })
            }
            r => r?,
        };
        if let Some(v) = el.first_difference(er) {
            let valuation = env.valuation(v).into_iter().map(|(a, b)| (a.to_string(), b)).collect();
            return Ok(Outcome::Counterexample(Counterexample { goal, word, valuation, lhs_accepts: el.at(v) }));
        }
        if relation.len() >= bounds.max_pairs {
            return Ok(Outcome::Unknown {
                reason: format!("relation reached {} pairs", bounds.max_pairs),
                relation_size: relation.len(),
            });
        }
        if word.chars().count() >= bounds.max_depth {
            return Ok(Outcome::Unknown {
                reason: format!("words reached length {}", bounds.max_depth),
                relation_size: relation.len(),
            });
        }
        relation.insert(lhs.clone(), rhs.clone());
        steps.push(Step { lhs, rhs, word: word.clone(), kind: StepKind::Expanded });
        for ((dl, dr), a) in succ.into_iter().zip(env.alphabet().to_vec()) {
            queue.push_back((goal, format!("{word}{a}"), dl, dr));
        }
    }
    Ok(Outcome::Proof(Proof { env: start, combinators: *combinators, goals, relation, steps }))
}

fn pair_json((l, r): &Pair) -> Json {
    json!([l.to_string(), r.to_string()])
}

fn flag_json(f: AtomFlag) -> Json {
    match f {
        AtomFlag::True => json!(true),
        AtomFlag::False => json!(false),
        AtomFlag::Symbolic => json!("symbolic"),
    }
}

impl Proof {
    pub fn to_json(&self) -> Json {
        let atoms: serde_json::Map<String, Json> = self.env.atoms().iter().map(|(k, f)| (k.clone(), flag_json(*f))).collect();
        let hyps: serde_json::Map<String, Json> =
            self.env.hypotheses().iter().map(|(k, e)| (k.clone(), json!(e.to_string()))).collect();
        let steps: Vec<Json> = self
            .steps
            .iter()
            .map(|s| match &s.kind {
                StepKind::Expanded => json!({"pair": [s.lhs.to_string(), s.rhs.to_string()], "word": s.word, "rule": "expand"}),
                StepKind::Discharged(d) => json!({
                    "pair": [s.lhs.to_string(), s.rhs.to_string()],
                    "word": s.word,
                    "rule": "discharge",
                    "derivation": d.to_json(),
                }),
            })
            .collect();
        json!({
            "alphabet": self.env.alphabet().iter().collect::<String>(),
            "atoms": atoms,
            "hypotheses": hyps,
            "max_symbolic": self.env.max_symbolic(),
            "combinators": self.combinators.names(),
            "goals": self.goals.iter().map(pair_json).collect::<Vec<_>>(),
            "relation": self.relation.pairs().iter().map(pair_json).collect::<Vec<_>>(),
            "steps": steps,
        })
    }
}

impl Counterexample {
    pub fn to_json(&self) -> Json {
        json!({
            "goal": self.goal,
            "word": self.word,
            "valuation": self.valuation.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "accepted_by": if self.lhs_accepts { "lhs" } else { "rhs" },
        })
    }

    /// Replay via derivatives: under the valuation, exactly the reported side accepts the word.
    pub fn replays(&self, env: &Env, goals: &[Pair]) -> Result<bool, BisimError> {
        let mut env = env.clone();
        let (l, r) = &goals[self.goal];
        let w: Vec<char> = self.word.chars().collect();
        let tl = env.accepts(&l.normalize(), &w)?;
        let tr = env.accepts(&r.normalize(), &w)?;
        let v = env.symbolic_atoms().iter().enumerate().try_fold(0usize, |acc, (k, a)| {
            let name = a.to_string();
            self.valuation.iter().find(|(n, _)| *n == name).map(|(_, b)| acc | usize::from(*b) << k)
        });
        Ok(match v {
            Some(v) => tl.at(v) == self.lhs_accepts && tr.at(v) != self.lhs_accepts,
            None => false,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecheckReport {
    pub pairs: usize,
    pub successor_checks: usize,
    pub derivations: usize,
}

fn bad(msg: impl Into<String>) -> BisimError {
    BisimError::BadProof(msg.into())
}

fn expr_field(v: &Json) -> Result<LangExpr, BisimError> {
    let s = v.as_str().ok_or_else(|| bad(format!("expected an expression string, got {v}")))?;
    parse_expr(s)
}

fn pair_field(v: &Json) -> Result<Pair, BisimError> {
    match v.as_array().map(Vec::as_slice) {
        Some([l, r]) => Ok((expr_field(l)?, expr_field(r)?)),
        _ => Err(bad(format!("expected a pair, got {v}"))),
    }
}

fn derivation_field(v: &Json) -> Result<Derivation, BisimError> {
    let (lhs, rhs) = pair_field(&v["pair"])?;
    let rule = v["rule"].as_str().and_then(Rule::from_name).ok_or_else(|| bad(format!("unknown rule in {v}")))?;
    let children = match v.get("children") {
        None => vec![],
        Some(Json::Array(xs)) => xs.iter().map(derivation_field).collect::<Result<_, _>>()?,
        Some(other) => return Err(bad(format!("malformed children {other}"))),
    };
    Ok(Derivation { lhs, rhs, rule, children })
}

/// Rebuild the proof setting from its JSON form.
pub fn env_from_json(v: &Json) -> Result<Env, BisimError> {
    let alphabet: Vec<char> = v["alphabet"].as_str().ok_or_else(|| bad("missing alphabet"))?.chars().collect();
    let mut env = Env::new(&alphabet);
    if let Some(m) = v["max_symbolic"].as_u64() {
        env = env.with_max_symbolic(m as usize);
    }
    for (name, f) in v["atoms"].as_object().into_iter().flatten() {
        let flag = match f {
            Json::Bool(true) => AtomFlag::True,
            Json::Bool(false) => AtomFlag::False,
            Json::String(s) if s == "symbolic" => AtomFlag::Symbolic,
            other => return Err(bad(format!("bad flag for atom {name}: {other}"))),
        };
        env = env.with_atom(name.clone(), flag);
    }
    for (name, e) in v["hypotheses"].as_object().into_iter().flatten() {
        env = env.with_hypothesis(name.clone(), expr_field(e)?);
    }
    Ok(env)
}

/// Independently re-validate an emitted proof: the goals lie in the closure of the
/// relation, every pair of the relation meets its empty-word obligation under all
/// valuations with all successors in the closure, and every recorded derivation
/// tree is valid.
pub fn recheck(proof: &Json, registry: &Registry) -> Result<RecheckReport, BisimError> {
    let mut env = env_from_json(proof)?;
    let names: Vec<String> = proof["combinators"]
        .as_array()
        .ok_or_else(|| bad("missing combinators"))?
        .iter()
        .map(|c| c.as_str().map(String::from).ok_or_else(|| bad("bad combinator")))
        .collect::<Result<_, _>>()?;
    let comb = Combinators::parse(&names.join(","))?;
    soundness_gate(&env, &comb, registry)?;
    let list = |k: &str| proof[k].as_array().ok_or_else(|| bad(format!("missing {k}")));
    let goals: Vec<Pair> = list("goals")?.iter().map(pair_field).collect::<Result<_, _>>()?;
    let relation: Relation = list("relation")?.iter().map(pair_field).collect::<Result<_, _>>()?;
    for (l, r) in goals.iter().chain(relation.pairs()) {
        env.check(l)?;
        env.check(r)?;
    }
    for (l, r) in &goals {
        if in_upto_closure(l, r, &relation, &comb).is_none() {
            return Err(bad(format!("goal ({l}, {r}) is not in the closure of the relation")));
        }
    }
    let mut successor_checks = 0;
    for (l, r) in relation.pairs() {
        let ((el, er), succ) = bstep(&mut env, l, r)?;
        if el != er {
            return Err(bad(format!("({l}, {r}) disagrees on the empty word")));
        }
        for (dl, dr) in succ {
            if in_upto_closure(&dl, &dr, &relation, &comb).is_none() {
                return Err(bad(format!("successor ({dl}, {dr}) of ({l}, {r}) is not in the closure")));
            }
            successor_checks += 1;
        }
    }
    let mut derivations = 0;
    for s in list("steps")? {
        if let Some(d) = s.get("derivation") {
            let d = derivation_field(d)?;
            d.verify(&relation, &comb).map_err(bad)?;
            derivations += 1;
        }
    }
    Ok(RecheckReport { pairs: relation.len(), successor_checks, derivations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LangExpr {
        parse_expr(s).unwrap()
    }

    fn registry() -> Registry {
        Registry::language_builtins(&['a', 'b'])
    }

    fn arden() -> (Env, Vec<Pair>) {
        let env = Env::new(&['a', 'b'])
            .with_atom("K", AtomFlag::False)
            .with_atom("M", AtomFlag::Symbolic)
            .with_hypothesis("L", p("KL + M"));
        (env, vec![(p("L"), p("K*M"))])
    }

    #[test]
    fn arden_rule() {
        let (env, goals) = arden();
        let out = prove_upto(&env, &goals, &Combinators::rfl_ctx(), &Bounds::default(), &registry()).unwrap();
        let Outcome::Proof(proof) = out else { panic!("{out:?}") };
        assert_eq!(proof.relation.len(), 1);
        assert_eq!(proof.relation.pairs()[0], (p("L"), p("K*M")));
        let report = recheck(&proof.to_json(), &registry()).unwrap();
        assert_eq!(report, RecheckReport { pairs: 1, successor_checks: 2, derivations: 2 });
    }

    #[test]
    fn arden_bstep() {
        let (mut env, _) = arden();
        let ((l, r), succ) = bstep(&mut env, &p("KL + M"), &p("K*M")).unwrap();
        assert_eq!(l, r);
        assert_eq!(succ[0], (p("K_a·L + M_a"), p("K_a·K*·M + M_a")));
    }

    #[test]
    fn arden_needs_ctx() {
        let (env, goals) = arden();
        let c = Combinators { rfl: true, ..Default::default() };
        let out = prove_upto(&env, &goals, &c, &Bounds { max_pairs: 20, max_depth: 64 }, &registry()).unwrap();
        assert!(!matches!(out, Outcome::Proof(_)));
    }

    #[test]
    fn regex_identity() {
        let env = Env::new(&['a', 'b']);
        let goals = vec![(p("(a + b)*"), p("(a*b*)*"))];
        let out = prove_upto(&env, &goals, &Combinators::rfl_ctx(), &Bounds::default(), &registry()).unwrap();
        let Outcome::Proof(proof) = out else { panic!("{out:?}") };
        assert!(recheck(&proof.to_json(), &registry()).is_ok());
    }

    #[test]
    fn empty_word_counterexample() {
        let env = Env::new(&['a', 'b']);
        let goals = vec![(p("a*"), p("a·a*"))];
        let out = prove_upto(&env, &goals, &Combinators::rfl_ctx(), &Bounds::default(), &registry()).unwrap();
        let Outcome::Counterexample(cx) = out else { panic!("{out:?}") };
        assert_eq!(cx.word, "");
        assert!(cx.lhs_accepts);
        assert!(cx.replays(&env, &goals).unwrap());
    }

    #[test]
    fn longer_counterexample() {
        let env = Env::new(&['a', 'b']);
        let goals = vec![(p("(ab)*"), p("(ab)*·(1 + ab·b)"))];
        let out = prove_upto(&env, &goals, &Combinators::rfl_ctx(), &Bounds::default(), &registry()).unwrap();
        let Outcome::Counterexample(cx) = out else { panic!("{out:?}") };
        assert_eq!(cx.word, "abb");
        assert!(!cx.lhs_accepts);
        assert!(cx.replays(&env, &goals).unwrap());
    }

    #[test]
    fn symbolic_counterexample_reports_valuation() {
        let env = Env::new(&['a']).with_atom("K", AtomFlag::Symbolic);
        let goals = vec![(p("K"), p("K + 1"))];
        let out = prove_upto(&env, &goals, &Combinators::rfl_ctx(), &Bounds::default(), &registry_a()).unwrap();
        let Outcome::Counterexample(cx) = out else { panic!("{out:?}") };
        assert_eq!(cx.valuation, vec![("K".to_string(), false)]);
        assert!(cx.replays(&env, &goals).unwrap());
    }

    fn registry_a() -> Registry {
        Registry::language_builtins(&['a'])
    }

    #[test]
    fn unregistered_context_is_refused() {
        let (env, goals) = arden();
        let err = prove_upto(&env, &goals, &Combinators::rfl_ctx(), &Bounds::default(), &Registry::new()).unwrap_err();
        assert!(matches!(err, BisimError::Refused { .. }));
        let err = prove_upto(&env, &goals, &Combinators::rfl_ctx(), &Bounds::default(), &registry_a()).unwrap_err();
        assert!(matches!(err, BisimError::Refused { .. }));
    }

    #[test]
    fn bounds_give_unknown() {
        let env = Env::new(&['a', 'b']);
        let goals = vec![(p("(a + b)*"), p("(a*b*)*"))];
        let out = prove_upto(&env, &goals, &Combinators::rfl_ctx(), &Bounds { max_pairs: 1, max_depth: 64 }, &registry()).unwrap();
        assert!(matches!(out, Outcome::Unknown { relation_size: 1, .. }));
    }

    #[test]
    fn tampered_proof_is_rejected() {
        let (env, goals) = arden();
        let Outcome::Proof(proof) = prove_upto(&env, &goals, &Combinators::rfl_ctx(), &Bounds::default(), &registry()).unwrap()
        else {
            panic!()
        };
        let mut v = proof.to_json();
        v["relation"] = json!([["L", "M"]]);
        assert!(recheck(&v, &registry()).is_err());
        let mut v = proof.to_json();
        v["atoms"]["K"] = json!("symbolic");
        assert!(recheck(&v, &registry()).is_err());
    }
}
