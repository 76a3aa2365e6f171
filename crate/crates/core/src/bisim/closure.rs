//! Up-to closures of a relation and their derivation trees.

use std::collections::HashSet;
use std::fmt;

use super::LangExpr;
use crate::error::BisimError;

/// Which closure rules may be used when discharging a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Combinators {
    pub rfl: bool,
    pub sym: bool,
    pub ctx_sum: bool,
    pub ctx_cat: bool,
    pub ctx_star: bool,
    /// Nesting bound for transitivity; `0` disables it.
    pub trn: usize,
}

impl Combinators {
    /// `ctx ∘ rfl`.
    pub fn rfl_ctx() -> Self {
        Combinators { rfl: true, ctx_sum: true, ctx_cat: true, ctx_star: true, ..Default::default() }
    }

    /// Parse a comma-separated list: `rfl`, `sym`, `ctx`, `ctx(+)`, `ctx(·)`, `ctx(*)`, `trn`, `trn(k)`.
    pub fn parse(s: &str) -> Result<Self, BisimError> {
        let mut c = Combinators::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item {
                "rfl" => c.rfl = true,
                "sym" => c.sym = true,
                "ctx" => {
                    c.ctx_sum = true;
                    c.ctx_cat = true;
                    c.ctx_star = true;
                }
                "ctx(+)" => c.ctx_sum = true,
                "ctx(·)" | "ctx(.)" => c.ctx_cat = true,
                "ctx(*)" => c.ctx_star = true,
                "trn" => c.trn = 2,
                _ => match item.strip_prefix("trn(").and_then(|r| r.strip_suffix(')')).and_then(|k| k.parse().ok()) {
                    Some(k) => c.trn = k,
                    None => {
                        return Err(BisimError::Refused {
                            combinator: item.into(),
                            reason: "unknown combinator".into(),
                        })
                    }
                },
            }
        }
        Ok(c)
    }

    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.rfl {
            out.push("rfl".to_string());
        }
        if self.sym {
            out.push("sym".into());
        }
        if self.ctx_sum {
            out.push("ctx(+)".into());
        }
        if self.ctx_cat {
            out.push("ctx(·)".into());
        }
        if self.ctx_star {
            out.push("ctx(*)".into());
        }
        if self.trn > 0 {
            out.push(format!("trn({})", self.trn));
        }
        out
    }

    /// Context combinators in use with the language operation each one closes under.
    pub fn context_ops(&self) -> Vec<(&'static str, &'static str)> {
        let mut out = Vec::new();
        if self.ctx_sum {
            out.push(("ctx(+)", "union"));
        }
        if self.ctx_cat {
            out.push(("ctx(·)", "concat"));
        }
        if self.ctx_star {
            out.push(("ctx(*)", "star"));
        }
        out
    }
}

pub type Pair = (LangExpr, LangExpr);

/// A finite relation, kept in insertion order.
#[derive(Clone, Debug, Default)]
pub struct Relation {
    pairs: Vec<Pair>,
    set: HashSet<Pair>,
}

impl Relation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, lhs: LangExpr, rhs: LangExpr) -> bool {
        let p = (lhs, rhs);
        if self.set.contains(&p) {
            return false;
        }
        self.set.insert(p.clone());
        self.pairs.push(p);
        true
    }

    pub fn contains(&self, lhs: &LangExpr, rhs: &LangExpr) -> bool {
        self.set.contains(&(lhs.clone(), rhs.clone()))
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl FromIterator<Pair> for Relation {
    fn from_iter<T: IntoIterator<Item = Pair>>(iter: T) -> Self {
        let mut r = Relation::new();
        for (a, b) in iter {
            r.insert(a, b);
        }
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// The pair is in the relation.
    Hyp,
    /// The reversed pair is in the relation.
    HypSym,
    Rfl,
    /// Every summand on each side is related to some summand on the other.
    Sum,
    Cat,
    Star,
    Trn,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Hyp => "hyp",
            Rule::HypSym => "hyp-sym",
            Rule::Rfl => "rfl",
            Rule::Sum => "ctx(+)",
            Rule::Cat => "ctx(·)",
            Rule::Star => "ctx(*)",
            Rule::Trn => "trn",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        [Rule::Hyp, Rule::HypSym, Rule::Rfl, Rule::Sum, Rule::Cat, Rule::Star, Rule::Trn]
            .into_iter()
            .find(|r| r.name() == s)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a pair belongs to the closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub lhs: LangExpr,
    pub rhs: LangExpr,
    pub rule: Rule,
    pub children: Vec<Derivation>,
}

impl Derivation {
    fn leaf(lhs: &LangExpr, rhs: &LangExpr, rule: Rule) -> Self {
        Derivation { lhs: lhs.clone(), rhs: rhs.clone(), rule, children: vec![] }
    }

    /// Check every node of the tree against `r` and `c`.
    pub fn verify(&self, r: &Relation, c: &Combinators) -> Result<(), String> {
        let bad = |why: &str| Err(format!("{} for ({}, {}): {why}", self.rule, self.lhs, self.rhs));
        let kids = &self.children;
        match self.rule {
            Rule::Hyp if r.contains(&self.lhs, &self.rhs) => {}
            Rule::Hyp => return bad("pair is not in the relation"),
            Rule::HypSym if c.sym && r.contains(&self.rhs, &self.lhs) => {}
            Rule::HypSym => return bad("symmetry disabled or reversed pair absent"),
            Rule::Rfl if c.rfl && self.lhs == self.rhs => {}
            Rule::Rfl => return bad("reflexivity disabled or sides differ"),
            Rule::Sum => {
                if !c.ctx_sum {
                    return bad("ctx(+) disabled");
                }
                if !matches!(self.lhs, LangExpr::Sum(_)) && !matches!(self.rhs, LangExpr::Sum(_)) {
                    return bad("neither side is a sum");
                }
                let (ls, rs) = (self.lhs.summands(), self.rhs.summands());
                if kids.iter().any(|k| !ls.contains(&k.lhs) || !rs.contains(&k.rhs)) {
                    return bad("child relates non-summands");
                }
                if ls.iter().any(|x| !kids.iter().any(|k| k.lhs == *x)) || rs.iter().any(|y| !kids.iter().any(|k| k.rhs == *y)) {
                    return bad("some summand is unmatched");
                }
            }
            Rule::Cat => match (&self.lhs, &self.rhs, kids.as_slice()) {
                (LangExpr::Cat(a1, b1), LangExpr::Cat(a2, b2), [k1, k2])
                    if c.ctx_cat && k1.lhs == **a1 && k1.rhs == **a2 && k2.lhs == **b1 && k2.rhs == **b2 => {}
                _ => return bad("not a concatenation congruence"),
            },
            Rule::Star => match (&self.lhs, &self.rhs, kids.as_slice()) {
                (LangExpr::Star(a), LangExpr::Star(b), [k]) if c.ctx_star && k.lhs == **a && k.rhs == **b => {}
                _ => return bad("not a star congruence"),
            },
            Rule::Trn => match kids.as_slice() {
                [k1, k2] if c.trn > 0 && k1.lhs == self.lhs && k1.rhs == k2.lhs && k2.rhs == self.rhs => {}
                _ => return bad("not a transitivity step"),
            },
        }
        kids.iter().try_for_each(|k| k.verify(r, c))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "pair": [self.lhs.to_string(), self.rhs.to_string()],
            "rule": self.rule.name(),
        });
        if !self.children.is_empty() {
            v["children"] = self.children.iter().map(Derivation::to_json).collect();
        }
        v
    }
}

struct Search<'a> {
    r: &'a Relation,
    c: &'a Combinators,
    candidates: Vec<LangExpr>,
}

impl Search<'_> {
    fn closure(&self, lhs: &LangExpr, rhs: &LangExpr, trn: usize) -> Option<Derivation> {
        if self.r.contains(lhs, rhs) {
            return Some(Derivation::leaf(lhs, rhs, Rule::Hyp));
        }
        if self.c.sym && self.r.contains(rhs, lhs) {
            return Some(Derivation::leaf(lhs, rhs, Rule::HypSym));
        }
        if self.c.rfl && lhs == rhs {
            return Some(Derivation::leaf(lhs, rhs, Rule::Rfl));
        }
        let node = |rule, children| Derivation { lhs: lhs.clone(), rhs: rhs.clone(), rule, children };
        if self.c.ctx_sum && (matches!(lhs, LangExpr::Sum(_)) || matches!(rhs, LangExpr::Sum(_))) {
            if let Some(children) = self.match_summands(lhs.summands(), rhs.summands(), trn) {
                return Some(node(Rule::Sum, children));
            }
        }
        match (lhs, rhs) {
            (LangExpr::Cat(a1, b1), LangExpr::Cat(a2, b2)) if self.c.ctx_cat => {
                if let Some(k1) = self.closure(a1, a2, trn) {
                    if let Some(k2) = self.closure(b1, b2, trn) {
                        return Some(node(Rule::Cat, vec![k1, k2]));
                    }
                }
            }
            (LangExpr::Star(a), LangExpr::Star(b)) if self.c.ctx_star => {
                if let Some(k) = self.closure(a, b, trn) {
                    return Some(node(Rule::Star, vec![k]));
                }
            }
            _ => {}
        }
        if trn > 0 {
            for mid in &self.candidates {
                if mid == lhs || mid == rhs {
                    continue;
                }
                if let Some(k1) = self.closure(lhs, mid, trn - 1) {
                    if let Some(k2) = self.closure(mid, rhs, trn - 1) {
                        return Some(node(Rule::Trn, vec![k1, k2]));
                    }
                }
            }
        }
        None
    }

    fn match_summands(&self, ls: &[LangExpr], rs: &[LangExpr], trn: usize) -> Option<Vec<Derivation>> {
        let mut children: Vec<Derivation> = Vec::new();
        for x in ls {
            children.push(rs.iter().find_map(|y| self.closure(x, y, trn))?);
        }
        for y in rs {
            if children.iter().any(|k| k.rhs == *y) {
                continue;
            }
            children.push(ls.iter().find_map(|x| self.closure(x, y, trn))?);
        }
        Some(children)
    }
}

/// Decide membership of `(lhs, rhs)` in the closure of `r` under `c`, returning the
/// derivation on success. Transitivity, when enabled, only tries middle terms drawn
/// from the relation and from subterms of the pair, so a negative answer means
/// "not derivable under these bounds".
pub fn in_upto_closure(lhs: &LangExpr, rhs: &LangExpr, r: &Relation, c: &Combinators) -> Option<Derivation> {
    let mut candidates = Vec::new();
    if c.trn > 0 {
        for (a, b) in r.pairs() {
            candidates.push(a.clone());
            candidates.push(b.clone());
        }
        lhs.subterms(&mut candidates);
        rhs.subterms(&mut candidates);
        candidates.sort();
        candidates.dedup();
    }
    Search { r, c, candidates }.closure(lhs, rhs, c.trn)
}
