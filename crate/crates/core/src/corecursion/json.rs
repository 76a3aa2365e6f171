//! JSON form of equation systems.
//!
//! ```text
//! {"signature": "stream" | "stream2" | "maybe" | {"detaut": "ab"},
//!  "oracles": ["s", …],
//!  "equations": {"x": {"tag": "cons", "params": 0, "out": <expr>, "kids": [<term>, …]}}}
//! term:  {"var": "x", "args": [<ref>…]} | {"oracle": <ref>} | {"op": "plus", "args": [<term>…]} | {"seq": [<term>…]}
//! ref:   "s" | {"param": 0} | {"child": <ref>, "index": 0}
//! expr:  3 | true | null | {"num": 1, "den": 2} | {"head": <ref>} | {"add": [e, e]} | {"sub": [e, e]}
//!        | {"mul": [e, e]} | {"and": [e, e]} | {"or": [e, e]} | {"neg": e} | {"not": e}
//! ```

use std::sync::Arc;

use serde_json::{json, Value as Json};

use super::{Equation, EquationSystem, OracleRef, OutExpr, Term};
use crate::behavior::BehaviorSignature;
use crate::error::SolveError;
use crate::value::{Value, ValueSort};

fn bad(what: &str, v: &Json) -> SolveError {
    SolveError::IllFormed { var: "<json>".into(), msg: format!("malformed {what}: {v}") }
}

pub fn signature_from_json(v: &Json) -> Result<Arc<BehaviorSignature>, SolveError> {
    match v {
        Json::String(s) if s == "stream" => Ok(BehaviorSignature::rational_stream()),
        Json::String(s) if s == "stream2" => Ok(BehaviorSignature::pair_stream()),
        Json::String(s) if s == "maybe" => Ok(BehaviorSignature::maybe()),
        _ => match v.get("detaut").and_then(Json::as_str) {
            Some(ab) if !ab.is_empty() => Ok(BehaviorSignature::detaut(&ab.chars().collect::<Vec<_>>())),
            _ => Err(bad("signature", v)),
        },
    }
}

pub fn signature_to_json(sig: &BehaviorSignature) -> Json {
    match sig.name() {
        "stream" | "stream2" | "maybe" => json!(sig.name()),
        _ => json!({ "detaut": sig.alphabet().iter().collect::<String>() }),
    }
}

fn ref_from_json(v: &Json) -> Result<OracleRef, SolveError> {
    if let Some(s) = v.as_str() {
        return Ok(OracleRef::Named(s.into()));
    }
    if let Some(k) = v.get("param").and_then(Json::as_u64) {
        return Ok(OracleRef::Param(k as usize));
    }
    match (v.get("child"), v.get("index").and_then(Json::as_u64)) {
        (Some(inner), Some(k)) => Ok(ref_from_json(inner)?.child(k as usize)),
        _ => Err(bad("oracle reference", v)),
    }
}

fn ref_to_json(r: &OracleRef) -> Json {
    match r {
        OracleRef::Named(n) => json!(n),
        OracleRef::Param(k) => json!({ "param": k }),
        OracleRef::Child(inner, k) => json!({ "child": ref_to_json(inner), "index": k }),
    }
}

fn pair(v: &Json, key: &str) -> Result<Option<(OutExpr, OutExpr)>, SolveError> {
    match v.get(key) {
        None => Ok(None),
        Some(Json::Array(xs)) if xs.len() == 2 => Ok(Some((out_from_json(&xs[0])?, out_from_json(&xs[1])?))),
        Some(_) => Err(bad(key, v)),
    }
}

fn out_from_json(v: &Json) -> Result<OutExpr, SolveError> {
    match v {
        Json::Null => return Ok(OutExpr::Lit(Value::Unit)),
        Json::Bool(b) => return Ok(OutExpr::Lit(Value::Bool(*b))),
        Json::Number(n) => return n.as_i64().map(OutExpr::int).ok_or_else(|| bad("integer literal", v)),
        _ => {}
    }
    if v.get("num").is_some() {
        return Value::from_json(&ValueSort::Rational, v).map(OutExpr::Lit).map_err(|_| bad("rational", v));
    }
    if let Some(r) = v.get("head") {
        return Ok(OutExpr::Head(ref_from_json(r)?));
    }
    let boxed = |(a, b): (OutExpr, OutExpr)| (Box::new(a), Box::new(b));
    if let Some(p) = pair(v, "add")? {
        let (a, b) = boxed(p);
        return Ok(OutExpr::Add(a, b));
    }
    if let Some(p) = pair(v, "sub")? {
        let (a, b) = boxed(p);
        return Ok(OutExpr::Sub(a, b));
    }
    if let Some(p) = pair(v, "mul")? {
        let (a, b) = boxed(p);
        return Ok(OutExpr::Mul(a, b));
    }
    if let Some(p) = pair(v, "and")? {
        let (a, b) = boxed(p);
        return Ok(OutExpr::And(a, b));
    }
    if let Some(p) = pair(v, "or")? {
        let (a, b) = boxed(p);
        return Ok(OutExpr::Or(a, b));
    }
    if let Some(a) = v.get("neg") {
        return Ok(OutExpr::Neg(Box::new(out_from_json(a)?)));
    }
    if let Some(a) = v.get("not") {
        return Ok(OutExpr::Not(Box::new(out_from_json(a)?)));
    }
    Err(bad("output expression", v))
}

fn out_to_json(e: &OutExpr) -> Json {
    let two = |k: &str, a: &OutExpr, b: &OutExpr| json!({ k: [out_to_json(a), out_to_json(b)] });
    match e {
        OutExpr::Lit(Value::Rat(r)) if r.is_integer() => Value::Rat(r.clone()).to_json()["num"].clone(),
        OutExpr::Lit(v) => v.to_json(),
        OutExpr::Head(r) => json!({ "head": ref_to_json(r) }),
        OutExpr::Add(a, b) => two("add", a, b),
        OutExpr::Sub(a, b) => two("sub", a, b),
        OutExpr::Mul(a, b) => two("mul", a, b),
        OutExpr::And(a, b) => two("and", a, b),
        OutExpr::Or(a, b) => two("or", a, b),
        OutExpr::Neg(a) => json!({ "neg": out_to_json(a) }),
        OutExpr::Not(a) => json!({ "not": out_to_json(a) }),
    }
}

fn term_from_json(v: &Json) -> Result<Term, SolveError> {
    let list = |k: &str| -> Result<Vec<Term>, SolveError> {
        match v.get(k) {
            None => Ok(vec![]),
            Some(Json::Array(xs)) => xs.iter().map(term_from_json).collect(),
            Some(_) => Err(bad(k, v)),
        }
    };
    if let Some(name) = v.get("var").and_then(Json::as_str) {
        let args = match v.get("args") {
            None => vec![],
            Some(Json::Array(xs)) => xs.iter().map(ref_from_json).collect::<Result<_, _>>()?,
            Some(_) => return Err(bad("variable arguments", v)),
        };
        return Ok(Term::Var { name: name.into(), args });
    }
    if let Some(r) = v.get("oracle") {
        return Ok(Term::Oracle(ref_from_json(r)?));
    }
    if let Some(s) = v.get("op").and_then(Json::as_str) {
        return Ok(Term::Op { symbol: s.into(), args: list("args")? });
    }
    if v.get("seq").is_some() {
        return Ok(Term::Seq(list("seq")?));
    }
    Err(bad("term", v))
}

fn term_to_json(t: &Term) -> Json {
    match t {
        Term::Var { name, args } if args.is_empty() => json!({ "var": name }),
        Term::Var { name, args } => json!({ "var": name, "args": args.iter().map(ref_to_json).collect::<Vec<_>>() }),
        Term::Oracle(r) => json!({ "oracle": ref_to_json(r) }),
        Term::Op { symbol, args } => json!({ "op": symbol, "args": args.iter().map(term_to_json).collect::<Vec<_>>() }),
        Term::Seq(ts) => json!({ "seq": ts.iter().map(term_to_json).collect::<Vec<_>>() }),
        Term::Const(b) => json!({ "const": b.produce(4).render(b.signature()) }),
    }
}

impl EquationSystem {
    pub fn from_json(v: &Json) -> Result<Self, SolveError> {
        let signature = signature_from_json(v.get("signature").ok_or_else(|| bad("system", v))?)?;
        let mut sys = EquationSystem::new(signature);
        if let Some(os) = v.get("oracles") {
            for o in os.as_array().ok_or_else(|| bad("oracles", os))? {
                sys.oracles.push(o.as_str().ok_or_else(|| bad("oracle name", o))?.into());
            }
        }
        let eqs = v.get("equations").and_then(Json::as_object).ok_or_else(|| bad("equations", v))?;
        for (var, e) in eqs {
            let tag = e.get("tag").and_then(Json::as_str).ok_or_else(|| bad("equation", e))?;
            let out = out_from_json(e.get("out").unwrap_or(&Json::Null))?;
            let kids = match e.get("kids") {
                None => vec![],
                Some(Json::Array(xs)) => xs.iter().map(term_from_json).collect::<Result<_, _>>()?,
                Some(k) => return Err(bad("kids", k)),
            };
            let params = e.get("params").and_then(Json::as_u64).unwrap_or(0) as usize;
            sys.equations.insert(var.clone(), Equation { params, tag: tag.into(), out, kids });
        }
        Ok(sys)
    }

    pub fn to_json(&self) -> Json {
        let eqs: serde_json::Map<String, Json> = self
            .equations
            .iter()
            .map(|(x, e)| {
                (
                    x.clone(),
                    json!({
                        "tag": e.tag,
                        "params": e.params,
                        "out": out_to_json(&e.out),
                        "kids": e.kids.iter().map(term_to_json).collect::<Vec<_>>(),
                    }),
                )
            })
            .collect();
        json!({
            "signature": signature_to_json(&self.signature),
            "oracles": self.oracles,
            "equations": eqs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_parameterized_system() {
        let v = json!({
            "signature": "stream",
            "oracles": ["s", "t"],
            "equations": {
                "z": {"tag": "cons", "params": 2,
                      "out": {"mul": [{"head": {"param": 0}}, {"head": {"param": 1}}]},
                      "kids": [{"op": "plus", "args": [
                          {"var": "z", "args": [{"param": 0}, {"child": {"param": 1}, "index": 0}]},
                          {"var": "z", "args": [{"child": {"param": 0}, "index": 0}, {"param": 1}]}]}]}
            }
        });
        let sys = EquationSystem::from_json(&v).unwrap();
        assert_eq!(sys.equations["z"].params, 2);
        assert_eq!(sys.to_json(), v);
    }

    #[test]
    fn rejects_unknown_signature() {
        assert!(EquationSystem::from_json(&json!({"signature": "tree", "equations": {}})).is_err());
    }
}
