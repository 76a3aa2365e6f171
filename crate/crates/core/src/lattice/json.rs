use serde_json::{json, Map, Value as Json};

use crate::error::LatticeError;

use super::{FiniteLattice, MonotoneFn};

/// Accepted shapes:
/// `{"powerset": n}`, `{"chain": n}`, `{"diamond": true}`, or
/// `{"elements": [..], "covers": [[lo, hi], ..]}`.
pub fn lattice_from_json(v: &Json) -> Result<FiniteLattice, LatticeError> {
    let size = |key: &str| -> Result<Option<usize>, LatticeError> {
        match v.get(key) {
            None => Ok(None),
            Some(n) => n
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| LatticeError::Input(format!("\"{key}\" must be a non-negative integer"))),
        }
    };
    if let Some(n) = size("powerset")? {
        return FiniteLattice::powerset(n);
    }
    if let Some(n) = size("chain")? {
        return FiniteLattice::chain(n);
    }
    if v.get("diamond").is_some() {
        return Ok(FiniteLattice::diamond());
    }
    let names: Vec<String> = v
        .get("elements")
        .and_then(Json::as_array)
        .ok_or_else(|| LatticeError::Input("expected \"powerset\", \"chain\", \"diamond\" or \"elements\"".into()))?
        .iter()
        .map(|e| e.as_str().map(String::from).ok_or_else(|| LatticeError::Input("element names must be strings".into())))
        .collect::<Result<_, _>>()?;
    let index = |s: &Json| -> Result<usize, LatticeError> {
        let s = s.as_str().ok_or_else(|| LatticeError::Input("cover entries must be element names".into()))?;
        names.iter().position(|n| n == s).ok_or_else(|| LatticeError::UnknownElement(s.into()))
    };
    let mut covers = Vec::new();
    for c in v.get("covers").and_then(Json::as_array).map(Vec::as_slice).unwrap_or_default() {
        match c.as_array().map(Vec::as_slice) {
            Some([lo, hi]) => covers.push((index(lo)?, index(hi)?)),
            _ => return Err(LatticeError::Input("each cover is a pair [lower, upper]".into())),
        }
    }
    FiniteLattice::from_covers(names, &covers)
}

pub fn lattice_to_json(lat: &FiniteLattice) -> Json {
    json!({
        "elements": lat.names(),
        "covers": lat.covers().iter().map(|&(a, b)| json!([lat.name(a), lat.name(b)])).collect::<Vec<_>>(),
        "top": lat.name(lat.top()),
        "bottom": lat.name(lat.bottom()),
    })
}

/// A function is an object mapping every element name to an element name.
pub fn function_from_json(lat: &FiniteLattice, v: &Json) -> Result<MonotoneFn, LatticeError> {
    let obj = v.as_object().ok_or_else(|| LatticeError::Input("a function table is an object from element to element".into()))?;
    for k in obj.keys() {
        lat.index(k)?;
    }
    let table = lat
        .elements()
        .map(|x| {
            let y = obj.get(lat.name(x)).ok_or_else(|| LatticeError::Input(format!("no value given for {}", lat.name(x))))?;
            let y = y.as_str().ok_or_else(|| LatticeError::Input("function values must be element names".into()))?;
            lat.index(y)
        })
        .collect::<Result<Vec<_>, _>>()?;
    MonotoneFn::new(lat, table)
}

pub fn function_to_json(lat: &FiniteLattice, f: &MonotoneFn) -> Json {
    let mut m = Map::new();
    for x in lat.elements() {
        m.insert(lat.name(x).to_string(), json!(lat.name(f.apply(x))));
    }
    Json::Object(m)
}
