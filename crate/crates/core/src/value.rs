//! Output data carried by behavior constructors.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::error::BehaviorError;

/// A value sort: the set `O_c` a constructor draws its output from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValueSort {
    Unit,
    Bool,
    Rational,
    /// Opt-in floating point, for demos only. Not exact.
    Float,
    Tuple(Vec<ValueSort>),
}

/// `f64` with total equality and ordering (bitwise), so values can be hashed.
#[derive(Clone, Copy, Debug)]
pub struct Float(pub f64);

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}
impl Eq for Float {}
impl Hash for Float {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}
impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Float {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Unit,
    Bool(bool),
    Rat(BigRational),
    Float(Float),
    Tuple(Vec<Value>),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Value {
        Value::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Value {
        Value::Rat(BigRational::zero())
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match self {
            Value::Rat(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn belongs_to(&self, sort: &ValueSort) -> bool {
        match (self, sort) {
            (Value::Unit, ValueSort::Unit)
            | (Value::Bool(_), ValueSort::Bool)
            | (Value::Rat(_), ValueSort::Rational)
            | (Value::Float(_), ValueSort::Float) => true,
            (Value::Tuple(vs), ValueSort::Tuple(ss)) => {
                vs.len() == ss.len() && vs.iter().zip(ss).all(|(v, s)| v.belongs_to(s))
            }
            _ => false,
        }
    }

    /// Canonical JSON encoding; rationals are `{"num":…,"den":…}` in lowest terms.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Unit => serde_json::Value::Null,
            Value::Bool(b) => json!(b),
            Value::Rat(r) => json!({"num": bigint_json(r.numer()), "den": bigint_json(r.denom())}),
            Value::Float(f) => json!(f.0),
            Value::Tuple(vs) => serde_json::Value::Array(vs.iter().map(Value::to_json).collect()),
        }
    }

    pub fn from_json(sort: &ValueSort, v: &serde_json::Value) -> Result<Value, BehaviorError> {
        let bad = || BehaviorError::Json(format!("value {v} does not fit sort {sort:?}"));
        match sort {
            ValueSort::Unit if v.is_null() => Ok(Value::Unit),
            ValueSort::Bool => v.as_bool().map(Value::Bool).ok_or_else(bad),
            ValueSort::Float => v.as_f64().map(|f| Value::Float(Float(f))).ok_or_else(bad),
            ValueSort::Rational => {
                let num = v.get("num").and_then(json_bigint).ok_or_else(bad)?;
                let den = v.get("den").and_then(json_bigint).ok_or_else(bad)?;
                if !den.is_positive() {
                    return Err(BehaviorError::Json("rational denominator must be positive".into()));
                }
                let r = BigRational::new_raw(num, den);
                let reduced = r.clone().reduced();
                if reduced.numer() != r.numer() || reduced.denom() != r.denom() {
                    return Err(BehaviorError::Json("rational not in lowest terms".into()));
                }
                Ok(Value::Rat(r))
            }
            ValueSort::Tuple(ss) => {
                let items = v.as_array().ok_or_else(bad)?;
                if items.len() != ss.len() {
                    return Err(bad());
                }
                items
                    .iter()
                    .zip(ss)
                    .map(|(item, s)| Value::from_json(s, item))
                    .collect::<Result<_, _>>()
                    .map(Value::Tuple)
            }
            _ => Err(bad()),
        }
    }

    /// Default element of a sort, used to pad behaviors beyond sampled prefixes.
    pub fn default_of(sort: &ValueSort) -> Value {
        match sort {
            ValueSort::Unit => Value::Unit,
            ValueSort::Bool => Value::Bool(false),
            ValueSort::Rational => Value::zero(),
            ValueSort::Float => Value::Float(Float(0.0)),
            ValueSort::Tuple(ss) => Value::Tuple(ss.iter().map(Value::default_of).collect()),
        }
    }
}

impl ValueSort {
    /// All values of a finite sort, or `None` for infinite sorts.
    pub fn enumerate(&self) -> Option<Vec<Value>> {
        match self {
            ValueSort::Unit => Some(vec![Value::Unit]),
            ValueSort::Bool => Some(vec![Value::Bool(false), Value::Bool(true)]),
            ValueSort::Rational | ValueSort::Float => None,
            ValueSort::Tuple(ss) => {
                let mut acc: Vec<Vec<Value>> = vec![vec![]];
                for s in ss {
                    let vals = s.enumerate()?;
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            vals.iter().map(move |v| {
                                let mut p = prefix.clone();
                                p.push(v.clone());
                                p
                            })
                        })
                        .collect();
                }
                Some(acc.into_iter().map(Value::Tuple).collect())
            }
        }
    }
}

fn bigint_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(i) => json!(i),
        None => json!(n.to_string()),
    }
}

fn json_bigint(v: &serde_json::Value) -> Option<BigInt> {
    if let Some(i) = v.as_i64() {
        return Some(BigInt::from(i));
    }
    v.as_str()?.parse().ok()
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "()"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Rat(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Value::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Float(x) => write!(f, "{}", x.0),
            Value::Tuple(vs) => {
                write!(f, "(")?;
                for (k, v) in vs.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_json_is_reduced() {
        let v = Value::ratio(6, -4);
        assert_eq!(v.to_json(), json!({"num": -3, "den": 2}));
        assert_eq!(Value::from_json(&ValueSort::Rational, &v.to_json()).unwrap(), v);
    }

    #[test]
    fn rejects_unreduced_rational() {
        let err = Value::from_json(&ValueSort::Rational, &json!({"num": 2, "den": 4}));
        assert!(err.is_err());
        let err = Value::from_json(&ValueSort::Rational, &json!({"num": 1, "den": -4}));
        assert!(err.is_err());
    }

    #[test]
    fn finite_sorts_enumerate() {
        let s = ValueSort::Tuple(vec![ValueSort::Bool, ValueSort::Bool, ValueSort::Unit]);
        assert_eq!(s.enumerate().unwrap().len(), 4);
        assert!(ValueSort::Rational.enumerate().is_none());
    }
}
