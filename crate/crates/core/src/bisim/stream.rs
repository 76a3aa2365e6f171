//! Depth-bounded equality of stream terms.

use serde_json::{json, Value as Json};

use crate::causal::Registry;
use crate::corecursion::{Bindings, EquationSystem, PrefixSolution, Term};
use crate::error::BisimError;
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StreamEq {
    Equal { depth: usize },
    Counterexample { position: usize, lhs: Value, rhs: Value },
}

impl StreamEq {
    pub fn to_json(&self) -> Json {
        match self {
            StreamEq::Equal { depth } => json!({"verdict": "equal", "depth": depth}),
            StreamEq::Counterexample { position, lhs, rhs } => json!({
                "verdict": "counterexample",
                "position": position,
                "lhs": lhs.to_json(),
                "rhs": rhs.to_json(),
            }),
        }
    }
}

/// Compare two closed terms over `system`'s variables, registered operations and
/// bound oracles on their first `n` outputs.
pub fn stream_eq(
    system: &EquationSystem,
    registry: &Registry,
    bindings: &Bindings,
    lhs: &Term,
    rhs: &Term,
    n: usize,
) -> Result<StreamEq, BisimError> {
    let mut sol = PrefixSolution::new(system.clone(), registry.clone(), bindings.clone())?;
    let a = sol.solve_term(lhs, n)?.values();
    let b = sol.solve_term(rhs, n)?.values();
    for (k, (x, y)) in a.iter().zip(&b).enumerate() {
        if x != y {
            return Ok(StreamEq::Counterexample { position: k, lhs: x.clone(), rhs: y.clone() });
        }
    }
    Ok(StreamEq::Equal { depth: n })
}
