//! Causal operations on behaviors, corecursive equation solving by prefixes,
//! bisimulation up to context, and companions of monotone functions on finite lattices.

pub mod behavior;
pub mod bisim;
pub mod causal;
pub mod corecursion;
pub mod error;
pub mod lattice;
pub mod value;

pub use behavior::{Approximant, BehaviorSignature, LazyBehavior};
pub use causal::{CausalOperation, CheckConfig, Registry};
pub use corecursion::{Bindings, EquationSystem, PrefixSolution, Term};
pub use error::{BehaviorError, BisimError, CausalError, LatticeError, SolveError};
pub use value::Value;
