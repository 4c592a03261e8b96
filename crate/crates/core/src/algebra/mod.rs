//! Implications, Horn formulas, datasets, and the closure algebra over them.
//!
//! Falsum is represented by [`ClosureResult::Bottom`], which behaves as the
//! absorbing top element `Φ ∪ {⊥}`: every attribute set is a subset of it and
//! intersecting it with a set `A` yields `A`.

mod closure;
mod family;
mod formula;

pub use closure::{is_pseudo_closed, ClosureFn, ClosureOperator, ClosureResult};
pub use family::{intersection_closure, AssignmentFamily, Validity};
pub use formula::{entails, forward_closure, models, HornFormula, Implication};
