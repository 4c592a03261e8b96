//! Exact learning of a Horn target from equivalence and membership oracles.

use crate::algebra::HornFormula;
use crate::bitset::AttributeSet;

use super::{refine_negative, refine_positive, LearnerError};

/// Runs Horn1 until `equivalent` reports no counterexample.
///
/// `equivalent(h)` returns an assignment on which `h` and the target differ;
/// `member(x)` says whether `x` is a model of the target.
pub fn horn1(
    width: usize,
    equivalent: impl FnMut(&HornFormula) -> Option<AttributeSet>,
    member: impl FnMut(&AttributeSet) -> bool,
    max_counterexamples: Option<u64>,
) -> Result<HornFormula, LearnerError> {
    horn1_observed(width, equivalent, member, max_counterexamples, |_| {})
}

/// [`horn1`] calling `observe` on the hypothesis before every equivalence query.
pub fn horn1_observed(
    width: usize,
    mut equivalent: impl FnMut(&HornFormula) -> Option<AttributeSet>,
    mut member: impl FnMut(&AttributeSet) -> bool,
    max_counterexamples: Option<u64>,
    mut observe: impl FnMut(&HornFormula),
) -> Result<HornFormula, LearnerError> {
    let mut h = HornFormula::new(width);
    let mut seen = 0u64;
    loop {
        observe(&h);
        let Some(x) = equivalent(&h) else {
            return Ok(h);
        };
        if max_counterexamples.is_some_and(|cap| seen >= cap) {
            return Err(LearnerError::CounterexampleCap(seen));
        }
        seen += 1;
        if h.is_model(&x) {
            refine_negative(&mut h, &x, &mut member);
        } else {
            refine_positive(&mut h, &x);
        }
    }
}
