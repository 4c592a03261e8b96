use crate::algebra::{ClosureResult, HornFormula, Implication};
use crate::bitset::AttributeSet;
use crate::oracle::{run_probe, EnvelopeClosureProbe, ImplicationOracle, OracleError};

/// Where a negative counterexample ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeRefinement {
    /// The premise at this position was shrunk.
    Replaced(usize),
    Appended,
}

/// First position at or after `from` whose premise `A` gives `A ∩ x ≠ A`,
/// with that intersection.
pub(crate) fn next_candidate(
    h: &HornFormula,
    x: &AttributeSet,
    from: usize,
) -> Option<(usize, AttributeSet)> {
    h.as_slice()
        .iter()
        .enumerate()
        .skip(from)
        .find_map(|(pos, imp)| {
            let c = imp.premise.intersection(x);
            (c != imp.premise).then_some((pos, c))
        })
}

/// Handles a negative counterexample `x` (a model of `h` outside the domain).
pub fn refine_negative(
    h: &mut HornFormula,
    x: &AttributeSet,
    mut member: impl FnMut(&AttributeSet) -> bool,
) -> NegativeRefinement {
    try_refine_negative(h, x, |c| Ok::<_, std::convert::Infallible>(member(c)))
        .unwrap_or_else(|e| match e {})
}

pub fn try_refine_negative<E>(
    h: &mut HornFormula,
    x: &AttributeSet,
    mut member: impl FnMut(&AttributeSet) -> Result<bool, E>,
) -> Result<NegativeRefinement, E> {
    let mut from = 0;
    while let Some((pos, c)) = next_candidate(h, x, from) {
        if !member(&c)? {
            h.get_mut(pos).premise = c;
            return Ok(NegativeRefinement::Replaced(pos));
        }
        from = pos + 1;
    }
    h.push(Implication::to_bottom(x.clone()))
        .expect("counterexample from the hypothesis universe");
    Ok(NegativeRefinement::Appended)
}

/// Handles a positive counterexample `x` (a domain model violating `h`):
/// every violated `A → B` becomes `A → B ∩ x`. Returns how many changed.
pub fn refine_positive(h: &mut HornFormula, x: &AttributeSet) -> usize {
    let mut changed = 0;
    for pos in 0..h.len() {
        let imp = h.get_mut(pos);
        if !imp.is_satisfied_by(x) {
            imp.conclusion = ClosureResult::Closed(imp.conclusion.intersect_set(x));
            changed += 1;
        }
    }
    changed
}

/// Negative refinement that keeps every implication valid in the domain: the
/// installed conclusion is the domain closure computed through the oracle
/// instead of the hypothesis' conclusion or `⊥`.
pub fn valid_hypothesis_refine<O: ImplicationOracle + ?Sized>(
    h: &mut HornFormula,
    x: &AttributeSet,
    oracle: &mut O,
) -> Result<NegativeRefinement, OracleError> {
    let mut from = 0;
    while let Some((pos, c)) = next_candidate(h, x, from) {
        if !crate::oracle::is_member(&c, oracle)? {
            let conclusion = run_probe(EnvelopeClosureProbe::new(c.clone()), oracle)?;
            h.get_mut(pos).premise = c;
            h.get_mut(pos).conclusion = conclusion;
            return Ok(NegativeRefinement::Replaced(pos));
        }
        from = pos + 1;
    }
    let conclusion = run_probe(EnvelopeClosureProbe::new(x.clone()), oracle)?;
    h.push(Implication {
        premise: x.clone(),
        conclusion,
    })
    .expect("counterexample from the hypothesis universe");
    Ok(NegativeRefinement::Appended)
}
