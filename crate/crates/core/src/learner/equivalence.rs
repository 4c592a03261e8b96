//! Sampled equivalence checks, run synchronously against an oracle.
//!
//! [`super::PacLearner`] performs the same steps one query at a time; these
//! are the straight-line versions used by tests and library callers.

use rand::RngCore;

use crate::algebra::{ClosureResult, HornFormula, Implication};
use crate::bitset::AttributeSet;
use crate::error::same_width;
use crate::oracle::{is_member, ImplicationOracle, OracleAnswer, OracleError};

use super::{random_subset, sample_count, LearnerError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceVerdict {
    ApproximatelyEquivalent,
    Counterexample(AttributeSet),
}

fn check_width<O: ImplicationOracle + ?Sized>(
    h: &HornFormula,
    oracle: &O,
) -> Result<(), LearnerError> {
    same_width(oracle.width(), h.width()).map_err(|e| LearnerError::Oracle(OracleError::Core(e)))
}

/// Looks for a sample on which `h` and the domain envelope disagree.
pub fn is_approximately_equivalent<O, R>(
    h: &HornFormula,
    oracle: &mut O,
    epsilon: f64,
    delta: f64,
    i: u64,
    rng: &mut R,
) -> Result<EquivalenceVerdict, LearnerError>
where
    O: ImplicationOracle + ?Sized,
    R: RngCore + ?Sized,
{
    check_width(h, oracle)?;
    for _ in 0..sample_count(epsilon, delta, i)? {
        let x = random_subset(rng, h.width());
        if h.is_model(&x) != is_member(&x, oracle)? {
            return Ok(EquivalenceVerdict::Counterexample(x));
        }
    }
    Ok(EquivalenceVerdict::ApproximatelyEquivalent)
}

/// Like [`is_approximately_equivalent`], but a sample `X` passes only if
/// `X → H(X)` holds in the domain and `H(X)` is itself a domain model.
pub fn is_strongly_approximately_equivalent<O, R>(
    h: &HornFormula,
    oracle: &mut O,
    epsilon: f64,
    delta: f64,
    i: u64,
    rng: &mut R,
) -> Result<EquivalenceVerdict, LearnerError>
where
    O: ImplicationOracle + ?Sized,
    R: RngCore + ?Sized,
{
    check_width(h, oracle)?;
    let width = h.width();
    for _ in 0..sample_count(epsilon, delta, i)? {
        let x = random_subset(rng, width);
        let y = h.closure_of(&x);
        let query = Implication {
            premise: x,
            conclusion: y.clone(),
        };
        if let OracleAnswer::Counterexample(c) = oracle.ask(&query)? {
            return Ok(EquivalenceVerdict::Counterexample(c));
        }
        match y {
            ClosureResult::Closed(y) => {
                if !is_member(&y, oracle)? {
                    return Ok(EquivalenceVerdict::Counterexample(y));
                }
            }
            ClosureResult::Bottom => {
                let full = AttributeSet::full(width);
                if !oracle.ask_restricted(&Implication::to_bottom(full.clone()))? {
                    return Ok(EquivalenceVerdict::Counterexample(full));
                }
            }
        }
    }
    Ok(EquivalenceVerdict::ApproximatelyEquivalent)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::AssignmentFamily;
    use crate::exact::dg_basis;
    use crate::oracle::DatasetOracle;
    use crate::rng::session_rng;

    fn oracle(width: usize, rows: &[u64]) -> DatasetOracle {
        DatasetOracle::new(Arc::new(AssignmentFamily::from_bits(width, rows)))
    }

    #[test]
    fn plain_finds_nonmember_model() {
        // v = {∅} over {a}: {a} models ∅ but is not in the envelope
        let mut o = oracle(1, &[0]);
        let h = HornFormula::new(1);
        let mut rng = session_rng(0);
        let verdict = is_approximately_equivalent(&h, &mut o, 0.1, 0.1, 1, &mut rng).unwrap();
        assert_eq!(
            verdict,
            EquivalenceVerdict::Counterexample(AttributeSet::full(1))
        );
    }

    #[test]
    fn one_sample_when_epsilon_and_delta_are_one() {
        let mut o = oracle(2, &[0, 1, 2, 3]);
        let h = HornFormula::new(2);
        let mut rng = session_rng(5);
        let verdict = is_approximately_equivalent(&h, &mut o, 1.0, 1.0, 1, &mut rng).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::ApproximatelyEquivalent);
        let mut twin = session_rng(5);
        twin.next_u64();
        assert_eq!(rng.next_u64(), twin.next_u64());
    }

    #[test]
    fn envelope_passes_both_checks() {
        let rows = [0b0011, 0b0110, 0b1100, 0b0001];
        let v = AssignmentFamily::from_bits(4, &rows);
        let h = dg_basis(&v, None).unwrap();
        let mut rng = session_rng(11);
        for i in 1..4 {
            let mut o = oracle(4, &rows);
            assert_eq!(
                is_approximately_equivalent(&h, &mut o, 0.2, 0.2, i, &mut rng).unwrap(),
                EquivalenceVerdict::ApproximatelyEquivalent
            );
            assert_eq!(
                is_strongly_approximately_equivalent(&h, &mut o, 0.2, 0.2, i, &mut rng).unwrap(),
                EquivalenceVerdict::ApproximatelyEquivalent
            );
        }
    }

    /// Width-2 samples until `pick` is drawn first.
    fn seed_drawing(width: usize, pick: u64) -> u64 {
        (0..)
            .find(|&s| random_subset(&mut session_rng(s), width).to_bits() == pick)
            .unwrap()
    }

    #[test]
    fn strong_negative_counterexample() {
        // h = ∅, v = {{a, b}}, X = {a}
        let mut o = oracle(2, &[0b11]);
        let mut rng = session_rng(seed_drawing(2, 0b01));
        let h = HornFormula::new(2);
        let v = is_strongly_approximately_equivalent(&h, &mut o, 1.0, 1.0, 1, &mut rng).unwrap();
        assert_eq!(
            v,
            EquivalenceVerdict::Counterexample(AttributeSet::from_bits(2, 0b01))
        );
    }

    #[test]
    fn strong_positive_counterexample() {
        // h = {a → b}, v = {{a}}, X = {a}
        let mut o = oracle(2, &[0b01]);
        let mut rng = session_rng(seed_drawing(2, 0b01));
        let a = AttributeSet::from_bits(2, 0b01);
        let h = HornFormula::from_implications(
            2,
            [Implication::to_set(a.clone(), AttributeSet::from_bits(2, 0b10)).unwrap()],
        )
        .unwrap();
        let v = is_strongly_approximately_equivalent(&h, &mut o, 1.0, 1.0, 1, &mut rng).unwrap();
        assert_eq!(v, EquivalenceVerdict::Counterexample(a));
    }
}
