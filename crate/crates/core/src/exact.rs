//! Exact reference computations: the canonical (Duquenne–Guigues) basis,
//! characteristic models, and exhaustive approximation errors.
//!
//! Everything here is exponential in the worst case and is meant for explicit
//! data or as a test oracle for the learner.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{
    intersection_closure, AssignmentFamily, ClosureOperator, ClosureResult, HornFormula,
    Implication,
};
use crate::bitset::{all_subsets, AttributeSet};
use crate::error::{same_width, CoreError};

/// Largest universe accepted by [`brute_force_dg`].
pub const BRUTE_FORCE_LIMIT: usize = 12;
/// Largest universe accepted by the exhaustive error measures.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("budget of {budget} enumerated sets exhausted after {found} implications")]
    BudgetExceeded { budget: u64, found: usize },
}

/// Counters from a [`dg_basis`] run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BasisStats {
    /// Sets visited by the lectic traversal (closed and pseudo-closed).
    pub visited: u64,
    /// Closure computations against the implications found so far.
    pub candidate_closures: u64,
}

/// Saturates sets under a growing implication list.
///
/// Each call is a round-robin pass over the implications, where an
/// implication fires at most once, with an optional early exit once the
/// result can no longer be the next set in lectic order.
struct Saturator {
    premises: Vec<AttributeSet>,
    conclusions: Vec<Option<AttributeSet>>,
    fired: Vec<bool>,
}

enum Saturated {
    Set(AttributeSet),
    Bottom,
    /// Rejected early: the result would add an attribute below the pivot.
    NotCanonical,
}

impl Saturator {
    fn new() -> Self {
        Self {
            premises: Vec::new(),
            conclusions: Vec::new(),
            fired: Vec::new(),
        }
    }

    fn push(&mut self, premise: AttributeSet, conclusion: &ClosureResult) {
        self.premises.push(premise);
        self.conclusions.push(conclusion.as_set().cloned());
        self.fired.push(false);
    }

    /// Saturates `start`. With `guard = Some((pivot, current))`, gives up as
    /// soon as an attribute below `pivot` that is not in `current` appears.
    fn saturate(
        &mut self,
        start: AttributeSet,
        guard: Option<(usize, &AttributeSet)>,
    ) -> Saturated {
        self.fired.iter_mut().for_each(|f| *f = false);
        let mut x = start;
        loop {
            let mut changed = false;
            for k in 0..self.premises.len() {
                if self.fired[k] || !self.premises[k].is_subset(&x) {
                    continue;
                }
                self.fired[k] = true;
                match &self.conclusions[k] {
                    None => return Saturated::Bottom,
                    Some(c) => {
                        if c.is_subset(&x) {
                            continue;
                        }
                        x.union_with(c);
                        changed = true;
                        if let Some((pivot, current)) = guard {
                            if !x.agrees_below(current, pivot) {
                                return Saturated::NotCanonical;
                            }
                        }
                    }
                }
            }
            if !changed {
                return Saturated::Set(x);
            }
        }
    }
}

/// The canonical basis `{P → closure(P) : P pseudo-closed}` of a closure
/// operator, in lectic order of premises.
///
/// Conclusions are the full closures (premise included); a pseudo-closed set
/// whose closure is bottom yields `P → ⊥`. `budget` caps the number of sets
/// the traversal may visit.
pub fn dg_basis<C: ClosureOperator + ?Sized>(
    closure: &C,
    budget: Option<u64>,
) -> Result<HornFormula, ExactError> {
    dg_basis_with_stats(closure, budget).map(|(h, _)| h)
}

pub fn dg_basis_with_stats<C: ClosureOperator + ?Sized>(
    closure: &C,
    budget: Option<u64>,
) -> Result<(HornFormula, BasisStats), ExactError> {
    let width = closure.width();
    let mut basis = HornFormula::new(width);
    let mut sat = Saturator::new();
    let mut stats = BasisStats::default();

    // The current set of the traversal; `None` stands for the saturation
    // that hit a falsum rule, which sorts as the full set.
    let mut current: Option<AttributeSet> = Some(AttributeSet::empty(width));
    loop {
        stats.visited += 1;
        if let Some(limit) = budget {
            if stats.visited > limit {
                return Err(ExactError::BudgetExceeded {
                    budget: limit,
                    found: basis.len(),
                });
            }
        }
        let Some(a) = current else {
            // Everything above a falsum premise; nothing left to visit.
            break;
        };
        let closed = closure.close(&a);
        if !closed.is_exactly(&a) {
            sat.push(a.clone(), &closed);
            basis.push(Implication {
                premise: a.clone(),
                conclusion: closed,
            })?;
        }

        let mut next = None;
        for pivot in (0..width).rev() {
            if a.contains(pivot) {
                continue;
            }
            let mut start = a.clone();
            start.truncate_to(pivot);
            start.insert(pivot);
            stats.candidate_closures += 1;
            match sat.saturate(start, Some((pivot, &a))) {
                Saturated::NotCanonical => {}
                Saturated::Set(b) => {
                    next = Some(Some(b));
                    break;
                }
                Saturated::Bottom => {
                    // As a set, bottom is the full universe: canonical only if
                    // `a` already holds every attribute below the pivot.
                    if a.agrees_below(&AttributeSet::full(width), pivot) {
                        next = Some(None);
                        break;
                    }
                }
            }
        }
        match next {
            Some(n) => current = n,
            None => break,
        }
    }
    Ok((basis, stats))
}

/// The canonical basis by brute force: classify every subset by the
/// recursive definition of pseudo-closedness, smallest sets first.
pub fn brute_force_dg<C: ClosureOperator + ?Sized>(closure: &C) -> Result<HornFormula, ExactError> {
    let width = closure.width();
    if width > BRUTE_FORCE_LIMIT {
        return Err(CoreError::UniverseTooLarge {
            what: "brute_force_dg",
            limit: BRUTE_FORCE_LIMIT,
            width,
        }
        .into());
    }
    let mut subsets: Vec<AttributeSet> = all_subsets(width).collect();
    subsets.sort_by_key(AttributeSet::len);

    let mut pseudo: Vec<Implication> = Vec::new();
    for s in subsets {
        let closed = closure.close(&s);
        if closed.is_exactly(&s) {
            continue;
        }
        let ok = pseudo
            .iter()
            .filter(|p| p.premise.is_proper_subset(&s))
            .all(|p| match &p.conclusion {
                ClosureResult::Closed(c) => c.is_proper_subset(&s),
                ClosureResult::Bottom => false,
            });
        if ok {
            pseudo.push(Implication {
                premise: s,
                conclusion: closed,
            });
        }
    }
    pseudo.sort_by(|x, y| x.premise.lectic_cmp(&y.premise));
    Ok(HornFormula::from_implications(width, pseudo)?)
}

/// Members of the intersection closure of `v` that are not the intersection
/// of other members (the meet-irreducible elements).
pub fn characteristic_models(v: &AssignmentFamily) -> BTreeSet<AttributeSet> {
    let family = intersection_closure(v);
    family
        .iter()
        .filter(|m| {
            let mut meet: Option<AttributeSet> = None;
            for other in family.iter().filter(|o| m.is_proper_subset(o)) {
                match &mut meet {
                    Some(x) => x.intersect_with(other),
                    None => meet = Some(other.clone()),
                }
            }
            meet.as_ref() != Some(*m)
        })
        .cloned()
        .collect()
}

fn check_exhaustive(what: &'static str, width: usize) -> Result<(), CoreError> {
    if width > EXHAUSTIVE_LIMIT {
        Err(CoreError::UniverseTooLarge {
            what,
            limit: EXHAUSTIVE_LIMIT,
            width,
        })
    } else {
        Ok(())
    }
}

/// Assignments that are models of exactly one of `h` and the envelope of `v`,
/// with the envelope's models taken as the fixpoints of the data closure.
pub fn plain_disagreements(
    h: &HornFormula,
    v: &AssignmentFamily,
) -> Result<Vec<AttributeSet>, CoreError> {
    same_width(h.width(), v.width())?;
    check_exhaustive("plain_disagreements", h.width())?;
    Ok(all_subsets(h.width())
        .filter(|x| h.is_model(x) != v.closure_of(x).is_exactly(x))
        .collect())
}

/// Assignments whose closures under `h` and under the data differ.
pub fn strong_disagreements(
    h: &HornFormula,
    v: &AssignmentFamily,
) -> Result<Vec<AttributeSet>, CoreError> {
    same_width(h.width(), v.width())?;
    check_exhaustive("strong_disagreements", h.width())?;
    Ok(all_subsets(h.width())
        .filter(|x| h.closure_of(x) != v.closure_of(x))
        .collect())
}

/// `|Mod(h) △ Mod(Ĥ)| / 2^|Φ|`.
pub fn exact_plain_error(h: &HornFormula, v: &AssignmentFamily) -> Result<f64, CoreError> {
    let n = plain_disagreements(h, v)?.len();
    Ok(n as f64 / (1u64 << h.width()) as f64)
}

/// `|{V : H(V) ≠ Ĥ(V)}| / 2^|Φ|`.
pub fn exact_strong_error(h: &HornFormula, v: &AssignmentFamily) -> Result<f64, CoreError> {
    let n = strong_disagreements(h, v)?.len();
    Ok(n as f64 / (1u64 << h.width()) as f64)
}
