//! Implication oracles: the domain expert behind the learner.
//!
//! An oracle answers "does `A → B` hold in the domain?" either with
//! [`OracleAnswer::Valid`] or with a counterexample: a model of the domain
//! containing `A` but not `B`. Restricted queries only report validity.
//!
//! Multi-query procedures such as the membership test are written as
//! [`Probe`]s, small state machines that expose one query at a time. That lets
//! the same procedure run synchronously against an oracle ([`run_probe`]) or
//! be suspended while a person thinks about the answer.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AssignmentFamily, ClosureResult, HornFormula, Implication, Validity};
use crate::bitset::{all_subsets, AttributeSet};
use crate::error::{same_width, CoreError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    Valid,
    Counterexample(AttributeSet),
}

impl OracleAnswer {
    pub fn is_valid(&self) -> bool {
        matches!(self, OracleAnswer::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("oracle unavailable: {0}")]
    Unavailable(String),
}

/// Queries that reached an oracle, by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub restricted: u64,
    pub full: u64,
}

impl QueryCounts {
    pub fn total(&self) -> u64 {
        self.restricted + self.full
    }
}

/// Whether `set` is a counterexample to `imp`: it contains the premise but
/// not the conclusion.
pub fn violates(set: &AttributeSet, imp: &Implication) -> bool {
    set.width() == imp.width() && !imp.is_satisfied_by(set)
}

pub trait ImplicationOracle {
    fn width(&self) -> usize;

    fn ask(&mut self, imp: &Implication) -> Result<OracleAnswer, OracleError>;

    /// Validity only; any counterexample is discarded.
    fn ask_restricted(&mut self, imp: &Implication) -> Result<bool, OracleError>;

    fn counts(&self) -> QueryCounts;
}

impl<T: ImplicationOracle + ?Sized> ImplicationOracle for &mut T {
    fn width(&self) -> usize {
        (**self).width()
    }

    fn ask(&mut self, imp: &Implication) -> Result<OracleAnswer, OracleError> {
        (**self).ask(imp)
    }

    fn ask_restricted(&mut self, imp: &Implication) -> Result<bool, OracleError> {
        (**self).ask_restricted(imp)
    }

    fn counts(&self) -> QueryCounts {
        (**self).counts()
    }
}

impl<T: ImplicationOracle + ?Sized> ImplicationOracle for Box<T> {
    fn width(&self) -> usize {
        (**self).width()
    }

    fn ask(&mut self, imp: &Implication) -> Result<OracleAnswer, OracleError> {
        (**self).ask(imp)
    }

    fn ask_restricted(&mut self, imp: &Implication) -> Result<bool, OracleError> {
        (**self).ask_restricted(imp)
    }

    fn counts(&self) -> QueryCounts {
        (**self).counts()
    }
}

impl AsRef<AssignmentFamily> for AssignmentFamily {
    fn as_ref(&self) -> &AssignmentFamily {
        self
    }
}

/// Answers from an explicit dataset. The counterexample is always the first
/// violating row in row order.
#[derive(Debug, Clone)]
pub struct DatasetOracle<D = Arc<AssignmentFamily>> {
    data: D,
    counts: QueryCounts,
}

impl<D: AsRef<AssignmentFamily>> DatasetOracle<D> {
    pub fn new(data: D) -> Self {
        Self {
            data,
            counts: QueryCounts::default(),
        }
    }

    pub fn data(&self) -> &AssignmentFamily {
        self.data.as_ref()
    }
}

impl<D: AsRef<AssignmentFamily>> ImplicationOracle for DatasetOracle<D> {
    fn width(&self) -> usize {
        self.data.as_ref().width()
    }

    fn ask(&mut self, imp: &Implication) -> Result<OracleAnswer, OracleError> {
        let data = self.data.as_ref();
        same_width(data.width(), imp.width())?;
        self.counts.full += 1;
        Ok(match data.holds_unchecked(imp) {
            Validity::Valid => OracleAnswer::Valid,
            Validity::Counterexample(i) => OracleAnswer::Counterexample(data.rows()[i].clone()),
        })
    }

    fn ask_restricted(&mut self, imp: &Implication) -> Result<bool, OracleError> {
        let data = self.data.as_ref();
        same_width(data.width(), imp.width())?;
        self.counts.restricted += 1;
        Ok(data.holds_unchecked(imp) == Validity::Valid)
    }

    fn counts(&self) -> QueryCounts {
        self.counts
    }
}

/// Largest universe for [`TargetFormulaOracles`].
pub const TARGET_ORACLE_LIMIT: usize = 20;

/// Membership and equivalence oracles for a known Horn target, by exhaustive
/// model comparison. Also answers implication queries relative to the
/// target's models.
#[derive(Debug, Clone)]
pub struct TargetFormulaOracles {
    target: HornFormula,
    pub membership_queries: u64,
    pub equivalence_queries: u64,
    counts: QueryCounts,
}

impl TargetFormulaOracles {
    pub fn new(target: HornFormula) -> Result<Self, CoreError> {
        if target.width() > TARGET_ORACLE_LIMIT {
            return Err(CoreError::UniverseTooLarge {
                what: "TargetFormulaOracles",
                limit: TARGET_ORACLE_LIMIT,
                width: target.width(),
            });
        }
        Ok(Self {
            target,
            membership_queries: 0,
            equivalence_queries: 0,
            counts: QueryCounts::default(),
        })
    }

    pub fn target(&self) -> &HornFormula {
        &self.target
    }

    pub fn member(&mut self, a: &AttributeSet) -> bool {
        self.membership_queries += 1;
        self.target.is_model(a)
    }

    /// `None` if `h` has exactly the target's models, otherwise the first
    /// assignment (in integer order, bit `i` = attribute `i`) on which they
    /// disagree.
    pub fn equivalent(&mut self, h: &HornFormula) -> Option<AttributeSet> {
        self.equivalence_queries += 1;
        all_subsets(self.target.width()).find(|x| h.is_model(x) != self.target.is_model(x))
    }
}

impl ImplicationOracle for TargetFormulaOracles {
    fn width(&self) -> usize {
        self.target.width()
    }

    fn ask(&mut self, imp: &Implication) -> Result<OracleAnswer, OracleError> {
        same_width(self.target.width(), imp.width())?;
        self.counts.full += 1;
        // The least model above the premise violates the implication whenever
        // any model does.
        Ok(match self.target.closure_of(&imp.premise) {
            ClosureResult::Bottom => OracleAnswer::Valid,
            ClosureResult::Closed(m) if imp.is_satisfied_by(&m) => OracleAnswer::Valid,
            ClosureResult::Closed(m) => OracleAnswer::Counterexample(m),
        })
    }

    fn ask_restricted(&mut self, imp: &Implication) -> Result<bool, OracleError> {
        let answer = self.ask(imp)?;
        self.counts.full -= 1;
        self.counts.restricted += 1;
        Ok(answer.is_valid())
    }

    fn counts(&self) -> QueryCounts {
        self.counts
    }
}

/// Counterexamples and confirmed implications seen so far, and the answers
/// they imply for new questions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerCache {
    confirmed: HornFormula,
    examples: Vec<AttributeSet>,
    cache_counterexamples: bool,
    cache_confirmed: bool,
}

impl AnswerCache {
    pub fn new(width: usize, cache_counterexamples: bool, cache_confirmed: bool) -> Self {
        Self {
            confirmed: HornFormula::new(width),
            examples: Vec::new(),
            cache_counterexamples,
            cache_confirmed,
        }
    }

    pub fn caches_counterexamples(&self) -> bool {
        self.cache_counterexamples
    }

    pub fn confirmed(&self) -> &HornFormula {
        &self.confirmed
    }

    pub fn examples(&self) -> &[AttributeSet] {
        &self.examples
    }

    /// The answer the cache already implies, if any.
    pub fn lookup(&self, imp: &Implication) -> Option<OracleAnswer> {
        if self.cache_counterexamples {
            if let Some(x) = self.examples.iter().find(|x| violates(x, imp)) {
                return Some(OracleAnswer::Counterexample(x.clone()));
            }
        }
        if self.cache_confirmed
            && imp
                .conclusion
                .is_subset_of(&self.confirmed.closure_of(&imp.premise))
        {
            return Some(OracleAnswer::Valid);
        }
        None
    }

    pub fn record(&mut self, imp: &Implication, answer: &OracleAnswer) {
        match answer {
            OracleAnswer::Valid if self.cache_confirmed => {
                self.confirmed
                    .push(imp.clone())
                    .expect("query from the cache's universe");
            }
            OracleAnswer::Counterexample(x)
                if self.cache_counterexamples && !self.examples.contains(x) =>
            {
                self.examples.push(x.clone());
            }
            _ => {}
        }
    }
}

/// An [`AnswerCache`] in front of another oracle, so that repeated or implied
/// questions never reach it.
///
/// With counterexample caching on, restricted queries that miss the cache are
/// forwarded as full queries so the counterexample can be kept.
#[derive(Debug, Clone)]
pub struct CachingOracle<O> {
    inner: O,
    cache: AnswerCache,
    hits: u64,
}

impl<O: ImplicationOracle> CachingOracle<O> {
    pub fn new(inner: O, cache_counterexamples: bool, cache_confirmed: bool) -> Self {
        let width = inner.width();
        Self {
            inner,
            cache: AnswerCache::new(width, cache_counterexamples, cache_confirmed),
            hits: 0,
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn cache(&self) -> &AnswerCache {
        &self.cache
    }

    pub fn confirmed(&self) -> &HornFormula {
        self.cache.confirmed()
    }

    pub fn examples(&self) -> &[AttributeSet] {
        self.cache.examples()
    }

    pub fn lookup(&self, imp: &Implication) -> Option<OracleAnswer> {
        self.cache.lookup(imp)
    }

    /// Stores an answer obtained elsewhere.
    pub fn record(&mut self, imp: &Implication, answer: &OracleAnswer) {
        self.cache.record(imp, answer)
    }
}

impl<O: ImplicationOracle> ImplicationOracle for CachingOracle<O> {
    fn width(&self) -> usize {
        self.inner.width()
    }

    fn ask(&mut self, imp: &Implication) -> Result<OracleAnswer, OracleError> {
        same_width(self.width(), imp.width())?;
        if let Some(hit) = self.lookup(imp) {
            self.hits += 1;
            return Ok(hit);
        }
        let answer = self.inner.ask(imp)?;
        self.record(imp, &answer);
        Ok(answer)
    }

    fn ask_restricted(&mut self, imp: &Implication) -> Result<bool, OracleError> {
        same_width(self.width(), imp.width())?;
        if let Some(hit) = self.lookup(imp) {
            self.hits += 1;
            return Ok(hit.is_valid());
        }
        if self.cache.caches_counterexamples() {
            let answer = self.inner.ask(imp)?;
            self.record(imp, &answer);
            Ok(answer.is_valid())
        } else {
            let valid = self.inner.ask_restricted(imp)?;
            if valid {
                self.record(imp, &OracleAnswer::Valid);
            }
            Ok(valid)
        }
    }

    fn counts(&self) -> QueryCounts {
        self.inner.counts()
    }
}

/// A procedure that needs a sequence of restricted implication queries.
///
/// `query` is the current question; `feed` consumes its answer and returns the
/// result once the procedure is finished. `query` must not be called after
/// `feed` returned `Some`.
pub trait Probe {
    type Output;

    fn query(&self) -> Implication;

    fn feed(&mut self, valid: bool) -> Option<Self::Output>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Cursor {
    Falsum,
    Attribute(usize),
}

fn next_outside(set: &AttributeSet, from: usize) -> Option<usize> {
    (from..set.width()).find(|&i| !set.contains(i))
}

/// Decides `A ∈ 𝔙̂` with restricted queries: first `A → ⊥`, then `A → {x}`
/// for each `x ∉ A` in index order. Any valid answer means "not a member".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipProbe {
    set: AttributeSet,
    cursor: Cursor,
}

impl MembershipProbe {
    pub fn new(set: AttributeSet) -> Self {
        Self {
            set,
            cursor: Cursor::Falsum,
        }
    }

    pub fn set(&self) -> &AttributeSet {
        &self.set
    }
}

impl Probe for MembershipProbe {
    type Output = bool;

    fn query(&self) -> Implication {
        match self.cursor {
            Cursor::Falsum => Implication::to_bottom(self.set.clone()),
            Cursor::Attribute(i) => {
                let single = AttributeSet::from_indices(self.set.width(), [i]);
                Implication {
                    premise: self.set.clone(),
                    conclusion: ClosureResult::Closed(single),
                }
            }
        }
    }

    fn feed(&mut self, valid: bool) -> Option<bool> {
        if valid {
            return Some(false);
        }
        let from = match self.cursor {
            Cursor::Falsum => 0,
            Cursor::Attribute(i) => i + 1,
        };
        match next_outside(&self.set, from) {
            Some(i) => {
                self.cursor = Cursor::Attribute(i);
                None
            }
            None => Some(true),
        }
    }
}

/// Computes `Ĥ(X)` with restricted queries: `X → ⊥` first, and if that is
/// invalid, `X → {a}` for every `a ∉ X`; the valid ones form the closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopeClosureProbe {
    set: AttributeSet,
    closure: AttributeSet,
    cursor: Cursor,
}

impl EnvelopeClosureProbe {
    pub fn new(set: AttributeSet) -> Self {
        Self {
            closure: set.clone(),
            set,
            cursor: Cursor::Falsum,
        }
    }

    pub fn set(&self) -> &AttributeSet {
        &self.set
    }
}

impl Probe for EnvelopeClosureProbe {
    type Output = ClosureResult;

    fn query(&self) -> Implication {
        match self.cursor {
            Cursor::Falsum => Implication::to_bottom(self.set.clone()),
            Cursor::Attribute(i) => Implication {
                premise: self.set.clone(),
                conclusion: ClosureResult::Closed(AttributeSet::from_indices(
                    self.set.width(),
                    [i],
                )),
            },
        }
    }

    fn feed(&mut self, valid: bool) -> Option<ClosureResult> {
        let from = match self.cursor {
            Cursor::Falsum if valid => return Some(ClosureResult::Bottom),
            Cursor::Falsum => 0,
            Cursor::Attribute(i) => {
                if valid {
                    self.closure.insert(i);
                }
                i + 1
            }
        };
        match next_outside(&self.set, from) {
            Some(i) => {
                self.cursor = Cursor::Attribute(i);
                None
            }
            None => Some(ClosureResult::Closed(self.closure.clone())),
        }
    }
}

/// Runs a probe to completion against an oracle.
pub fn run_probe<P, O>(mut probe: P, oracle: &mut O) -> Result<P::Output, OracleError>
where
    P: Probe,
    O: ImplicationOracle + ?Sized,
{
    loop {
        let valid = oracle.ask_restricted(&probe.query())?;
        if let Some(out) = probe.feed(valid) {
            return Ok(out);
        }
    }
}

/// `a ∈ 𝔙̂` for the oracle's domain, using at most `|Φ ∖ a| + 1` restricted queries.
pub fn is_member<O: ImplicationOracle + ?Sized>(
    a: &AttributeSet,
    oracle: &mut O,
) -> Result<bool, OracleError> {
    same_width(oracle.width(), a.width())?;
    run_probe(MembershipProbe::new(a.clone()), oracle)
}

/// `Ĥ(x)` for the oracle's domain, computed through restricted queries.
pub fn envelope_closure<O: ImplicationOracle + ?Sized>(
    x: &AttributeSet,
    oracle: &mut O,
) -> Result<ClosureResult, OracleError> {
    same_width(oracle.width(), x.width())?;
    run_probe(EnvelopeClosureProbe::new(x.clone()), oracle)
}
