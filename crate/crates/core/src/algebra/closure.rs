use crate::bitset::AttributeSet;

/// Result of closing a set: a closed set, or falsum when no model contains it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClosureResult {
    Closed(AttributeSet),
    Bottom,
}

impl ClosureResult {
    pub fn is_bottom(&self) -> bool {
        matches!(self, ClosureResult::Bottom)
    }

    pub fn as_set(&self) -> Option<&AttributeSet> {
        match self {
            ClosureResult::Closed(s) => Some(s),
            ClosureResult::Bottom => None,
        }
    }

    /// `set ⊆ self`; always true for bottom.
    pub fn contains_set(&self, set: &AttributeSet) -> bool {
        match self {
            ClosureResult::Closed(s) => set.is_subset(s),
            ClosureResult::Bottom => true,
        }
    }

    /// `self ⊆ set`; never true for bottom.
    pub fn is_within(&self, set: &AttributeSet) -> bool {
        match self {
            ClosureResult::Closed(s) => s.is_subset(set),
            ClosureResult::Bottom => false,
        }
    }

    /// `self ⊆ other` with bottom as the top element.
    pub fn is_subset_of(&self, other: &ClosureResult) -> bool {
        match (self, other) {
            (_, ClosureResult::Bottom) => true,
            (ClosureResult::Bottom, ClosureResult::Closed(_)) => false,
            (ClosureResult::Closed(a), ClosureResult::Closed(b)) => a.is_subset(b),
        }
    }

    /// `self ∩ set`, where `⊥ ∩ set = set`.
    pub fn intersect_set(&self, set: &AttributeSet) -> AttributeSet {
        match self {
            ClosureResult::Closed(s) => s.intersection(set),
            ClosureResult::Bottom => set.clone(),
        }
    }

    /// `self == set`, false for bottom.
    pub fn is_exactly(&self, set: &AttributeSet) -> bool {
        self.as_set() == Some(set)
    }
}

impl From<AttributeSet> for ClosureResult {
    fn from(set: AttributeSet) -> Self {
        ClosureResult::Closed(set)
    }
}

/// A closure operator on the subsets of a fixed universe.
pub trait ClosureOperator {
    fn width(&self) -> usize;

    /// Closes `set`; callers guarantee `set.width() == self.width()`.
    fn close(&self, set: &AttributeSet) -> ClosureResult;
}

/// Adapts a plain function into a [`ClosureOperator`].
pub struct ClosureFn<F> {
    width: usize,
    f: F,
}

impl<F: Fn(&AttributeSet) -> ClosureResult> ClosureFn<F> {
    pub fn new(width: usize, f: F) -> Self {
        Self { width, f }
    }
}

impl<F: Fn(&AttributeSet) -> ClosureResult> ClosureOperator for ClosureFn<F> {
    fn width(&self) -> usize {
        self.width
    }

    fn close(&self, set: &AttributeSet) -> ClosureResult {
        (self.f)(set)
    }
}

impl<C: ClosureOperator + ?Sized> ClosureOperator for &C {
    fn width(&self) -> usize {
        (**self).width()
    }

    fn close(&self, set: &AttributeSet) -> ClosureResult {
        (**self).close(set)
    }
}

/// Decides pseudo-closedness of `set` straight from the recursive definition.
///
/// Every subset of `set` is classified in order of increasing cardinality, so
/// the cost is exponential in `|set|`. Intended for small universes.
pub fn is_pseudo_closed<C: ClosureOperator + ?Sized>(set: &AttributeSet, closure: &C) -> bool {
    let members: Vec<usize> = set.iter().collect();
    assert!(
        members.len() < 32,
        "is_pseudo_closed is exponential in |set|"
    );
    let width = set.width();
    let mut masks: Vec<u32> = (0..1u32 << members.len()).collect();
    masks.sort_by_key(|m| m.count_ones());

    let mut pseudo: Vec<(u32, ClosureResult)> = Vec::new();
    for mask in masks {
        let sub = AttributeSet::from_indices(
            width,
            members
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &i)| i),
        );
        let closed = closure.close(&sub);
        let is_pc = !closed.is_exactly(&sub)
            && pseudo
                .iter()
                .filter(|(w, _)| w & mask == *w && *w != mask)
                .all(|(_, cw)| match cw {
                    ClosureResult::Closed(c) => c.is_proper_subset(&sub),
                    ClosureResult::Bottom => false,
                });
        if is_pc {
            pseudo.push((mask, closed));
        }
    }
    let full = (1u32 << members.len()) - 1;
    pseudo.last().is_some_and(|(m, _)| *m == full)
}
