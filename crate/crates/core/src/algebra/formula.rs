use crate::bitset::AttributeSet;
use crate::error::{same_width, Result};

use super::closure::{ClosureOperator, ClosureResult};

/// `premise → conclusion`, where the conclusion may be falsum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Implication {
    pub premise: AttributeSet,
    pub conclusion: ClosureResult,
}

impl Implication {
    pub fn new(premise: AttributeSet, conclusion: ClosureResult) -> Result<Self> {
        if let ClosureResult::Closed(c) = &conclusion {
            same_width(premise.width(), c.width())?;
        }
        Ok(Self {
            premise,
            conclusion,
        })
    }

    pub fn to_set(premise: AttributeSet, conclusion: AttributeSet) -> Result<Self> {
        Self::new(premise, ClosureResult::Closed(conclusion))
    }

    pub fn to_bottom(premise: AttributeSet) -> Self {
        Self {
            premise,
            conclusion: ClosureResult::Bottom,
        }
    }

    pub fn width(&self) -> usize {
        self.premise.width()
    }

    /// `set ⊨ premise → conclusion`.
    pub fn is_satisfied_by(&self, set: &AttributeSet) -> bool {
        !self.premise.is_subset(set) || self.conclusion.is_within(set)
    }

    /// Adds the premise to the conclusion. Idempotent; bottom is unchanged.
    pub fn normalized(&self) -> Self {
        let conclusion = match &self.conclusion {
            ClosureResult::Closed(c) => ClosureResult::Closed(c.union(&self.premise)),
            ClosureResult::Bottom => ClosureResult::Bottom,
        };
        Self {
            premise: self.premise.clone(),
            conclusion,
        }
    }

    /// Conclusion without the premise attributes, the form shown to people.
    /// `None` stands for falsum.
    pub fn reduced_conclusion(&self) -> Option<AttributeSet> {
        self.conclusion
            .as_set()
            .map(|c| c.difference(&self.premise))
    }
}

/// An ordered list of implications over one universe.
///
/// Iteration order is insertion order; in-place replacement keeps the
/// position of the replaced implication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornFormula {
    width: usize,
    implications: Vec<Implication>,
}

impl HornFormula {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            implications: Vec::new(),
        }
    }

    pub fn from_implications<I>(width: usize, implications: I) -> Result<Self>
    where
        I: IntoIterator<Item = Implication>,
    {
        let mut h = Self::new(width);
        for imp in implications {
            h.push(imp)?;
        }
        Ok(h)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of implications, `|H|`.
    pub fn len(&self) -> usize {
        self.implications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.implications.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Implication> {
        self.implications.iter()
    }

    pub fn get(&self, position: usize) -> Option<&Implication> {
        self.implications.get(position)
    }

    pub fn as_slice(&self) -> &[Implication] {
        &self.implications
    }

    pub fn push(&mut self, imp: Implication) -> Result<()> {
        same_width(self.width, imp.width())?;
        self.implications.push(imp);
        Ok(())
    }

    /// Replaces the implication at `position`, keeping its place in the order.
    pub fn replace(&mut self, position: usize, imp: Implication) -> Result<Implication> {
        same_width(self.width, imp.width())?;
        Ok(std::mem::replace(&mut self.implications[position], imp))
    }

    pub(crate) fn get_mut(&mut self, position: usize) -> &mut Implication {
        &mut self.implications[position]
    }

    /// Least fixpoint of the implications above `set`; see [`forward_closure`].
    pub fn closure_of(&self, set: &AttributeSet) -> ClosureResult {
        assert_eq!(
            set.width(),
            self.width,
            "attribute set from a different universe"
        );
        let mut current = set.clone();
        let mut fired = vec![false; self.implications.len()];
        loop {
            let mut changed = false;
            for (imp, done) in self.implications.iter().zip(fired.iter_mut()) {
                if *done || !imp.premise.is_subset(&current) {
                    continue;
                }
                *done = true;
                match &imp.conclusion {
                    ClosureResult::Bottom => return ClosureResult::Bottom,
                    ClosureResult::Closed(c) => {
                        if !c.is_subset(&current) {
                            current.union_with(c);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return ClosureResult::Closed(current);
            }
        }
    }

    pub fn is_model(&self, set: &AttributeSet) -> bool {
        self.implications.iter().all(|imp| imp.is_satisfied_by(set))
    }
}

impl<'a> IntoIterator for &'a HornFormula {
    type Item = &'a Implication;
    type IntoIter = std::slice::Iter<'a, Implication>;

    fn into_iter(self) -> Self::IntoIter {
        self.implications.iter()
    }
}

impl ClosureOperator for HornFormula {
    fn width(&self) -> usize {
        self.width
    }

    fn close(&self, set: &AttributeSet) -> ClosureResult {
        self.closure_of(set)
    }
}

/// `H(a)`: applies the implications of `h` to `a` until nothing changes.
///
/// Passes run round-robin over the implication list; each implication fires at
/// most once. Returns bottom as soon as a falsum implication applies.
pub fn forward_closure(h: &HornFormula, a: &AttributeSet) -> Result<ClosureResult> {
    same_width(h.width(), a.width())?;
    Ok(h.closure_of(a))
}

/// `a ⊨ h`.
pub fn models(a: &AttributeSet, h: &HornFormula) -> Result<bool> {
    same_width(h.width(), a.width())?;
    Ok(h.is_model(a))
}

/// `h ⊨ imp`, decided by closing the premise.
pub fn entails(h: &HornFormula, imp: &Implication) -> Result<bool> {
    same_width(h.width(), imp.width())?;
    Ok(imp.conclusion.is_subset_of(&h.closure_of(&imp.premise)))
}
