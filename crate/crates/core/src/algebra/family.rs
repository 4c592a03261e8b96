use std::collections::BTreeSet;

use crate::bitset::AttributeSet;
use crate::error::{same_width, Result};

use super::closure::{ClosureOperator, ClosureResult};
use super::formula::Implication;

/// The rows of a dataset: the positive examples of a domain.
///
/// Row order is ingestion order and is never changed; duplicate rows are kept
/// unless [`AssignmentFamily::dedup`] is called.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentFamily {
    width: usize,
    rows: Vec<AttributeSet>,
    labels: Option<Vec<String>>,
}

/// Outcome of checking an implication against the rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// Index of the first violating row.
    Counterexample(usize),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

impl AssignmentFamily {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
            labels: None,
        }
    }

    pub fn from_rows<I>(width: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = AttributeSet>,
    {
        let mut family = Self::new(width);
        for row in rows {
            family.push(row)?;
        }
        Ok(family)
    }

    /// Rows given as integers (bit `i` = attribute `i`); test and toy-data helper.
    pub fn from_bits(width: usize, rows: &[u64]) -> Self {
        Self {
            width,
            rows: rows
                .iter()
                .map(|&b| AttributeSet::from_bits(width, b))
                .collect(),
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.rows.len(), "one label per row");
        self.labels = Some(labels);
        self
    }

    pub fn push(&mut self, row: AttributeSet) -> Result<()> {
        same_width(self.width, row.width())?;
        if let Some(labels) = &mut self.labels {
            labels.push(format!("g{}", labels.len()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_labeled(&mut self, label: String, row: AttributeSet) -> Result<()> {
        same_width(self.width, row.width())?;
        let labels = self
            .labels
            .get_or_insert_with(|| (0..self.rows.len()).map(|i| format!("g{i}")).collect());
        labels.push(label);
        self.rows.push(row);
        Ok(())
    }

    /// Drops repeated rows, keeping the first occurrence of each.
    pub fn dedup(&mut self) {
        let mut seen = std::collections::HashSet::new();
        let mut keep = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            keep.push(seen.insert(row.clone()));
        }
        let mut flags = keep.iter();
        self.rows.retain(|_| *flags.next().unwrap());
        if let Some(labels) = &mut self.labels {
            let mut flags = keep.iter();
            labels.retain(|_| *flags.next().unwrap());
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[AttributeSet] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Fraction of set bits over all rows.
    pub fn density(&self) -> f64 {
        if self.rows.is_empty() || self.width == 0 {
            return 0.0;
        }
        let ones: usize = self.rows.iter().map(AttributeSet::len).sum();
        ones as f64 / (self.rows.len() * self.width) as f64
    }

    /// `Ĥ(a)`: the intersection of all rows containing `a`, or bottom if none does.
    pub fn env_closure(&self, a: &AttributeSet) -> Result<ClosureResult> {
        same_width(self.width, a.width())?;
        Ok(self.closure_of(a))
    }

    pub(crate) fn closure_of(&self, a: &AttributeSet) -> ClosureResult {
        let mut acc: Option<AttributeSet> = None;
        for row in &self.rows {
            if a.is_subset(row) {
                match &mut acc {
                    Some(s) => s.intersect_with(row),
                    None => acc = Some(row.clone()),
                }
            }
        }
        acc.map_or(ClosureResult::Bottom, ClosureResult::Closed)
    }

    /// Checks `rows ⊨ imp`, reporting the first violating row.
    pub fn holds(&self, imp: &Implication) -> Result<Validity> {
        same_width(self.width, imp.width())?;
        Ok(self.holds_unchecked(imp))
    }

    pub(crate) fn holds_unchecked(&self, imp: &Implication) -> Validity {
        let violated = |row: &AttributeSet| {
            imp.premise.is_subset(row)
                && match &imp.conclusion {
                    ClosureResult::Bottom => true,
                    ClosureResult::Closed(c) => !c.is_subset(row),
                }
        };
        match self.rows.iter().position(violated) {
            Some(i) => Validity::Counterexample(i),
            None => Validity::Valid,
        }
    }
}

impl ClosureOperator for AssignmentFamily {
    fn width(&self) -> usize {
        self.width
    }

    fn close(&self, set: &AttributeSet) -> ClosureResult {
        self.closure_of(set)
    }
}

/// The least family containing every row and closed under pairwise
/// intersection. Only intersections of non-empty subfamilies are added, so
/// the full set appears only if it is a row, and an empty family stays empty.
pub fn intersection_closure(v: &AssignmentFamily) -> BTreeSet<AttributeSet> {
    let mut family: BTreeSet<AttributeSet> = v.rows().iter().cloned().collect();
    let mut frontier: Vec<AttributeSet> = family.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for fresh in &frontier {
            let products: Vec<AttributeSet> =
                family.iter().map(|m| m.intersection(fresh)).collect();
            for p in products {
                if family.insert(p.clone()) {
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    family
}

#[cfg(test)]
mod tests {
    use super::*;

    // a=0, b=1, c=2
    fn ab_ac() -> AssignmentFamily {
        AssignmentFamily::from_bits(3, &[0b011, 0b101])
    }

    fn s(bits: u64) -> AttributeSet {
        AttributeSet::from_bits(3, bits)
    }

    #[test]
    fn env_closure_examples() {
        let v = ab_ac();
        assert_eq!(
            v.env_closure(&s(0b001)).unwrap(),
            ClosureResult::Closed(s(0b001))
        );
        assert_eq!(
            v.env_closure(&s(0b010)).unwrap(),
            ClosureResult::Closed(s(0b011))
        );
        assert_eq!(v.env_closure(&s(0b110)).unwrap(), ClosureResult::Bottom);
    }

    #[test]
    fn holds_examples() {
        let v = ab_ac();
        let b_to_a = Implication::to_set(s(0b010), s(0b001)).unwrap();
        assert_eq!(v.holds(&b_to_a).unwrap(), Validity::Valid);
        let a_to_b = Implication::to_set(s(0b001), s(0b010)).unwrap();
        assert_eq!(v.holds(&a_to_b).unwrap(), Validity::Counterexample(1));
        for bits in 0..8 {
            let refl = Implication::to_set(s(bits), s(bits)).unwrap();
            assert_eq!(v.holds(&refl).unwrap(), Validity::Valid);
        }
    }

    #[test]
    fn empty_family_closes_to_bottom() {
        let v = AssignmentFamily::new(2);
        assert_eq!(
            v.env_closure(&AttributeSet::empty(2)).unwrap(),
            ClosureResult::Bottom
        );
        assert!(intersection_closure(&v).is_empty());
    }

    #[test]
    fn intersection_closure_examples() {
        let two = AssignmentFamily::from_bits(2, &[0b01, 0b10]);
        let got: Vec<u64> = intersection_closure(&two)
            .iter()
            .map(|x| x.to_bits())
            .collect();
        let mut got = got;
        got.sort();
        assert_eq!(got, vec![0b00, 0b01, 0b10]);

        let one = AssignmentFamily::from_bits(2, &[0b11]);
        assert_eq!(intersection_closure(&one).len(), 1);

        let tri = AssignmentFamily::from_bits(3, &[0b011, 0b110, 0b101]);
        let mut got: Vec<u64> = intersection_closure(&tri)
            .iter()
            .map(|x| x.to_bits())
            .collect();
        got.sort();
        assert_eq!(got, vec![0b000, 0b001, 0b010, 0b011, 0b100, 0b101, 0b110]);
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let mut v = AssignmentFamily::from_bits(2, &[0b01, 0b10, 0b01]).with_labels(vec![
            "x".into(),
            "y".into(),
            "z".into(),
        ]);
        v.dedup();
        assert_eq!(v.len(), 2);
        assert_eq!(v.labels().unwrap(), &["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn width_checks() {
        let v = ab_ac();
        assert!(v.env_closure(&AttributeSet::empty(2)).is_err());
        let mut w = AssignmentFamily::new(3);
        assert!(w.push(AttributeSet::empty(4)).is_err());
    }
}
