//! Named attribute universes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bitset::AttributeSet;
use crate::error::{CoreError, Result};

/// An ordered list of distinct, non-empty attribute labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct AttributeUniverse {
    names: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl AttributeUniverse {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(CoreError::EmptyLabel);
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(CoreError::DuplicateLabel(name.clone()));
            }
        }
        Ok(Self { names, index })
    }

    /// A universe with labels `a0`, `a1`, ...
    pub fn anonymous(width: usize) -> Self {
        Self::new((0..width).map(|i| format!("a{i}"))).expect("generated labels are unique")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn empty_set(&self) -> AttributeSet {
        AttributeSet::empty(self.len())
    }

    pub fn set_from_labels<I, S>(&self, labels: I) -> Result<AttributeSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = self.empty_set();
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| CoreError::UnknownLabel(label.to_string()))?;
            set.insert(i);
        }
        Ok(set)
    }

    pub fn labels_of<'a>(&'a self, set: &'a AttributeSet) -> impl Iterator<Item = &'a str> + 'a {
        set.iter().map(move |i| self.names[i].as_str())
    }
}

impl TryFrom<Vec<String>> for AttributeUniverse {
    type Error = CoreError;

    fn try_from(names: Vec<String>) -> Result<Self> {
        Self::new(names)
    }
}

impl From<AttributeUniverse> for Vec<String> {
    fn from(u: AttributeUniverse) -> Self {
        u.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_empty_labels() {
        assert_eq!(
            AttributeUniverse::new(["a", "b", "a"]),
            Err(CoreError::DuplicateLabel("a".into()))
        );
        assert_eq!(
            AttributeUniverse::new(["a", ""]),
            Err(CoreError::EmptyLabel)
        );
    }

    #[test]
    fn label_round_trip() {
        let u = AttributeUniverse::new(["milk", "eggs", "hair"]).unwrap();
        let s = u.set_from_labels(["hair", "milk"]).unwrap();
        assert_eq!(u.labels_of(&s).collect::<Vec<_>>(), vec!["milk", "hair"]);
        assert!(matches!(
            u.set_from_labels(["fins"]),
            Err(CoreError::UnknownLabel(_))
        ));
    }

    #[test]
    fn serde_rebuilds_index() {
        let u = AttributeUniverse::new(["x", "y"]).unwrap();
        let json = serde_json::to_string(&u).unwrap();
        assert_eq!(json, r#"["x","y"]"#);
        let back: AttributeUniverse = serde_json::from_str(&json).unwrap();
        assert_eq!(back.index_of("y"), Some(1));
        assert!(serde_json::from_str::<AttributeUniverse>(r#"["x","x"]"#).is_err());
    }
}
