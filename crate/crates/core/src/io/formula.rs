//! Formulas as JSON lines, one implication per line:
//!
//! ```text
//! {"premise":["milk"],"conclusion":["backbone","breathes"]}
//! {"premise":[],"conclusion":"bottom"}
//! ```

use serde::{Deserialize, Serialize};

use crate::algebra::{ClosureResult, HornFormula, Implication};
use crate::bitset::AttributeSet;
use crate::error::CoreError;
use crate::universe::AttributeUniverse;

use super::IoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BottomTag {
    #[serde(rename = "bottom")]
    Bottom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Conclusion {
    Labels(Vec<String>),
    Bottom(BottomTag),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplicationRecord {
    pub premise: Vec<String>,
    pub conclusion: Conclusion,
}

impl ImplicationRecord {
    pub fn from_implication(imp: &Implication, universe: &AttributeUniverse) -> Self {
        let labels = |s: &AttributeSet| universe.labels_of(s).map(str::to_string).collect();
        Self {
            premise: labels(&imp.premise),
            conclusion: match &imp.conclusion {
                ClosureResult::Closed(c) => Conclusion::Labels(labels(c)),
                ClosureResult::Bottom => Conclusion::Bottom(BottomTag::Bottom),
            },
        }
    }

    pub fn to_implication(&self, universe: &AttributeUniverse) -> Result<Implication, CoreError> {
        let premise = labels_to_set(&self.premise, universe)?;
        let conclusion = match &self.conclusion {
            Conclusion::Labels(l) => ClosureResult::Closed(labels_to_set(l, universe)?),
            Conclusion::Bottom(_) => ClosureResult::Bottom,
        };
        Implication::new(premise, conclusion)
    }
}

fn labels_to_set(
    labels: &[String],
    universe: &AttributeUniverse,
) -> Result<AttributeSet, CoreError> {
    let mut set = universe.empty_set();
    for label in labels {
        let i = universe
            .index_of(label)
            .ok_or_else(|| CoreError::UnknownLabel(label.clone()))?;
        if !set.insert(i) {
            return Err(CoreError::DuplicateLabel(label.clone()));
        }
    }
    Ok(set)
}

pub fn serialize_formula(h: &HornFormula, universe: &AttributeUniverse) -> String {
    let mut out = String::new();
    for imp in h {
        let rec = ImplicationRecord::from_implication(imp, universe);
        out.push_str(&serde_json::to_string(&rec).expect("records always serialize"));
        out.push('\n');
    }
    out
}

/// Parses JSON lines; blank lines are skipped.
pub fn parse_formula(text: &str, universe: &AttributeUniverse) -> Result<HornFormula, IoError> {
    let mut h = HornFormula::new(universe.len());
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ImplicationRecord = serde_json::from_str(line)
            .map_err(|e| IoError::syntax(line_no, e.column(), e.to_string()))?;
        let imp = rec
            .to_implication(universe)
            .map_err(|source| IoError::Core {
                line: line_no,
                source,
            })?;
        h.push(imp).expect("labels resolve in the same universe");
    }
    Ok(h)
}

/// Human-readable form with the premise removed from the conclusion, e.g.
/// `{milk} → {backbone, breathes}` or `{legs=4, legs=2} → ⊥`.
pub fn render_implication(imp: &Implication, universe: &AttributeUniverse) -> String {
    let join = |s: &AttributeSet| universe.labels_of(s).collect::<Vec<_>>().join(", ");
    match imp.reduced_conclusion() {
        Some(c) => format!("{{{}}} → {{{}}}", join(&imp.premise), join(&c)),
        None => format!("{{{}}} → ⊥", join(&imp.premise)),
    }
}
