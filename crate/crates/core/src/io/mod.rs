//! Dataset ingestion and serialization.
//!
//! Supported inputs are Burmeister `.cxt` formal contexts and CSV tables with
//! a per-column [`ScalingSpec`]. Formulas are written one implication per
//! line as JSON records.

mod burmeister;
mod config;
mod csv_scaled;
mod formula;

use std::path::Path;

use thiserror::Error;

use crate::algebra::AssignmentFamily;
use crate::error::CoreError;
use crate::universe::AttributeUniverse;

pub use burmeister::{parse_burmeister, write_burmeister};
pub use config::{load_learner_config, load_scaling_spec};
pub use csv_scaled::{parse_csv_scaled, Directive, ScalingSpec};
pub use formula::{
    parse_formula, render_implication, serialize_formula, Conclusion, ImplicationRecord,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Core {
        line: usize,
        #[source]
        source: CoreError,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl IoError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        IoError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Where a document came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub source: Option<String>,
    pub scaling: Option<String>,
}

/// A loaded dataset: universe, rows, and object labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextDocument {
    pub title: Option<String>,
    pub universe: AttributeUniverse,
    pub family: AssignmentFamily,
    pub provenance: Provenance,
}

impl ContextDocument {
    pub fn objects(&self) -> Vec<String> {
        match self.family.labels() {
            Some(l) => l.to_vec(),
            None => (0..self.family.len()).map(|i| format!("g{i}")).collect(),
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a dataset from disk: `.cxt` files as Burmeister contexts, anything
/// else as CSV, which requires a scaling spec.
pub fn load_context(path: &Path, scaling: Option<&Path>) -> Result<ContextDocument, IoError> {
    let text = read_file(path)?;
    let is_cxt = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("cxt"));
    let mut doc = if is_cxt {
        parse_burmeister(&text)?
    } else {
        let spec_path = scaling.ok_or_else(|| {
            IoError::Invalid(format!(
                "{}: CSV input needs a scaling spec",
                path.display()
            ))
        })?;
        let spec = load_scaling_spec(spec_path)?;
        let mut doc = parse_csv_scaled(&text, &spec)?;
        doc.provenance.scaling = Some(spec_path.display().to_string());
        doc
    };
    doc.provenance.source = Some(path.display().to_string());
    Ok(doc)
}
