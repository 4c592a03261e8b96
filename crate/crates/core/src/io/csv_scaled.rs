//! CSV tables turned into formal contexts by per-column scaling.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::algebra::AssignmentFamily;
use crate::bitset::AttributeSet;
use crate::universe::AttributeUniverse;

use super::{ContextDocument, IoError, Provenance};

/// How one CSV column becomes attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Directive {
    /// Already binary: one attribute named after the column.
    AsIs,
    /// One attribute `column=value` per distinct value, in order of first appearance.
    Nominal,
    Drop,
}

/// Column directives for [`parse_csv_scaled`], usually read from TOML:
///
/// ```toml
/// objects = "name"     # optional column holding object names
/// missing = ["?"]      # cell values meaning "no attribute"
///
/// [columns]
/// name = "drop"
/// hair = "as-is"
/// legs = "nominal"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objects: Option<String>,
    #[serde(default)]
    pub missing: Vec<String>,
    pub columns: BTreeMap<String, Directive>,
}

impl ScalingSpec {
    pub fn with(mut self, column: &str, directive: Directive) -> Self {
        self.columns.insert(column.to_string(), directive);
        self
    }
}

fn parse_binary(value: &str) -> Option<bool> {
    match value {
        "1" | "true" | "X" => Some(true),
        "0" | "false" | "." => Some(false),
        _ => None,
    }
}

fn csv_error(e: csv::Error) -> IoError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    IoError::syntax(line, 1, e.to_string())
}

/// Reads a CSV table with a header row and scales it into a context.
pub fn parse_csv_scaled(text: &str, spec: &ScalingSpec) -> Result<ContextDocument, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();

    for column in spec.columns.keys() {
        if !header.contains(column) {
            return Err(IoError::Invalid(format!(
                "scaling names unknown column `{column}`"
            )));
        }
    }
    let mut directives = Vec::with_capacity(header.len());
    for (k, column) in header.iter().enumerate() {
        if header[..k].contains(column) {
            return Err(IoError::syntax(
                1,
                k + 1,
                format!("duplicate column `{column}`"),
            ));
        }
        let d = spec.columns.get(column).copied().ok_or_else(|| {
            IoError::Invalid(format!("no scaling directive for column `{column}`"))
        })?;
        directives.push(d);
    }
    let object_column =
        match &spec.objects {
            Some(name) => Some(header.iter().position(|h| h == name).ok_or_else(|| {
                IoError::Invalid(format!("object column `{name}` not in header"))
            })?),
            None => None,
        };

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        records.push((line, rec));
    }
    if records.is_empty() {
        return Err(IoError::Invalid("dataset has no rows".into()));
    }

    // Attribute layout: columns in header order, nominal values in order of
    // first appearance.
    let missing = |v: &str| spec.missing.iter().any(|m| m == v);
    let mut names: Vec<String> = Vec::new();
    let mut slots: Vec<HashMap<String, usize>> = vec![HashMap::new(); header.len()];
    let mut as_is_slot: Vec<Option<usize>> = vec![None; header.len()];
    for (k, d) in directives.iter().enumerate() {
        match d {
            Directive::AsIs => {
                as_is_slot[k] = Some(names.len());
                names.push(header[k].clone());
            }
            Directive::Nominal => {
                let mut order: Vec<&str> = Vec::new();
                for (_, rec) in &records {
                    let v = &rec[k];
                    if !missing(v) && !order.contains(&v) {
                        order.push(v);
                    }
                }
                for v in order {
                    slots[k].insert(v.to_string(), names.len());
                    names.push(format!("{}={}", header[k], v));
                }
            }
            Directive::Drop => {}
        }
    }
    let universe =
        AttributeUniverse::new(names).map_err(|source| IoError::Core { line: 1, source })?;

    let width = universe.len();
    let mut family = AssignmentFamily::new(width);
    for (row_no, (line, rec)) in records.iter().enumerate() {
        let mut set = AttributeSet::empty(width);
        for (k, d) in directives.iter().enumerate() {
            let v = &rec[k];
            if missing(v) {
                continue;
            }
            match d {
                Directive::AsIs => match parse_binary(v) {
                    Some(true) => {
                        set.insert(as_is_slot[k].expect("as-is column has a slot"));
                    }
                    Some(false) => {}
                    None => {
                        return Err(IoError::syntax(
                            *line,
                            k + 1,
                            format!("non-binary value `{v}` in as-is column `{}`", header[k]),
                        ))
                    }
                },
                Directive::Nominal => {
                    set.insert(slots[k][v]);
                }
                Directive::Drop => {}
            }
        }
        let label = match object_column {
            Some(c) => rec[c].to_string(),
            None => format!("g{row_no}"),
        };
        family
            .push_labeled(label, set)
            .expect("row width matches universe");
    }

    Ok(ContextDocument {
        title: None,
        universe,
        family,
        provenance: Provenance::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ScalingSpec {
        ScalingSpec::default()
            .with("name", Directive::Drop)
            .with("hair", Directive::AsIs)
            .with("legs", Directive::Nominal)
    }

    #[test]
    fn nominal_values_in_first_appearance_order() {
        let text = "name,hair,legs\nant,0,6\ncat,1,4\nbird,0,2\ncrab,0,8\nfish,0,0\nstar,0,5\n";
        let doc = parse_csv_scaled(text, &spec()).unwrap();
        assert_eq!(
            doc.universe.names(),
            &["hair", "legs=6", "legs=4", "legs=2", "legs=8", "legs=0", "legs=5"]
        );
        assert_eq!(doc.family.len(), 6);
        assert_eq!(doc.family.rows()[1], AttributeSet::from_indices(7, [0, 2]));
    }

    #[test]
    fn single_value_nominal_column_is_always_true() {
        let text = "name,hair,legs\na,1,4\nb,0,4\n";
        let doc = parse_csv_scaled(text, &spec()).unwrap();
        assert_eq!(doc.universe.names(), &["hair", "legs=4"]);
        assert!(doc.family.rows().iter().all(|r| r.contains(1)));
    }

    #[test]
    fn object_column_and_missing_values() {
        let mut s = spec();
        s.objects = Some("name".into());
        s.missing = vec!["?".into()];
        let doc = parse_csv_scaled("name,hair,legs\nx,?,?\ny,true,2\n", &s).unwrap();
        assert_eq!(doc.objects(), vec!["x".to_string(), "y".to_string()]);
        assert!(doc.family.rows()[0].is_empty());
        assert_eq!(doc.universe.names(), &["hair", "legs=2"]);
    }

    #[test]
    fn rejects_bad_input() {
        let err = parse_csv_scaled("name,hair,legs\na,2,4\n", &spec()).unwrap_err();
        assert!(
            matches!(
                err,
                IoError::Syntax {
                    line: 2,
                    column: 2,
                    ..
                }
            ),
            "{err}"
        );

        let unknown = spec().with("tail", Directive::AsIs);
        assert!(parse_csv_scaled("name,hair,legs\na,1,4\n", &unknown).is_err());

        let uncovered = parse_csv_scaled("name,hair,legs,tail\na,1,4,0\n", &spec());
        assert!(uncovered.is_err());

        assert!(parse_csv_scaled("name,hair,legs\n", &spec()).is_err());

        let ragged = parse_csv_scaled("name,hair,legs\na,1\n", &spec()).unwrap_err();
        assert!(matches!(ragged, IoError::Syntax { .. }));
    }

    #[test]
    fn generated_labels_must_be_unique() {
        let s = ScalingSpec::default()
            .with("legs=4", Directive::AsIs)
            .with("legs", Directive::Nominal);
        assert!(parse_csv_scaled("legs=4,legs\n1,4\n", &s).is_err());
    }

    #[test]
    fn spec_from_toml() {
        let s: ScalingSpec = toml::from_str(
            "missing = [\"?\"]\n[columns]\nname = \"drop\"\nhair = \"as-is\"\nlegs = \"nominal\"\n",
        )
        .unwrap();
        assert_eq!(s.columns["hair"], Directive::AsIs);
        assert!(toml::from_str::<ScalingSpec>("[columns]\nx = \"ordinal\"\n").is_err());
    }
}
