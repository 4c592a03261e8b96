//! Burmeister `.cxt` contexts.
//!
//! ```text
//! B
//! <title, may be empty>
//! <object count>
//! <attribute count>
//! <blank lines>
//! <one object name per line>
//! <one attribute name per line>
//! <one row per object: 'X' or '.' per attribute>
//! ```

use std::fmt::Write as _;

use crate::algebra::AssignmentFamily;
use crate::bitset::AttributeSet;
use crate::universe::AttributeUniverse;

use super::{ContextDocument, IoError, Provenance};

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text
                .split('\n')
                .map(|l| l.strip_suffix('\r').unwrap_or(l))
                .collect(),
            pos: 0,
        }
    }

    /// 1-based number of the next line.
    fn number(&self) -> usize {
        self.pos + 1
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self, what: &str) -> Result<&'a str, IoError> {
        let line = self.peek().ok_or_else(|| {
            IoError::syntax(
                self.number(),
                1,
                format!("unexpected end of input, expected {what}"),
            )
        })?;
        self.pos += 1;
        Ok(line)
    }

    fn count(&mut self, what: &str) -> Result<usize, IoError> {
        let n = self.number();
        let line = self.next(what)?;
        line.trim()
            .parse()
            .map_err(|_| IoError::syntax(n, 1, format!("expected {what}, found `{line}`")))
    }

    fn skip_blank(&mut self) {
        while self.peek().is_some_and(|l| l.trim().is_empty()) {
            self.pos += 1;
        }
    }
}

fn is_count(line: &str) -> bool {
    line.trim().parse::<usize>().is_ok()
}

pub fn parse_burmeister(text: &str) -> Result<ContextDocument, IoError> {
    let mut lines = Lines::new(text);
    let header = lines.next("header `B`")?;
    if header.trim() != "B" {
        return Err(IoError::syntax(
            1,
            1,
            format!("expected header `B`, found `{header}`"),
        ));
    }

    // The title line is optional; a bare count means it was left out.
    let title = match lines.peek() {
        Some(l) if is_count(l) => None,
        Some(_) => {
            let t = lines.next("title")?.trim();
            (!t.is_empty()).then(|| t.to_string())
        }
        None => None,
    };
    lines.skip_blank();
    let n_objects = lines.count("object count")?;
    let n_attributes = lines.count("attribute count")?;
    lines.skip_blank();

    let mut objects = Vec::with_capacity(n_objects);
    for _ in 0..n_objects {
        objects.push(lines.next("object name")?.trim().to_string());
    }
    let attr_start = lines.number();
    let mut names = Vec::with_capacity(n_attributes);
    for _ in 0..n_attributes {
        names.push(lines.next("attribute name")?.trim().to_string());
    }
    let universe = AttributeUniverse::new(names).map_err(|source| IoError::Core {
        line: attr_start,
        source,
    })?;

    let mut family = AssignmentFamily::new(n_attributes);
    for _ in 0..n_objects {
        let n = lines.number();
        let row = lines.next("incidence row")?;
        let row = row.trim_end();
        let mut set = AttributeSet::empty(n_attributes);
        let mut width = 0;
        for (col, ch) in row.chars().enumerate() {
            match ch {
                'X' | '.' if col >= n_attributes => {
                    return Err(IoError::syntax(
                        n,
                        col + 1,
                        format!("row has more than {n_attributes} entries"),
                    ))
                }
                'X' => {
                    set.insert(col);
                }
                '.' => {}
                other => {
                    return Err(IoError::syntax(
                        n,
                        col + 1,
                        format!("illegal character `{other}`, expected `X` or `.`"),
                    ))
                }
            }
            width = col + 1;
        }
        if width != n_attributes {
            return Err(IoError::syntax(
                n,
                width + 1,
                format!("row has {width} entries, expected {n_attributes}"),
            ));
        }
        family.push(set).expect("row width matches universe");
    }
    let family = family.with_labels(objects);

    while let Some(line) = lines.peek() {
        if !line.trim().is_empty() {
            return Err(IoError::syntax(
                lines.number(),
                1,
                "trailing content after the last incidence row",
            ));
        }
        lines.pos += 1;
    }

    Ok(ContextDocument {
        title,
        universe,
        family,
        provenance: Provenance::default(),
    })
}

pub fn write_burmeister(doc: &ContextDocument) -> String {
    let mut out = String::new();
    out.push_str("B\n");
    out.push_str(doc.title.as_deref().unwrap_or(""));
    out.push('\n');
    let _ = writeln!(out, "{}", doc.family.len());
    let _ = writeln!(out, "{}", doc.universe.len());
    out.push('\n');
    for name in doc.objects() {
        out.push_str(&name);
        out.push('\n');
    }
    for name in doc.universe.names() {
        out.push_str(name);
        out.push('\n');
    }
    for row in doc.family.rows() {
        for i in 0..doc.universe.len() {
            out.push(if row.contains(i) { 'X' } else { '.' });
        }
        out.push('\n');
    }
    out
}
