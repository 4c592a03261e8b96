//! Criterion benchmarks for the algorithm crate; see `benches/`.

use std::path::PathBuf;

use hornex_core::io::{load_context, ContextDocument};

/// Loads a bundled dataset by file name, with its sibling scaling file if any.
pub fn bundled(name: &str) -> ContextDocument {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let data = dir.join(name);
    let scaling = data.with_extension("scaling.toml");
    let scaling = scaling.exists().then_some(scaling);
    load_context(&data, scaling.as_deref()).unwrap_or_else(|e| panic!("loading {name}: {e}"))
}
