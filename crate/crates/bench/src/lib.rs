//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use tascheck::speclang::{parse_spec, SpecFile};

/// Parses `fixtures/<name>` from the workspace root.
pub fn fixture(name: &str) -> SpecFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_spec(&text).unwrap_or_else(|e| panic!("{e}"))
}
