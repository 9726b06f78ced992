//! Serialization helpers shared by the subcommands.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips f64 exactly and keeps output files byte-deterministic.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// 17-significant-digit scientific form; `NaN` for unavailable values.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Same as [`g17`] but JSON-safe: unavailable values become `null`.
pub fn g17_json(x: f64) -> String {
    if x.is_nan() {
        "null".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Writes to the path when given, stdout otherwise. Content is assembled
/// in full beforehand so a run is all-or-nothing.
pub fn emit(path: Option<&Path>, content: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, content),
        None => io::stdout().lock().write_all(content.as_bytes()),
    }
}
