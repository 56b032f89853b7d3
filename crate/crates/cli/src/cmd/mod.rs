pub mod analyze;
pub mod dataset;
pub mod decode;
pub mod encode;
pub mod eval;
pub mod scene;

use std::path::Path;

use anyhow::Context;
use serde::Serialize;

/// Writes one JSON record to `path`, or to stdout when `path` is `None`.
pub fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> anyhow::Result<()> {
    let mut line = serde_json::to_string(value)?;
    line.push('\n');
    match path {
        Some(p) => std::fs::write(p, line).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{line}");
            Ok(())
        }
    }
}

pub fn create_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}
