//! Graph interchange format: one JSON document per graph.
//!
//! Reversed message channels are never serialized; propagation derives them
//! from the base edge list on load.

use std::fs;
use std::path::Path;

use super::ProgramGraph;
use crate::error::{CoreError, Result};

pub fn graph_to_json(g: &ProgramGraph) -> String {
    // ProgramGraph contains nothing a JSON map can reorder, so this is stable.
    serde_json::to_string(g).expect("graph serialization cannot fail")
}

pub fn graph_from_json(s: &str) -> Result<ProgramGraph> {
    serde_json::from_str(s).map_err(|e| {
        CoreError::Data(format!(
            "malformed graph json at line {} column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    })
}

pub fn write_graph(path: impl AsRef<Path>, g: &ProgramGraph) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, graph_to_json(g)).map_err(|e| CoreError::io(path.display().to_string(), e))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<ProgramGraph> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
    graph_from_json(&raw)
}
