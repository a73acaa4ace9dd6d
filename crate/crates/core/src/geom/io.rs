//! Knot files: JSON `{"vertices": [[x, y, z], ...]}` or plain text with one
//! `x y z` line per vertex. Closure is implicit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PolygonalKnot, Vec3};
use crate::error::{KnotError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnotFile {
    pub vertices: Vec<[f64; 3]>,
}

impl From<&PolygonalKnot> for KnotFile {
    fn from(k: &PolygonalKnot) -> Self {
        Self { vertices: k.vertices().iter().map(|v| [v.x, v.y, v.z]).collect() }
    }
}

pub fn to_json(knot: &PolygonalKnot) -> String {
    serde_json::to_string_pretty(&KnotFile::from(knot)).expect("knot serializes")
}

pub fn to_text(knot: &PolygonalKnot) -> String {
    let mut out = String::new();
    for v in knot.vertices() {
        // `{:?}` prints the shortest round-tripping decimal.
        out.push_str(&format!("{:?} {:?} {:?}\n", v.x, v.y, v.z));
    }
    out
}

/// Parses either format, detected from the first non-blank character.
pub fn parse(text: &str) -> Result<Vec<Vec3>> {
    if text.trim_start().starts_with('{') {
        let file: KnotFile = serde_json::from_str(text).map_err(|e| KnotError::Parse(e.to_string()))?;
        return Ok(file.vertices.into_iter().map(Vec3::from).collect());
    }
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords: std::result::Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
        match coords {
            Ok(c) if c.len() == 3 => out.push(Vec3::new(c[0], c[1], c[2])),
            _ => return Err(KnotError::Parse(format!("line {}: expected `x y z`", lineno + 1))),
        }
    }
    Ok(out)
}

pub fn read(path: &Path) -> Result<PolygonalKnot> {
    let text = std::fs::read_to_string(path).map_err(|e| KnotError::Parse(format!("{}: {e}", path.display())))?;
    PolygonalKnot::new(parse(&text)?)
}

/// Writes JSON unless the extension is `.txt` or `.xyz`.
pub fn write(path: &Path, knot: &PolygonalKnot) -> std::io::Result<()> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some("txt") | Some("xyz") => to_text(knot),
        _ => to_json(knot),
    };
    std::fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{generate, KnotKind};

    #[test]
    fn both_formats_round_trip_exactly() {
        let k = generate(KnotKind::TREFOIL, 0).unwrap();
        assert_eq!(parse(&to_json(&k)).unwrap(), k.vertices());
        assert_eq!(parse(&to_text(&k)).unwrap(), k.vertices());
    }

    #[test]
    fn text_errors_name_the_line() {
        let err = parse("0 0 0\n1 0\n").unwrap_err();
        assert_eq!(err, KnotError::Parse("line 2: expected `x y z`".into()));
    }
}
