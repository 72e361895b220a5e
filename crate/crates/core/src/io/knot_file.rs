//! Plain-text stick knots.
//!
//! ```text
//! # comment
//! name: fig8
//! type: 4_1
//! closed: true
//! derived: false
//! -1.3 1.1 -0.4
//! ...
//! ```
//!
//! Header lines are optional and must precede the coordinates. Polygons are
//! closed unless a `closed: false` header says otherwise. `derived: true`
//! marks a refinement output, which is exempt from the input-polygon rules.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::point::Point3;
use crate::polygon::ControlPolygon;

#[derive(Clone, Debug, PartialEq)]
pub struct KnotRecord {
    pub name: Option<String>,
    /// Knot type as claimed by the source; never computed.
    pub claimed_type: Option<String>,
    pub polygon: ControlPolygon<f64>,
    pub derived: bool,
}

impl KnotRecord {
    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or("unnamed")
    }
}

/// Parses and applies the input-polygon validation (or only the structural
/// checks, for derived polygons).
pub fn parse_stick_knot(text: &str) -> Result<KnotRecord> {
    let record = parse_stick_knot_unchecked(text)?;
    let verdict = record.polygon.validate(!record.derived);
    if verdict.passed() {
        Ok(record)
    } else {
        Err(Error::Validation(verdict))
    }
}

/// Parses without the input-polygon assumptions (only syntax, finiteness
/// and nonemptiness are checked).
pub fn parse_stick_knot_unchecked(text: &str) -> Result<KnotRecord> {
    let mut name = None;
    let mut claimed_type = None;
    let mut closed = true;
    let mut derived = false;
    let mut points = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        if let Some((key, value)) = line.split_once(':') {
            if !points.is_empty() {
                return Err(err("header line after coordinates".into()));
            }
            let value = value.trim().to_string();
            match key.trim() {
                "name" => name = Some(value),
                "type" => claimed_type = Some(value),
                key @ ("closed" | "derived") => {
                    let flag = match value.as_str() {
                        "true" => true,
                        "false" => false,
                        other => return Err(err(format!("{key} must be true or false, got {other:?}"))),
                    };
                    if key == "closed" {
                        closed = flag;
                    } else {
                        derived = flag;
                    }
                }
                other => return Err(err(format!("unknown header {other:?}"))),
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 coordinates, found {}", fields.len())));
        }
        let mut xyz = [0.0; 3];
        for (slot, field) in xyz.iter_mut().zip(&fields) {
            let v: f64 = field
                .parse()
                .map_err(|_| err(format!("not a number: {field:?}")))?;
            if !v.is_finite() {
                return Err(err(format!("coordinate {field:?} is not finite")));
            }
            *slot = v;
        }
        points.push(Point3::from_array(xyz));
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: "no coordinates".into(),
        });
    }
    Ok(KnotRecord {
        name,
        claimed_type,
        polygon: ControlPolygon::new(points, closed)?,
        derived,
    })
}

/// Writes the record so that [`parse_stick_knot_unchecked`] reproduces it
/// exactly (coordinates use the shortest round-trip representation).
pub fn serialize_stick_knot(record: &KnotRecord) -> String {
    let mut out = String::new();
    if let Some(n) = &record.name {
        writeln!(out, "name: {n}").unwrap();
    }
    if let Some(t) = &record.claimed_type {
        writeln!(out, "type: {t}").unwrap();
    }
    if !record.polygon.is_closed() {
        writeln!(out, "closed: false").unwrap();
    }
    if record.derived {
        writeln!(out, "derived: true").unwrap();
    }
    for p in record.polygon.points() {
        writeln!(out, "{:?} {:?} {:?}", p.x, p.y, p.z).unwrap();
    }
    out
}
