//! Versioned JSON session documents.
//!
//! Fields this version does not know about are kept in `extra` maps and
//! written back unchanged, at the top level and inside knot and morph
//! entries.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bezier::BezierCurve;
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::intersect::{IsotopyCertificate, Verdict, DEFAULT_EPS};
use crate::morph::{MorphFamily, ScanSettings, TransitionResult, DEFAULT_GRID};
use crate::point::Point3;
use crate::polygon::ControlPolygon;

use super::knot_file::KnotRecord;

pub const SESSION_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionDocument {
    pub format_version: u32,
    #[serde(default)]
    pub knots: Vec<KnotEntry>,
    #[serde(default)]
    pub morphs: Vec<MorphDefinition>,
    #[serde(default)]
    pub resolution: ResolutionSettings,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub results: Vec<ResultEntry>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_type: Option<String>,
    pub closed: bool,
    pub points: Vec<Point3<f64>>,
    /// Produced by refinement or point insertion; exempt from the
    /// no-collinear-triple input rule.
    #[serde(default)]
    pub derived: bool,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    /// The PL knot itself, sampled with every vertex included.
    #[default]
    Polygon,
    /// Bézier curve of refinement iterate `iterate`.
    Bezier { iterate: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSource {
    pub knot: String,
    #[serde(default)]
    pub curve: CurveKind,
    #[serde(default)]
    pub offset: Point3<f64>,
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphDefinition {
    pub name: String,
    pub fixed: CurveSource,
    pub start: CurveSource,
    pub end: CurveSource,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionSettings {
    pub samples: usize,
    pub v_steps: usize,
}

impl Default for ResolutionSettings {
    fn default() -> Self {
        Self {
            samples: 64,
            v_steps: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps: f64,
    pub tol: f64,
    pub grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            tol: 1e-6,
            grid: DEFAULT_GRID,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub label: String,
    pub verdict: Verdict,
    pub witness_pairs: usize,
    pub grazing_pairs: usize,
    pub samples: usize,
    pub v_steps: usize,
    pub eps: f64,
}

impl CertificateSummary {
    pub fn from_certificate(label: impl Into<String>, c: &IsotopyCertificate<f64>, eps: f64) -> Self {
        Self {
            label: label.into(),
            verdict: c.verdict,
            witness_pairs: c.evidence.pairs.len(),
            grazing_pairs: c.evidence.grazing.len(),
            samples: c.resolution.samples,
            v_steps: c.resolution.v_steps,
            eps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionSummary {
    pub morph: String,
    /// `None` when no transition was found on the grid.
    pub bracket: Option<[f64; 2]>,
    pub already_intersecting: bool,
    pub witness_pairs: usize,
    pub grid: usize,
    pub tol: f64,
    pub samples: usize,
    pub v_steps: usize,
    pub eps: f64,
}

impl TransitionSummary {
    pub fn new(
        morph: impl Into<String>,
        result: Option<&TransitionResult<f64>>,
        settings: ScanSettings<f64>,
        samples: usize,
    ) -> Self {
        Self {
            morph: morph.into(),
            bracket: result.map(|r| [r.s_lo, r.s_hi]),
            already_intersecting: result.is_some_and(|r| r.already_intersecting),
            witness_pairs: result.map_or(0, |r| r.witnesses.pairs.len()),
            grid: settings.grid,
            tol: settings.tol,
            samples,
            v_steps: settings.v_steps,
            eps: settings.eps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultEntry {
    Certificate(CertificateSummary),
    Transition(TransitionSummary),
}

impl Default for SessionDocument {
    fn default() -> Self {
        Self {
            format_version: SESSION_FORMAT_VERSION,
            knots: Vec::new(),
            morphs: Vec::new(),
            resolution: ResolutionSettings::default(),
            tolerances: Tolerances::default(),
            results: Vec::new(),
            extra: Map::new(),
        }
    }
}

impl KnotEntry {
    pub fn from_record(record: &KnotRecord) -> Self {
        Self {
            name: record.display_name().to_string(),
            claimed_type: record.claimed_type.clone(),
            closed: record.polygon.is_closed(),
            points: record.polygon.points().to_vec(),
            derived: record.derived,
            extra: Map::new(),
        }
    }

    pub fn polygon(&self) -> Result<ControlPolygon<f64>> {
        ControlPolygon::new(self.points.clone(), self.closed)
    }

    /// Input-polygon validation for user entries; finiteness only for derived ones.
    pub fn validate(&self) -> crate::polygon::ValidationVerdict {
        match ControlPolygon::new(self.points.clone(), self.closed) {
            Ok(p) => p.validate(!self.derived),
            Err(Error::Validation(v)) => v,
            Err(e) => unreachable!("polygon construction only fails validation: {e}"),
        }
    }
}

impl CurveSource {
    pub fn of(knot: impl Into<String>) -> Self {
        Self {
            knot: knot.into(),
            curve: CurveKind::Polygon,
            offset: Point3::zero(),
            reversed: false,
        }
    }

    pub fn sample(&self, doc: &SessionDocument, m: usize) -> Result<SampledCurve<f64>> {
        let knot = doc
            .knot(&self.knot)
            .ok_or_else(|| Error::Domain(format!("no knot named {:?}", self.knot)))?;
        let polygon = knot.polygon()?;
        let curve = sample_source(&polygon, self.curve, m)?;
        let curve = if self.reversed { curve.reversed() } else { curve };
        Ok(curve.translated(self.offset))
    }
}

/// Samples `polygon` per `kind` at `m` intervals.
pub fn sample_source(polygon: &ControlPolygon<f64>, kind: CurveKind, m: usize) -> Result<SampledCurve<f64>> {
    match kind {
        CurveKind::Polygon => SampledCurve::from_polygon(polygon, m),
        CurveKind::Bezier { iterate } => {
            let mut p = polygon.clone();
            for _ in 0..iterate {
                p = p.refine_midpoints();
            }
            BezierCurve::from_polygon(&p).sample(m)
        }
    }
}

impl MorphDefinition {
    pub fn family(&self, doc: &SessionDocument, m: usize) -> Result<MorphFamily<f64>> {
        MorphFamily::new(
            self.fixed.sample(doc, m)?,
            self.start.sample(doc, m)?,
            self.end.sample(doc, m)?,
        )
    }
}

impl SessionDocument {
    pub fn knot(&self, name: &str) -> Option<&KnotEntry> {
        self.knots.iter().find(|k| k.name == name)
    }

    pub fn knot_mut(&mut self, name: &str) -> Option<&mut KnotEntry> {
        self.knots.iter_mut().find(|k| k.name == name)
    }

    pub fn morph(&self, name: &str) -> Option<&MorphDefinition> {
        self.morphs.iter().find(|m| m.name == name)
    }

    /// Replaces a morph of the same name, or appends.
    pub fn set_morph(&mut self, def: MorphDefinition) {
        match self.morphs.iter_mut().find(|m| m.name == def.name) {
            Some(slot) => *slot = def,
            None => self.morphs.push(def),
        }
    }

    pub fn scan_settings(&self) -> ScanSettings<f64> {
        ScanSettings {
            grid: self.tolerances.grid,
            tol: self.tolerances.tol,
            v_steps: self.resolution.v_steps,
            eps: self.tolerances.eps,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.format_version > SESSION_FORMAT_VERSION {
            return Err(Error::Domain(format!(
                "session format version {} is newer than supported version {}",
                doc.format_version, SESSION_FORMAT_VERSION
            )));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn save_session(doc: &SessionDocument, path: &Path) -> Result<()> {
    std::fs::write(path, doc.to_json()? + "\n")?;
    Ok(())
}

pub fn load_session(path: &Path) -> Result<SessionDocument> {
    SessionDocument::from_json(&std::fs::read_to_string(path)?)
}
